//! Python bindings: `import usc`.

use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use usc_core::circuit::qubit::{DEFAULT_WINDOW_HALF_WIDTH, QUBIT_NCUT};
use usc_core::circuit::{qubit_gap_and_ip, CircuitParams, FluxWindow, JunctionCharge, JunctionEnergy};
use usc_core::materials::{RTCurve, TcOptions, WireGeometry};
use usc_core::reduced::rabi::{transitions, Model};
use usc_core::reduced::QRMParams;
use usc_core::spectro::{fit_qrm, normalize_map, FitOptions, MagnitudeScale, S21Map, TransitionPoint, TransitionPoints};
use usc_core::TransitionLabel;

fn to_py(e: usc_core::Error) -> PyErr {
    if e.is_io() {
        PyIOError::new_err(e.to_string())
    } else if e.is_numeric() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn label(s: &str) -> PyResult<TransitionLabel> {
    s.parse().map_err(to_py)
}

/// Kinetic inductance in nH from normal resistance (Ω) and Tc (K).
#[pyfunction]
fn kinetic_inductance(r_ohm: f64, tc_k: f64) -> PyResult<f64> {
    usc_core::materials::kinetic_inductance(r_ohm, tc_k).map_err(to_py)
}

/// Resistivity in µΩ·cm of a wire of the given geometry.
#[pyfunction]
#[pyo3(signature = (r_ohm, length_um=30.0, width_um=0.487, thickness_nm=50.0))]
fn resistivity(r_ohm: f64, length_um: f64, width_um: f64, thickness_nm: f64) -> PyResult<f64> {
    let g = WireGeometry::new(length_um, width_um, thickness_nm).map_err(to_py)?;
    usc_core::materials::resistivity(r_ohm, &g).map_err(to_py)
}

/// (sheet resistance, uncertainty) in Ω/sq for an oxygen flow in sccm.
#[pyfunction]
#[pyo3(signature = (flow_sccm, baked=false, interpolate=false))]
fn gral_calibration(flow_sccm: f64, baked: bool, interpolate: bool) -> PyResult<(f64, f64)> {
    let e = usc_core::materials::gral_calibration(flow_sccm, baked, interpolate).map_err(to_py)?;
    Ok((e.rs, e.uncertainty))
}

/// Tc, ΔTc, T10 and T90 (K) from an R(T) sweep.
#[pyfunction]
#[pyo3(signature = (temperatures_k, resistances_ohm, onset_window=usc_core::materials::DEFAULT_ONSET_WINDOW))]
fn tc_from_rt<'py>(
    py: Python<'py>,
    temperatures_k: Vec<f64>,
    resistances_ohm: Vec<f64>,
    onset_window: f64,
) -> PyResult<Bound<'py, PyDict>> {
    if temperatures_k.len() != resistances_ohm.len() {
        return Err(PyValueError::new_err("temperature and resistance lists differ in length"));
    }
    let curve = RTCurve::new(temperatures_k.into_iter().zip(resistances_ohm).collect()).map_err(to_py)?;
    let r = usc_core::materials::tc_from_rt_curve(&curve, &TcOptions { onset_window }).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("tc_k", r.tc_k)?;
    d.set_item("delta_tc_k", r.delta_tc_k)?;
    d.set_item("t10_k", r.t10_k)?;
    d.set_item("t90_k", r.t90_k)?;
    d.set_item("onset_resistance_ohm", r.onset_resistance_ohm)?;
    Ok(d)
}

/// (ω_r/2π in GHz, impedance in Ω) of the resonator loaded by the coupler.
#[pyfunction]
fn renormalized_resonator(lr_nh: f64, lc_nh: f64, cr_ff: f64) -> PyResult<(f64, f64)> {
    usc_core::reduced::renormalized_resonator(lr_nh, lc_nh, cr_ff).map_err(to_py)
}

#[allow(clippy::too_many_arguments)]
fn circuit(ej_ghz: f64, ec_ghz: f64, alpha: f64, csh_ff: f64, lr_nh: f64, cr_ff: f64, lc_nh: f64) -> PyResult<CircuitParams> {
    CircuitParams::new(
        JunctionEnergy::Frequency { ej_ghz },
        JunctionCharge::ChargingEnergyGhz(ec_ghz),
        alpha,
        csh_ff,
        lr_nh,
        cr_ff,
        lc_nh,
    )
    .map_err(to_py)
}

/// Coupling estimate from lumped elements; returns g and every intermediate.
#[pyfunction]
#[pyo3(signature = (ip_na, csh_ff, ej_ghz=93.46, ec_ghz=4.94, alpha=0.58, lr_nh=0.9, cr_ff=740.0, lc_nh=0.74))]
#[allow(clippy::too_many_arguments)]
fn coupling_estimate<'py>(
    py: Python<'py>,
    ip_na: f64,
    csh_ff: f64,
    ej_ghz: f64,
    ec_ghz: f64,
    alpha: f64,
    lr_nh: f64,
    cr_ff: f64,
    lc_nh: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let p = circuit(ej_ghz, ec_ghz, alpha, csh_ff, lr_nh, cr_ff, lc_nh)?;
    let e = usc_core::reduced::coupling_estimate(&p, ip_na).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("g_ghz", e.g_ghz)?;
    d.set_item("g_over_omega_r", e.g_over_omega_r())?;
    d.set_item("l_eff_nh", e.l_eff_nh)?;
    d.set_item("omega_r_bare_ghz", e.omega_r_bare_ghz)?;
    d.set_item("omega_r_loaded_ghz", e.omega_r_loaded_ghz)?;
    d.set_item("irms_na", e.irms_na)?;
    d.set_item("z_r_ohm", e.z_r_ohm)?;
    d.set_item("xi_r", e.xi_r)?;
    d.set_item("g_simple_limit_ghz", e.g_simple_limit_ghz)?;
    Ok(d)
}

/// (Δ in GHz, I_p in nA) of the renormalized qubit-only model.
#[pyfunction]
#[pyo3(signature = (csh_ff, ej_ghz=93.46, ec_ghz=4.94, alpha=0.58, lr_nh=0.8986, cr_ff=742.3, lc_nh=0.5))]
fn qubit_gap(csh_ff: f64, ej_ghz: f64, ec_ghz: f64, alpha: f64, lr_nh: f64, cr_ff: f64, lc_nh: f64) -> PyResult<(f64, f64)> {
    let p = circuit(ej_ghz, ec_ghz, alpha, csh_ff, lr_nh, cr_ff, lc_nh)?;
    let e = qubit_gap_and_ip(&p, QUBIT_NCUT, FluxWindow::symmetric(DEFAULT_WINDOW_HALF_WIDTH)).map_err(to_py)?;
    Ok((e.delta_ghz, e.ip_slope_na))
}

/// Transition frequencies (GHz) at one flux, ordered as `transition_labels()`.
#[pyfunction]
#[pyo3(signature = (delta_ghz, ip_na, omega_r_ghz, g_ghz, flux, model="rabi"))]
fn qrm_transitions(delta_ghz: f64, ip_na: f64, omega_r_ghz: f64, g_ghz: f64, flux: f64, model: &str) -> PyResult<Vec<f64>> {
    let m = match model {
        "rabi" => Model::Rabi,
        "jc" => Model::JaynesCummings,
        _ => return Err(PyValueError::new_err(format!("model `{model}` is not `rabi` or `jc`"))),
    };
    let p = QRMParams::new(delta_ghz, ip_na, omega_r_ghz, g_ghz).map_err(to_py)?;
    Ok(transitions(&p, flux, m).map_err(to_py)?.values.to_vec())
}

/// Bloch-Siegert shift, QRM minus JC, GHz.
#[pyfunction]
#[pyo3(signature = (delta_ghz, ip_na, omega_r_ghz, g_ghz, flux=0.5, transition="w01"))]
fn bs_shift(delta_ghz: f64, ip_na: f64, omega_r_ghz: f64, g_ghz: f64, flux: f64, transition: &str) -> PyResult<f64> {
    let p = QRMParams::new(delta_ghz, ip_na, omega_r_ghz, g_ghz).map_err(to_py)?;
    usc_core::reduced::bs_shift_numeric(&p, flux, label(transition)?).map_err(to_py)
}

#[pyfunction]
fn transition_labels() -> Vec<&'static str> {
    TransitionLabel::ALL.iter().map(|l| l.name()).collect()
}

/// Row normalization of a map given as rows of fixed frequency across flux.
#[pyfunction]
fn normalize_rows(rows: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
    let nflux = rows.first().map_or(0, Vec::len);
    let freq = (0..rows.len()).map(|i| i as f64).collect();
    let flux = (0..nflux).map(|j| j as f64).collect();
    let map = S21Map::new(freq, flux, rows, MagnitudeScale::Linear).map_err(to_py)?;
    Ok(normalize_map(&map).map_err(to_py)?.magnitude)
}

/// Fits (flux, freq_GHz, label) points from the guess (Δ, I_p, ω_r, g).
#[pyfunction]
#[pyo3(signature = (points, guess, sigma_ghz=None))]
fn fit<'py>(
    py: Python<'py>,
    points: Vec<(f64, f64, String)>,
    guess: (f64, f64, f64, f64),
    sigma_ghz: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let pts = points
        .iter()
        .map(|(x, f, l)| Ok(TransitionPoint::new(*x, *f, label(l)?)))
        .collect::<PyResult<Vec<_>>>()?;
    let pts = TransitionPoints::new(pts).map_err(to_py)?;
    let g = QRMParams::new(guess.0, guess.1, guess.2, guess.3).map_err(to_py)?;
    let opts = FitOptions { sigma_ghz, ..FitOptions::default() };
    let r = fit_qrm(&pts, &g, &opts).map_err(to_py)?;
    let d = PyDict::new(py);
    for (i, name) in usc_core::spectro::PARAM_NAMES.iter().enumerate() {
        d.set_item(*name, (r.value(i), r.uncertainties[i]))?;
    }
    d.set_item("residual_rms_GHz", r.residual_rms_ghz)?;
    d.set_item("iterations", r.iterations)?;
    Ok(d)
}

#[pymodule]
fn usc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(kinetic_inductance, m)?)?;
    m.add_function(wrap_pyfunction!(resistivity, m)?)?;
    m.add_function(wrap_pyfunction!(gral_calibration, m)?)?;
    m.add_function(wrap_pyfunction!(tc_from_rt, m)?)?;
    m.add_function(wrap_pyfunction!(renormalized_resonator, m)?)?;
    m.add_function(wrap_pyfunction!(coupling_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(qubit_gap, m)?)?;
    m.add_function(wrap_pyfunction!(qrm_transitions, m)?)?;
    m.add_function(wrap_pyfunction!(bs_shift, m)?)?;
    m.add_function(wrap_pyfunction!(transition_labels, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_rows, m)?)?;
    m.add_function(wrap_pyfunction!(fit, m)?)?;
    Ok(())
}
