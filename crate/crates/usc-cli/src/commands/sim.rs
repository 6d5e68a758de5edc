//! simulate, simulate-qrm, bs-shift, estimate-coupling.

use serde_json::{json, Map, Value};

use usc_core::circuit::full::validate_flux;
use usc_core::circuit::qubit::DEFAULT_WINDOW_HALF_WIDTH;
use usc_core::circuit::{qubit_gap_and_ip, spectrum_of_model, FluxWindow, FullModel, QubitModel, TruncationSpec};
use usc_core::quantum::EigenOptions;
use usc_core::reduced::rabi::{bs_shift_analytic, bs_shift_numeric, coupling_from_bs_shift, transitions_fixed, Model};
use usc_core::reduced::{coupling_estimate_with, XiMode};
use usc_core::spectro::OverlayCurves;
use usc_core::TransitionLabel;

use super::{circuit_params, column, fluxes, labels, qrm_params};
use crate::config::Config;
use crate::output::{num, CliResult, Failure, Sink};
use crate::plot::{line_plot, Series};

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

pub fn simulate(c: &Config, sink: &mut Sink) -> CliResult<Value> {
    let p = circuit_params(c)?;
    let flux = fluxes(c)?;
    for &f in &flux {
        validate_flux(f)?;
    }
    let qncut = c.usize("qubit_ncut")?;
    let qm = QubitModel::new(&p, qncut)?;
    let qubit: Vec<f64> = flux
        .iter()
        .map(|&f| qm.two_level(f).map(|t| t.e1 - t.e0))
        .collect::<usc_core::Result<_>>()?;
    let est = qubit_gap_and_ip(&p, qncut, FluxWindow::symmetric(DEFAULT_WINDOW_HALF_WIDTH))?;

    sink.csv("qubit.csv", |w| {
        let mut wr = csv_writer(w);
        wr.write_record(["flux", "qubit_w01_GHz"])?;
        for (f, q) in flux.iter().zip(&qubit) {
            wr.write_record([f.to_string(), q.to_string()])?;
        }
        wr.flush()?;
        Ok(())
    })?;

    let mut series = Vec::new();
    let mut result = Map::new();
    result.insert("circuit".into(), to_value(&p));
    result.insert("qubit_model".into(), to_value(&est));
    result.insert(
        "qubit_w01_GHz".into(),
        json!(flux.iter().zip(&qubit).map(|(f, q)| json!({"flux": f, "w01_GHz": q})).collect::<Vec<_>>()),
    );

    if c.bool("full_model")? {
        let trunc = TruncationSpec::new(c.usize("ncut1")?, c.usize("ncut3")?, c.usize("n4")?, c.usize("n6")?)?;
        let k = c.usize("levels")?;
        if k < 4 {
            return Err(Failure::validation(format!("key `levels`: need at least 4, got {k}")));
        }
        let model = FullModel::with_cap(&p, &trunc, c.usize("dim_cap")?)?;
        let run = spectrum_of_model(&model, &flux, k, &EigenOptions::default())?;
        sink.csv("spectrum.csv", |w| run.table.write_csv(w))?;
        for label in [TransitionLabel::W01, TransitionLabel::W02, TransitionLabel::W12] {
            let t = run.table.transition(label);
            series.push(Series {
                name: format!("{} (circuit)", label.name()),
                points: flux.iter().copied().zip(t).collect(),
                dashed: false,
            });
        }
        let worst = run.diagnostics.iter().map(|d| d.max_residual).fold(0.0, f64::max);
        result.insert("dimension".into(), json!(trunc.dim()));
        result.insert("max_eigen_residual".into(), num(worst));
    }
    series.push(Series {
        name: "qubit-only w01".into(),
        points: flux.iter().copied().zip(qubit.iter().copied()).collect(),
        dashed: true,
    });
    sink.svg("spectrum.svg", &line_plot(&series, "flux (Φ₀)", "frequency (GHz)"))?;
    Ok(Value::Object(result))
}

fn csv_writer(w: &mut Vec<u8>) -> csv::Writer<&mut Vec<u8>> {
    csv::Writer::from_writer(w)
}

pub fn simulate_qrm(c: &Config, sink: &mut Sink) -> CliResult<Value> {
    let p = qrm_params(c)?;
    let flux = fluxes(c)?;
    let curves = OverlayCurves::compute(&p, &flux)?;
    sink.csv("qrm_spectrum.csv", |w| curves.write_csv(w))?;
    let doubled = p.with_nfock(2 * p.nfock);
    let fock_change = flux
        .iter()
        .map(|&f| {
            let a = transitions_fixed(&p, f, Model::Rabi);
            let b = transitions_fixed(&doubled, f, Model::Rabi);
            a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    let mut series = Vec::new();
    for label in labels(c)? {
        let i = column(label);
        for (rows, tag, dashed) in [(&curves.qrm, "QRM", false), (&curves.jc, "JC", true)] {
            series.push(Series {
                name: format!("{} {tag}", label.name()),
                points: flux.iter().copied().zip(rows.iter().map(|r| r[i])).collect(),
                dashed,
            });
        }
    }
    sink.svg("qrm_spectrum.svg", &line_plot(&series, "flux (Φ₀)", "frequency (GHz)"))?;
    Ok(json!({
        "params": to_value(&p),
        "n_flux": flux.len(),
        "fock_doubling_change_GHz": num(fock_change),
    }))
}

pub fn bs_shift(c: &Config) -> CliResult<Value> {
    let p = qrm_params(c)?;
    let f = c.f64("flux_Phi0")?;
    let mut shifts = Map::new();
    for label in TransitionLabel::ALL {
        shifts.insert(label.name().into(), num(1e3 * bs_shift_numeric(&p, f, label)?));
    }
    let wq = p.qubit_frequency(f);
    let mut out = json!({
        "params": to_value(&p),
        "flux_Phi0": f,
        "qubit_frequency_GHz": wq,
        "numeric_shift_MHz": shifts,
        "analytic_shift_MHz": 1e3 * bs_shift_analytic(&p, f),
        "sign_convention": "QRM minus JC",
    });
    if let Some(s) = c.opt_f64("bs_shift_MHz")? {
        out["g_from_shift_GHz"] = num(coupling_from_bs_shift(s.abs() * 1e-3, p.omega_r_ghz, wq));
    }
    Ok(out)
}

pub fn estimate_coupling(c: &Config) -> CliResult<Value> {
    let p = circuit_params(c)?;
    let ip = c.f64("Ip_nA")?;
    let xi = match c.require("xi")? {
        "computed" => XiMode::Computed,
        "unity" => XiMode::Unity,
        v => return Err(Failure::validation(format!("key `xi`: `{v}` is not `computed` or `unity`"))),
    };
    let tol = c.f64("simple_limit_tol")?;
    let est = coupling_estimate_with(&p, ip, xi)?;
    let dev = est.simple_limit_deviation();
    let mut out = to_value(&est);
    out["circuit"] = to_value(&p);
    out["Ip_nA"] = json!(ip);
    out["g_over_omega_r"] = num(est.g_over_omega_r());
    out["simple_limit_deviation"] = num(dev);
    out["simple_limit_check"] = json!(if dev.is_finite() && dev <= tol { "agrees" } else { "differs" });
    Ok(out)
}
