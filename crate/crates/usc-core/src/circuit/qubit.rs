//! Qubit-only model: junction phases 1 and 3 with the coupler frozen.
//!
//! Freezing φ₄ leaves the capacitance block C_J[[1+α̃, α̃], [α̃, 1+α̃]] for
//! the two large junctions; its inverse sets the kinetic term. The coupler's
//! inductive loading enters as −½·L_eff·Î_q², Î_q = αI_C sin(2πf − φ₁ − φ₃).

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::full::validate_flux;
use super::params::CircuitParams;
use crate::constants::{inductance_current_sq_ghz, GHZ, H, NANO, PHI0};
use crate::error::{Error, Result};
use crate::quantum::basis::ChargeBasis;
use crate::quantum::eigen::{eigs_hermitian_with, EigenOptions};
use crate::quantum::operator::Operator;

/// Default charge cutoff of the qubit-only model.
pub const QUBIT_NCUT: usize = 8;

/// Default half-width of the flux window used for the persistent current.
pub const DEFAULT_WINDOW_HALF_WIDTH: f64 = 0.005;

#[derive(Clone, Debug)]
pub struct QubitModel {
    params: CircuitParams,
    ncut: usize,
    static_part: Operator,
    /// e^{−iφ₁} e^{−iφ₃}.
    loop_shift: Operator,
}

impl QubitModel {
    pub fn new(params: &CircuitParams, ncut: usize) -> Result<Self> {
        params.validate()?;
        if ncut < 4 {
            return Err(Error::param("ncut", format!("must be at least 4, got {ncut}")));
        }
        let b = ChargeBasis::new(ncut)?;
        let id = Operator::identity(b.dim());
        let at = params.alpha_tilde();
        // Inverse of [[1+α̃, α̃], [α̃, 1+α̃]].
        let det = 1.0 + 2.0 * at;
        let (m_diag, m_off) = ((1.0 + at) / det, -at / det);
        let ec = params.ec_ghz();
        let n1 = b.number().kron(&id);
        let n3 = id.kron(&b.number());
        let kinetic = &(&(&b.number_squared().kron(&id) + &id.kron(&b.number_squared())) * m_diag)
            + &(&(&n1 * &n3) * (2.0 * m_off));
        let josephson = &b.cos_phi().kron(&id) + &id.kron(&b.cos_phi());
        let static_part = &(&kinetic * (4.0 * ec)) - &(&josephson * params.ej_ghz);
        let lower = b.exp_i_phi().adjoint();
        Ok(Self {
            params: *params,
            ncut,
            static_part,
            loop_shift: lower.kron(&lower),
        })
    }

    pub fn ncut(&self) -> usize {
        self.ncut
    }

    fn loop_phase(&self, f: f64) -> Operator {
        self.loop_shift.scale(C64::from_polar(1.0, 2.0 * PI * f))
    }

    /// sin(2πf − φ₁ − φ₃).
    fn loop_sine(&self, f: f64) -> Operator {
        let e = self.loop_phase(f);
        (&e - &e.adjoint()).scale(C64::new(0.0, -0.5))
    }

    /// Loop current operator Î_q in nA.
    pub fn current_operator(&self, f: f64) -> Operator {
        self.loop_sine(f).scale_real(self.params.small_junction_ic_na())
    }

    /// ½·L_eff·(αI_C)² in GHz.
    pub fn coupler_correction_ghz(&self) -> f64 {
        0.5 * inductance_current_sq_ghz(self.params.l_eff_nh(), self.params.small_junction_ic_na())
    }

    pub fn hamiltonian(&self, f: f64) -> Result<Operator> {
        validate_flux(f)?;
        let e = self.loop_phase(f);
        let cos_loop = (&e + &e.adjoint()).scale_real(0.5);
        let sine = self.loop_sine(f);
        let h = &(&self.static_part - &(&cos_loop * (self.params.alpha * self.params.ej_ghz)))
            - &(&(&sine * &sine) * self.coupler_correction_ghz());
        h.check_hermitian(1e-12)?;
        Ok(h)
    }

    /// Two lowest levels and the current matrix elements between them.
    pub fn two_level(&self, f: f64) -> Result<TwoLevel> {
        let h = self.hamiltonian(f)?;
        let sys = eigs_hermitian_with(&h, 2, &EigenOptions::default())
            .map_err(|e| Error::AtFlux { flux: f, source: Box::new(e) })?;
        let i = self.current_operator(f);
        let (v0, v1) = (&sys.vectors[0], &sys.vectors[1]);
        Ok(TwoLevel {
            e0: sys.values[0],
            e1: sys.values[1],
            i00: i.expectation(v0, v0).re,
            i11: i.expectation(v1, v1).re,
            i01: i.expectation(v0, v1).norm(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoLevel {
    pub e0: f64,
    pub e1: f64,
    /// ⟨0|Î_q|0⟩, nA.
    pub i00: f64,
    pub i11: f64,
    /// |⟨0|Î_q|1⟩|, nA.
    pub i01: f64,
}

impl TwoLevel {
    /// Current amplitude invariant under rotation of the two-level basis,
    /// √(|I₀₁|² + ((I₀₀ − I₁₁)/2)²); equals I_p for a two-level flux qubit
    /// at any bias.
    pub fn current_amplitude(&self) -> f64 {
        (self.i01.powi(2) + (0.5 * (self.i00 - self.i11)).powi(2)).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluxWindow {
    pub lo: f64,
    pub hi: f64,
}

impl FluxWindow {
    pub fn symmetric(half_width: f64) -> Self {
        Self {
            lo: 0.5 - half_width,
            hi: 0.5 + half_width,
        }
    }
}

impl Default for FluxWindow {
    fn default() -> Self {
        Self::symmetric(DEFAULT_WINDOW_HALF_WIDTH)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitEstimate {
    /// Gap at f = 0.5, GHz.
    pub delta_ghz: f64,
    /// From the hyperbola E₀₁² = Δ² + (2I_p·δΦ/h)² at the window edges, nA.
    pub ip_slope_na: f64,
    /// Rotation-invariant current amplitude at the window edges, nA.
    pub ip_matrix_element_na: f64,
    /// |⟨0|Î_q|1⟩| at f = 0.5, nA.
    pub ip_sweet_spot_na: f64,
    pub window: FluxWindow,
    pub csh_ff: f64,
    pub ncut: usize,
}

/// Gap and persistent current of the renormalized qubit.
pub fn qubit_gap_and_ip(params: &CircuitParams, ncut: usize, window: FluxWindow) -> Result<QubitEstimate> {
    if !(window.lo < 0.5 && window.hi > 0.5) {
        return Err(Error::Estimation(format!(
            "flux window [{}, {}] must bracket 0.5",
            window.lo, window.hi
        )));
    }
    validate_flux(window.lo)?;
    validate_flux(window.hi)?;
    let model = QubitModel::new(params, ncut)?;
    let sweet = model.two_level(0.5)?;
    let delta = sweet.e1 - sweet.e0;
    let mut slope = 0.0;
    let mut amp = 0.0;
    for edge in [window.lo, window.hi] {
        let tl = model.two_level(edge)?;
        let e01 = tl.e1 - tl.e0;
        if (e01 - delta) / delta < 1e-3 {
            return Err(Error::Estimation(format!(
                "flux window edge {edge} too close to the sweet spot: splitting {e01} GHz vs gap {delta} GHz"
            )));
        }
        let eps = (e01 * e01 - delta * delta).sqrt();
        slope += eps * GHZ * H / (2.0 * (edge - 0.5).abs() * PHI0) / NANO;
        amp += tl.current_amplitude();
    }
    Ok(QubitEstimate {
        delta_ghz: delta,
        ip_slope_na: slope / 2.0,
        ip_matrix_element_na: amp / 2.0,
        ip_sweet_spot_na: sweet.i01,
        window,
        csh_ff: params.csh_ff,
        ncut,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::params::ASSUMED_CSH_FF;

    #[test]
    fn design_gap_and_current() {
        let p = CircuitParams::design(ASSUMED_CSH_FF).unwrap();
        let q = qubit_gap_and_ip(&p, QUBIT_NCUT, FluxWindow::default()).unwrap();
        assert!((q.delta_ghz - 3.5358).abs() < 2e-3, "{}", q.delta_ghz);
        assert!((q.ip_slope_na - 80.5).abs() < 0.5, "{}", q.ip_slope_na);
    }

    #[test]
    fn window_must_bracket_and_resolve() {
        let p = CircuitParams::design(ASSUMED_CSH_FF).unwrap();
        assert!(matches!(
            qubit_gap_and_ip(&p, QUBIT_NCUT, FluxWindow { lo: 0.51, hi: 0.52 }),
            Err(Error::Estimation(_))
        ));
        assert!(matches!(
            qubit_gap_and_ip(&p, QUBIT_NCUT, FluxWindow::symmetric(1e-6)),
            Err(Error::Estimation(_))
        ));
    }

    #[test]
    fn current_operator_is_hermitian() {
        let p = CircuitParams::design(ASSUMED_CSH_FF).unwrap();
        let m = QubitModel::new(&p, 5).unwrap();
        for f in [0.3, 0.5, 0.77] {
            assert!(m.current_operator(f).hermiticity_deviation() < 1e-12);
        }
    }
}
