//! Two-level qubit coupled to a single resonator mode.
//!
//! Basis ordering is qubit ⊗ Fock with the qubit index first; σ_z = diag(1, −1).
//! Quantum Rabi model, persistent-current basis:
//!   H = −(ε σ_z + Δ σ_x)/2 + ω_r(a†a + ½) + g σ_z (a + a†)
//! Jaynes-Cummings model, qubit eigenbasis:
//!   H = (ω_q/2) σ_z + ω_r(a†a + ½) − g sinθ (σ₊a + σ₋a†),  θ = atan2(Δ, ε)

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::constants::{GHZ, H, NANO, PHI0};
use crate::error::{Error, Result};
use crate::quantum::eigen::dense_symmetric_eigen;
use crate::quantum::operator::Operator;
use crate::transition::TransitionLabel;

pub const DEFAULT_NFOCK: usize = 40;
/// Largest Fock cutoff tried by the convergence doubling.
pub const MAX_NFOCK: usize = 640;
/// Convergence threshold on every labeled transition, GHz.
pub const CONVERGENCE_TOL_GHZ: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QRMParams {
    /// Qubit gap Δ/h, GHz.
    pub delta_ghz: f64,
    /// Persistent current, nA.
    pub ip_na: f64,
    /// Resonator frequency ω_r/2π, GHz.
    pub omega_r_ghz: f64,
    /// Coupling g/2π, GHz.
    pub g_ghz: f64,
    pub nfock: usize,
}

impl QRMParams {
    pub fn new(delta_ghz: f64, ip_na: f64, omega_r_ghz: f64, g_ghz: f64) -> Result<Self> {
        let p = Self {
            delta_ghz,
            ip_na,
            omega_r_ghz,
            g_ghz,
            nfock: DEFAULT_NFOCK,
        };
        p.validate()?;
        Ok(p)
    }

    /// Fitted device values: Δ = 5.707 GHz, I_p = 11.619 nA,
    /// ω_r = 4.463 GHz, g = 0.578 GHz.
    pub fn device_fit() -> Self {
        Self {
            delta_ghz: 5.707,
            ip_na: 11.619,
            omega_r_ghz: 4.463,
            g_ghz: 0.578,
            nfock: DEFAULT_NFOCK,
        }
    }

    pub fn with_nfock(mut self, nfock: usize) -> Self {
        self.nfock = nfock;
        self
    }

    /// Zero is accepted for I_p and g (decoupled or flux-insensitive limits).
    pub fn validate(&self) -> Result<()> {
        for (name, v, strict) in [
            ("Delta_GHz", self.delta_ghz, true),
            ("Ip_nA", self.ip_na, false),
            ("omega_r_GHz", self.omega_r_ghz, true),
            ("g_GHz", self.g_ghz, false),
        ] {
            let ok = v.is_finite() && if strict { v > 0.0 } else { v >= 0.0 };
            if !ok {
                return Err(Error::param(name, format!("must be {} and finite, got {v}", if strict { "positive" } else { "non-negative" })));
            }
        }
        if self.nfock < 4 {
            return Err(Error::param("nfock", format!("must be at least 4, got {}", self.nfock)));
        }
        Ok(())
    }

    /// ω_q = √(ε² + Δ²), GHz.
    pub fn qubit_frequency(&self, phi_ext: f64) -> f64 {
        epsilon(self.ip_na, phi_ext).hypot(self.delta_ghz)
    }
}

/// Magnetic energy ε/h = 2 I_p (Φ_ext − Φ₀/2)/h in GHz, flux as a fraction of Φ₀.
pub fn epsilon(ip_na: f64, phi_ext: f64) -> f64 {
    2.0 * ip_na * NANO * (phi_ext - 0.5) * PHI0 / H / GHZ
}

/// dε/dI_p in GHz per nA.
pub fn epsilon_per_ip(phi_ext: f64) -> f64 {
    epsilon(1.0, phi_ext)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Model {
    Rabi,
    JaynesCummings,
}

fn idx(q: usize, n: usize, nfock: usize) -> usize {
    q * nfock + n
}

/// Real-symmetric matrix of either model.
pub fn model_matrix(p: &QRMParams, phi_ext: f64, model: Model) -> DMatrix<f64> {
    let nf = p.nfock;
    let mut m = DMatrix::<f64>::zeros(2 * nf, 2 * nf);
    let eps = epsilon(p.ip_na, phi_ext);
    for n in 0..nf {
        let osc = p.omega_r_ghz * (n as f64 + 0.5);
        m[(idx(0, n, nf), idx(0, n, nf))] = osc;
        m[(idx(1, n, nf), idx(1, n, nf))] = osc;
    }
    match model {
        Model::Rabi => {
            for n in 0..nf {
                m[(idx(0, n, nf), idx(0, n, nf))] -= 0.5 * eps;
                m[(idx(1, n, nf), idx(1, n, nf))] += 0.5 * eps;
                m[(idx(0, n, nf), idx(1, n, nf))] = -0.5 * p.delta_ghz;
                m[(idx(1, n, nf), idx(0, n, nf))] = -0.5 * p.delta_ghz;
                if n + 1 < nf {
                    let c = p.g_ghz * ((n + 1) as f64).sqrt();
                    for (q, s) in [(0, 1.0), (1, -1.0)] {
                        m[(idx(q, n, nf), idx(q, n + 1, nf))] = s * c;
                        m[(idx(q, n + 1, nf), idx(q, n, nf))] = s * c;
                    }
                }
            }
        }
        Model::JaynesCummings => {
            let wq = p.qubit_frequency(phi_ext);
            let theta = p.delta_ghz.atan2(eps);
            let c0 = -p.g_ghz * theta.sin();
            for n in 0..nf {
                m[(idx(0, n, nf), idx(0, n, nf))] += 0.5 * wq;
                m[(idx(1, n, nf), idx(1, n, nf))] -= 0.5 * wq;
                // σ₊a: |↓, n+1⟩ → |↑, n⟩
                if n + 1 < nf {
                    let c = c0 * ((n + 1) as f64).sqrt();
                    m[(idx(0, n, nf), idx(1, n + 1, nf))] = c;
                    m[(idx(1, n + 1, nf), idx(0, n, nf))] = c;
                }
            }
        }
    }
    m
}

pub fn qrm_hamiltonian(p: &QRMParams, phi_ext: f64) -> Result<Operator> {
    p.validate()?;
    Ok(Operator::from_real_dense(&model_matrix(p, phi_ext, Model::Rabi)))
}

pub fn jc_hamiltonian(p: &QRMParams, phi_ext: f64) -> Result<Operator> {
    p.validate()?;
    Ok(Operator::from_real_dense(&model_matrix(p, phi_ext, Model::JaynesCummings)))
}

/// σ₊σ₋ + a†a on the same space.
pub fn excitation_number(nfock: usize) -> Operator {
    let d: Vec<f64> = (0..2 * nfock)
        .map(|i| {
            let (q, n) = (i / nfock, i % nfock);
            n as f64 + if q == 0 { 1.0 } else { 0.0 }
        })
        .collect();
    Operator::diagonal(&d)
}

/// All levels at the fixed cutoff `p.nfock`, ascending.
pub fn levels(p: &QRMParams, phi_ext: f64, model: Model) -> Vec<f64> {
    dense_symmetric_eigen(model_matrix(p, phi_ext, model)).0
}

/// Lowest four levels of the Rabi model and their derivatives with respect
/// to (ω_r, Δ, I_p, g), by Hellmann-Feynman.
pub fn rabi_levels_with_gradients(p: &QRMParams, phi_ext: f64) -> ([f64; 4], [[f64; 4]; 4]) {
    let nf = p.nfock;
    let (vals, vecs) = dense_symmetric_eigen(model_matrix(p, phi_ext, Model::Rabi));
    let de_dip = epsilon_per_ip(phi_ext);
    let mut e = [0.0; 4];
    let mut grad = [[0.0; 4]; 4];
    for lvl in 0..4 {
        e[lvl] = vals[lvl];
        let v = vecs.column(lvl);
        let (mut d_wr, mut d_delta, mut d_ip, mut d_g) = (0.0, 0.0, 0.0, 0.0);
        for n in 0..nf {
            let (u, d) = (v[idx(0, n, nf)], v[idx(1, n, nf)]);
            d_wr += (u * u + d * d) * (n as f64 + 0.5);
            // −σ_x/2
            d_delta -= u * d;
            // −σ_z/2 · dε/dI_p
            d_ip -= 0.5 * (u * u - d * d) * de_dip;
            if n + 1 < nf {
                let s = ((n + 1) as f64).sqrt();
                let (u1, d1) = (v[idx(0, n + 1, nf)], v[idx(1, n + 1, nf)]);
                d_g += 2.0 * s * (u * u1 - d * d1);
            }
        }
        grad[lvl] = [d_wr, d_delta, d_ip, d_g];
    }
    (e, grad)
}

/// Labeled transitions at the fixed cutoff `p.nfock`.
pub fn transitions_fixed(p: &QRMParams, phi_ext: f64, model: Model) -> [f64; 5] {
    let e = levels(p, phi_ext, model);
    let mut out = [0.0; 5];
    for (o, l) in out.iter_mut().zip(TransitionLabel::ALL) {
        *o = l.from_levels(&e);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergedTransitions {
    /// Ordered as [`TransitionLabel::ALL`].
    pub values: [f64; 5],
    pub nfock: usize,
    /// Largest change of any transition in the last doubling, GHz.
    pub last_change: f64,
}

impl ConvergedTransitions {
    pub fn get(&self, label: TransitionLabel) -> f64 {
        let i = TransitionLabel::ALL.iter().position(|&l| l == label).unwrap();
        self.values[i]
    }
}

/// Transitions with the Fock cutoff doubled from `p.nfock` until every one
/// moves by less than [`CONVERGENCE_TOL_GHZ`].
pub fn transitions(p: &QRMParams, phi_ext: f64, model: Model) -> Result<ConvergedTransitions> {
    p.validate()?;
    let mut nf = p.nfock;
    let mut prev = transitions_fixed(p, phi_ext, model);
    loop {
        let next_nf = 2 * nf;
        if next_nf > MAX_NFOCK {
            return Err(Error::Unconverged(format!(
                "Fock cutoff {nf} reached without transitions settling below {CONVERGENCE_TOL_GHZ} GHz"
            )));
        }
        let cur = transitions_fixed(&p.with_nfock(next_nf), phi_ext, model);
        let change = prev
            .iter()
            .zip(&cur)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if change < CONVERGENCE_TOL_GHZ {
            return Ok(ConvergedTransitions {
                values: cur,
                nfock: next_nf,
                last_change: change,
            });
        }
        prev = cur;
        nf = next_nf;
    }
}

/// g²/(ω_r + ω_q), GHz.
pub fn bs_shift_analytic(p: &QRMParams, phi_ext: f64) -> f64 {
    p.g_ghz * p.g_ghz / (p.omega_r_ghz + p.qubit_frequency(phi_ext))
}

/// Coupling that produces `shift_ghz` through g²/(ω_r + ω_q).
pub fn coupling_from_bs_shift(shift_ghz: f64, omega_r_ghz: f64, omega_q_ghz: f64) -> f64 {
    (shift_ghz * (omega_r_ghz + omega_q_ghz)).sqrt()
}

/// ω(Rabi) − ω(Jaynes-Cummings) for one labeled transition, GHz.
pub fn bs_shift_numeric(p: &QRMParams, phi_ext: f64, label: TransitionLabel) -> Result<f64> {
    if p.g_ghz == 0.0 {
        p.validate()?;
        return Ok(0.0);
    }
    let qrm = transitions(p, phi_ext, Model::Rabi)?;
    let jc = transitions(p, phi_ext, Model::JaynesCummings)?;
    Ok(qrm.get(label) - jc.get(label))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_sweet_spot_and_value() {
        assert_eq!(epsilon(11.619, 0.5), 0.0);
        let e = epsilon(11.619, 0.51);
        assert!((e - 0.7252).abs() < 1e-4, "{e}");
        assert!((epsilon(11.619, 0.53) + epsilon(11.619, 0.47)).abs() < 1e-15);
    }

    #[test]
    fn decoupled_rabi_levels() {
        let p = QRMParams::new(5.0, 10.0, 4.0, 0.0).unwrap().with_nfock(8);
        let mut want: Vec<f64> = (0..8)
            .flat_map(|n| [-2.5, 2.5].map(|q| q + 4.0 * (n as f64 + 0.5)))
            .collect();
        want.sort_by(f64::total_cmp);
        let got = levels(&p, 0.5, Model::Rabi);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12);
        }
        let jc = levels(&p, 0.5, Model::JaynesCummings);
        for (g, w) in jc.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn resonant_jc_vacuum_rabi_splitting() {
        let p = QRMParams::new(5.0, 1.0, 5.0, 0.1).unwrap().with_nfock(10);
        let e = levels(&p, 0.5, Model::JaynesCummings);
        assert!(((e[2] - e[1]) - 0.2).abs() < 1e-12, "{}", e[2] - e[1]);
    }

    #[test]
    fn jc_conserves_excitations() {
        let p = QRMParams::device_fit().with_nfock(12);
        let h = jc_hamiltonian(&p, 0.503).unwrap();
        let n = excitation_number(12);
        let comm = &(&h * &n) - &(&n * &h);
        assert!(comm.max_abs() < 1e-12);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let p = QRMParams::device_fit().with_nfock(24);
        let f = 0.502;
        let (_, grad) = rabi_levels_with_gradients(&p, f);
        let h = 1e-6;
        for k in 0..4 {
            let mut a = p;
            let mut b = p;
            match k {
                0 => { a.omega_r_ghz += h; b.omega_r_ghz -= h; }
                1 => { a.delta_ghz += h; b.delta_ghz -= h; }
                2 => { a.ip_na += h; b.ip_na -= h; }
                _ => { a.g_ghz += h; b.g_ghz -= h; }
            }
            let (ea, _) = rabi_levels_with_gradients(&a, f);
            let (eb, _) = rabi_levels_with_gradients(&b, f);
            for lvl in 0..4 {
                let fd = (ea[lvl] - eb[lvl]) / (2.0 * h);
                assert!((fd - grad[lvl][k]).abs() < 1e-6, "param {k} level {lvl}: {fd} vs {}", grad[lvl][k]);
            }
        }
    }

    #[test]
    fn bloch_siegert_basics() {
        let mut p = QRMParams::device_fit();
        let a = bs_shift_analytic(&p, 0.5);
        p.g_ghz *= 2.0;
        assert!((bs_shift_analytic(&p, 0.5) - 4.0 * a).abs() < 1e-14);
        p.g_ghz = 0.0;
        assert_eq!(bs_shift_analytic(&p, 0.5), 0.0);
        assert_eq!(bs_shift_numeric(&p, 0.5, TransitionLabel::W01).unwrap(), 0.0);
        assert!((coupling_from_bs_shift(0.023, 4.463, 5.707) - 0.48364).abs() < 1e-4);
    }
}
