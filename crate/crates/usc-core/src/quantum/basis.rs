//! Charge-basis and harmonic-oscillator-basis operators.
//!
//! Charge states run over n ∈ [−ncut, ncut] in ascending order. The unit
//! charge shift `e^{iφ}` maps |n⟩ → |n+1⟩ and is truncated at the top row, so
//! identities such as cos²φ + sin²φ = 1 hold only on the interior block.
//!
//! Oscillator quadratures are dimensionless phase and Cooper-pair number,
//! φ̂ = φ_zpf(â + â†) and n̂ = i n_zpf(â† − â) with φ_zpf·n_zpf = ½, so
//! [φ̂, n̂] = i on the untruncated space.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::operator::Operator;
use crate::constants::{E_CHARGE, H};
use crate::error::{Error, Result};

/// Superconducting resistance quantum h/4e², Ω.
pub const RESISTANCE_QUANTUM: f64 = H / (4.0 * E_CHARGE * E_CHARGE);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChargeBasis {
    pub ncut: usize,
}

impl ChargeBasis {
    pub fn new(ncut: usize) -> Result<Self> {
        if ncut < 1 {
            return Err(Error::InvalidBasis(format!(
                "charge cutoff must be at least 1, got {ncut}"
            )));
        }
        Ok(Self { ncut })
    }

    pub fn dim(&self) -> usize {
        2 * self.ncut + 1
    }

    pub fn number(&self) -> Operator {
        let n = self.ncut as f64;
        Operator::diagonal(&(0..self.dim()).map(|i| i as f64 - n).collect::<Vec<_>>())
    }

    pub fn number_squared(&self) -> Operator {
        let n = self.ncut as f64;
        Operator::diagonal(&(0..self.dim()).map(|i| (i as f64 - n).powi(2)).collect::<Vec<_>>())
    }

    /// `e^{iφ}`: raises the charge by one.
    pub fn exp_i_phi(&self) -> Operator {
        let d = self.dim();
        let trip = (0..d - 1).map(|i| (i + 1, i, C64::new(1.0, 0.0))).collect();
        Operator::from_triplets(d, trip)
    }

    pub fn cos_phi(&self) -> Operator {
        let s = self.exp_i_phi();
        (&s + &s.adjoint()).scale_real(0.5)
    }

    pub fn sin_phi(&self) -> Operator {
        let s = self.exp_i_phi();
        (&s - &s.adjoint()).scale(C64::new(0.0, -0.5))
    }
}

pub fn charge_number(ncut: usize) -> Result<Operator> {
    Ok(ChargeBasis::new(ncut)?.number())
}

pub fn cos_phi(ncut: usize) -> Result<Operator> {
    Ok(ChargeBasis::new(ncut)?.cos_phi())
}

pub fn sin_phi(ncut: usize) -> Result<Operator> {
    Ok(ChargeBasis::new(ncut)?.sin_phi())
}

/// Truncated Fock space of one harmonic mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillatorBasis {
    pub nlevels: usize,
    /// Mode frequency ω/2π, GHz.
    pub frequency: f64,
    /// Characteristic impedance √(L/C), Ω.
    pub impedance: f64,
}

impl OscillatorBasis {
    pub fn new(nlevels: usize, frequency: f64, impedance: f64) -> Result<Self> {
        if nlevels < 2 {
            return Err(Error::InvalidBasis(format!(
                "oscillator needs at least 2 levels, got {nlevels}"
            )));
        }
        if !(frequency > 0.0 && frequency.is_finite()) {
            return Err(Error::InvalidBasis(format!("oscillator frequency {frequency} GHz")));
        }
        if !(impedance > 0.0 && impedance.is_finite()) {
            return Err(Error::InvalidBasis(format!("oscillator impedance {impedance} Ω")));
        }
        Ok(Self {
            nlevels,
            frequency,
            impedance,
        })
    }

    /// Oscillator whose kinetic term is 4E_C n̂² and potential E_L φ̂²/2
    /// (both GHz).
    pub fn from_energies(nlevels: usize, ec_ghz: f64, el_ghz: f64) -> Result<Self> {
        let frequency = (8.0 * ec_ghz * el_ghz).sqrt();
        let phase_zpf_sq = (2.0 * ec_ghz / el_ghz).sqrt();
        Self::new(nlevels, frequency, phase_zpf_sq * RESISTANCE_QUANTUM / PI)
    }

    pub fn dim(&self) -> usize {
        self.nlevels
    }

    /// Zero-point phase amplitude, √(πZ/R_Q).
    pub fn phase_zpf(&self) -> f64 {
        (PI * self.impedance / RESISTANCE_QUANTUM).sqrt()
    }

    /// Zero-point Cooper-pair-number amplitude, 1/(2φ_zpf).
    pub fn charge_zpf(&self) -> f64 {
        0.5 / self.phase_zpf()
    }

    pub fn annihilation(&self) -> Operator {
        let trip = (1..self.nlevels)
            .map(|n| (n - 1, n, C64::new((n as f64).sqrt(), 0.0)))
            .collect();
        Operator::from_triplets(self.nlevels, trip)
    }

    pub fn number(&self) -> Operator {
        Operator::diagonal(&(0..self.nlevels).map(|n| n as f64).collect::<Vec<_>>())
    }

    pub fn phase(&self) -> Operator {
        let a = self.annihilation();
        (&a + &a.adjoint()).scale_real(self.phase_zpf())
    }

    pub fn charge(&self) -> Operator {
        let a = self.annihilation();
        (&a.adjoint() - &a).scale(C64::new(0.0, self.charge_zpf()))
    }

    /// Projection of (â ± â†)² onto the truncated space, from
    /// (â ± â†)² = â² + â†² ± (2â†â + 1).
    fn quadrature_squared(&self, sign: f64) -> Operator {
        let n = self.nlevels;
        let mut trip = Vec::new();
        for k in 0..n {
            trip.push((k, k, C64::new(sign * (2.0 * k as f64 + 1.0), 0.0)));
            if k + 2 < n {
                let v = ((k + 1) as f64 * (k + 2) as f64).sqrt();
                trip.push((k, k + 2, C64::new(v, 0.0)));
                trip.push((k + 2, k, C64::new(v, 0.0)));
            }
        }
        Operator::from_triplets(n, trip)
    }

    /// φ̂² with no truncation error in the retained block.
    pub fn phase_squared(&self) -> Operator {
        self.quadrature_squared(1.0).scale_real(self.phase_zpf().powi(2))
    }

    /// n̂² with no truncation error in the retained block.
    pub fn charge_squared(&self) -> Operator {
        // −(â† − â)² = −â² − â†² + 2â†â + 1
        self.quadrature_squared(-1.0)
            .scale_real(-self.charge_zpf().powi(2))
    }

    /// `exp(iθφ̂)` from the closed-form displacement-operator matrix elements,
    /// exact within the retained block.
    pub fn exp_i_phase(&self, theta: f64) -> Operator {
        displacement(self.nlevels, C64::new(0.0, theta * self.phase_zpf()))
    }
}

/// Annihilation and creation operators of `basis`.
pub fn osc_ladder(basis: &OscillatorBasis) -> (Operator, Operator) {
    let a = basis.annihilation();
    let ad = a.adjoint();
    (a, ad)
}

/// Generalized Laguerre polynomials L_0^(α)(x) … L_nmax^(α)(x).
fn laguerre_all(nmax: usize, alpha: f64, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(1.0);
    if nmax >= 1 {
        out.push(1.0 + alpha - x);
    }
    for k in 1..nmax {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * out[k] - (kf + alpha) * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

/// Displacement operator D(β) = exp(β↠− β*â) on `nlevels` Fock states:
/// ⟨m|D|n⟩ = √(n!/m!) β^{m−n} e^{−|β|²/2} L_n^{(m−n)}(|β|²) for m ≥ n.
pub fn displacement(nlevels: usize, beta: C64) -> Operator {
    let x = beta.norm_sqr();
    let gauss = (-0.5 * x).exp();
    let mut trip = Vec::with_capacity(nlevels * nlevels);
    for k in 0..nlevels {
        // Every (m, n) with |m − n| = k shares the Laguerre order k.
        let lag = laguerre_all(nlevels - 1 - k, k as f64, x);
        let mut bpow = C64::new(1.0, 0.0);
        let mut mbconj_pow = C64::new(1.0, 0.0);
        for _ in 0..k {
            bpow *= beta;
            mbconj_pow *= -beta.conj();
        }
        for n in 0..nlevels - k {
            let m = n + k;
            // √(n!/m!) = 1/√((n+1)…m)
            let ratio: f64 = ((n + 1)..=m).map(|j| j as f64).product::<f64>().sqrt().recip();
            let base = ratio * gauss * lag[n];
            trip.push((m, n, bpow * base));
            if k > 0 {
                trip.push((n, m, mbconj_pow * base));
            }
        }
    }
    Operator::from_triplets(nlevels, trip)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, SymmetricEigen};

    #[test]
    fn charge_number_definition() {
        let n1 = charge_number(1).unwrap();
        let d: Vec<f64> = (0..3).map(|i| n1.get(i, i).re).collect();
        assert_eq!(d, vec![-1.0, 0.0, 1.0]);
        let n2 = charge_number(2).unwrap();
        let d: Vec<f64> = (0..5).map(|i| n2.get(i, i).re).collect();
        assert_eq!(d, vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert_eq!(n2.nnz(), 4);
        for n in 1..12 {
            assert_eq!(charge_number(n).unwrap().trace(), C64::new(0.0, 0.0));
        }
        assert!(matches!(charge_number(0), Err(Error::InvalidBasis(_))));
    }

    #[test]
    fn cos_phi_off_diagonals() {
        let c = cos_phi(1).unwrap().to_dense();
        for i in 0..3usize {
            for j in 0..3 {
                let e = if i.abs_diff(j) == 1 { 0.5 } else { 0.0 };
                assert_eq!(c[(i, j)], C64::new(e, 0.0));
            }
        }
    }

    #[test]
    fn trig_identity_on_interior_block() {
        let ncut = 6;
        let c = cos_phi(ncut).unwrap();
        let s = sin_phi(ncut).unwrap();
        assert!(c.hermiticity_deviation() < 1e-15);
        assert!(s.hermiticity_deviation() < 1e-15);
        let id = (&(&c * &c) + &(&s * &s)).to_dense();
        let d = 2 * ncut + 1;
        for i in 1..d - 1 {
            for j in 1..d - 1 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)] - C64::new(e, 0.0)).norm() < 1e-14, "({i},{j})");
            }
        }
    }

    #[test]
    fn cos_phi_spectrum_bounded() {
        // dense diagonalization oracle
        let c = cos_phi(40).unwrap().to_dense().map(|z| z.re);
        let eig = SymmetricEigen::new(c);
        for &v in eig.eigenvalues.iter() {
            assert!(v >= -1.0 - 1e-12 && v <= 1.0 + 1e-12, "{v}");
        }
    }

    #[test]
    fn ladder_algebra() {
        let b = OscillatorBasis::new(3, 5.0, 50.0).unwrap();
        let (a, ad) = osc_ladder(&b);
        let num = &ad * &a;
        for i in 0..3 {
            assert!((num.get(i, i).re - i as f64).abs() < 1e-14);
        }
        let b = OscillatorBasis::new(8, 5.0, 50.0).unwrap();
        let (a, ad) = osc_ladder(&b);
        let comm = (&(&a * &ad) - &(&ad * &a)).to_dense();
        for i in 0..7 {
            for j in 0..7 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((comm[(i, j)].re - e).abs() < 1e-13);
            }
        }
        // top row is where truncation bites
        assert!((comm[(7, 7)].re - 1.0).abs() > 1.0);
    }

    #[test]
    fn zero_point_amplitude_scales_as_sqrt_impedance() {
        let b1 = OscillatorBasis::new(4, 5.0, 50.0).unwrap();
        let b4 = OscillatorBasis::new(4, 5.0, 200.0).unwrap();
        assert!((b4.phase_zpf() / b1.phase_zpf() - 2.0).abs() < 1e-14);
        assert!((b1.phase_zpf() * b1.charge_zpf() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn from_energies_matches_lc_formula() {
        let b = OscillatorBasis::from_energies(4, 2.0, 25.0).unwrap();
        assert!((b.frequency - 20.0).abs() < 1e-12);
        // φ_zpf⁴ = 2E_C/E_L
        assert!((b.phase_zpf().powi(4) - 2.0 * 2.0 / 25.0).abs() < 1e-15);
    }

    #[test]
    fn squared_quadratures_match_long_products() {
        let b = OscillatorBasis::new(6, 5.0, 300.0).unwrap();
        let big = OscillatorBasis::new(9, 5.0, 300.0).unwrap();
        let p2 = (&big.phase() * &big.phase()).to_dense();
        let q2 = (&big.charge() * &big.charge()).to_dense();
        let p2e = b.phase_squared().to_dense();
        let q2e = b.charge_squared().to_dense();
        for i in 0..6 {
            for j in 0..6 {
                assert!((p2[(i, j)] - p2e[(i, j)]).norm() < 1e-12);
                assert!((q2[(i, j)] - q2e[(i, j)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn displacement_matches_spectral_exponential() {
        // oracle: exp(iθX) through the eigen-decomposition of a much larger
        // truncated position matrix, compared on a small leading block
        let big = 90;
        let theta = 0.83;
        let mut x = DMatrix::<f64>::zeros(big, big);
        for n in 1..big {
            let v = (n as f64).sqrt();
            x[(n - 1, n)] = v;
            x[(n, n - 1)] = v;
        }
        let eig = SymmetricEigen::new(x);
        let v = eig.eigenvectors.map(|r| C64::new(r, 0.0));
        let phases = DMatrix::from_diagonal(
            &eig.eigenvalues.map(|l| C64::new(0.0, theta * l).exp()),
        );
        let oracle = &v * phases * v.adjoint();
        let d = displacement(12, C64::new(0.0, theta)).to_dense();
        for i in 0..12 {
            for j in 0..12 {
                assert!((d[(i, j)] - oracle[(i, j)]).norm() < 1e-10, "({i},{j})");
            }
        }
    }

    #[test]
    fn displacement_is_unitary_in_large_basis() {
        let d = displacement(60, C64::new(0.3, -0.2)).to_dense();
        let id = d.adjoint() * &d;
        for i in 0..10 {
            for j in 0..10 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)] - C64::new(e, 0.0)).norm() < 1e-12);
            }
        }
    }
}
