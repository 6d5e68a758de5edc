//! Four-mode circuit Hamiltonian, modes ordered (1, 3, 4, 6).
//!
//! H/h = 4E_C[(n₁+n₄)² + (n₃+n₄)² + n₄²/α̃] + 4E_C,R·n₆²
//!       − E_J cos φ₁ − E_J cos φ₃ − αE_J cos(φ₄ − φ₁ − φ₃ + 2πf)
//!       + E_L,c·φ₄²/2 + E_L,R·(φ₆ + φ₄)²/2
//!
//! Modes 1 and 3 live in charge bases. Mode 4 uses the oscillator defined by
//! its own diagonal terms, 4E_C(2 + 1/α̃)·n₄² and (E_L,c + E_L,R)·φ₄²/2; mode 6
//! uses the resonator seen through the coupler, L_R + L_c with C_R.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::params::{CircuitParams, TruncationSpec};
use crate::constants::{charging_energy_ghz, inductive_energy_ghz};
use crate::error::{Error, Result};
use crate::quantum::basis::{ChargeBasis, OscillatorBasis};
use crate::quantum::eigen::HERMITIAN_TOL;
use crate::quantum::operator::{tensor_embed_capped, total_dim, Operator, DEFAULT_DIM_CAP};

/// Flux-independent part plus the junction-loop operator, so a sweep only
/// rescales one term per flux point.
#[derive(Clone, Debug)]
pub struct FullModel {
    params: CircuitParams,
    trunc: TruncationSpec,
    static_part: Operator,
    /// e^{−iφ₁} e^{−iφ₃} e^{iφ₄}, the loop term without its flux phase.
    loop_shift: Operator,
    loop_shift_adj: Operator,
    mode4: OscillatorBasis,
    mode6: OscillatorBasis,
}

pub fn validate_flux(f: f64) -> Result<()> {
    if (0.0..=1.0).contains(&f) {
        Ok(())
    } else {
        Err(Error::param("flux", format!("must lie in [0, 1], got {f}")))
    }
}

impl FullModel {
    pub fn new(params: &CircuitParams, trunc: &TruncationSpec) -> Result<Self> {
        Self::with_cap(params, trunc, DEFAULT_DIM_CAP)
    }

    pub fn with_cap(params: &CircuitParams, trunc: &TruncationSpec, cap: usize) -> Result<Self> {
        params.validate()?;
        trunc.validate()?;
        let dim = total_dim([
            2 * trunc.ncut1 + 1,
            2 * trunc.ncut3 + 1,
            trunc.n4,
            trunc.n6,
        ])?;
        if dim > cap {
            return Err(Error::TruncationTooLarge { dim, cap });
        }

        let ec = params.ec_ghz();
        let at = params.alpha_tilde();
        let el_c = inductive_energy_ghz(params.lc_nh);
        let el_r = inductive_energy_ghz(params.lr_nh);
        let ec4 = ec * (2.0 + 1.0 / at);
        let mode4 = OscillatorBasis::from_energies(trunc.n4, ec4, el_c + el_r)?;
        let mode6 = OscillatorBasis::from_energies(
            trunc.n6,
            charging_energy_ghz(params.cr_ff),
            inductive_energy_ghz(params.lr_nh + params.lc_nh),
        )?;

        let b1 = ChargeBasis::new(trunc.ncut1)?;
        let b3 = ChargeBasis::new(trunc.ncut3)?;
        let (i1, i3) = (Operator::identity(b1.dim()), Operator::identity(b3.dim()));
        let (i4, i6) = (Operator::identity(trunc.n4), Operator::identity(trunc.n6));

        // Junction-pair block acting on modes (1, 3).
        let n1 = b1.number().kron(&i3);
        let n3 = i1.kron(&b3.number());
        let pair = &(&(&b1.number_squared().kron(&i3) + &i1.kron(&b3.number_squared())) * (4.0 * ec))
            - &(&(&b1.cos_phi().kron(&i3) + &i1.kron(&b3.cos_phi())) * params.ej_ghz);
        let n_sum = &n1 + &n3;

        let q4 = mode4.charge();
        let phi4 = mode4.phase();
        let local4 = &(&mode4.charge_squared() * (4.0 * ec4)) + &(&mode4.phase_squared() * (0.5 * (el_c + el_r)));
        let local6 = &(&mode6.charge_squared() * (4.0 * charging_energy_ghz(params.cr_ff)))
            + &(&mode6.phase_squared() * (0.5 * el_r));

        let mut h = tensor_embed_capped(&[&pair, &i4, &i6], cap)?;
        h = h.add_scaled(
            &tensor_embed_capped(&[&n_sum, &q4, &i6], cap)?,
            C64::new(8.0 * ec, 0.0),
        );
        h = h.add_scaled(&tensor_embed_capped(&[&i1, &i3, &local4, &i6], cap)?, C64::new(1.0, 0.0));
        h = h.add_scaled(&tensor_embed_capped(&[&i1, &i3, &i4, &local6], cap)?, C64::new(1.0, 0.0));
        h = h.add_scaled(
            &tensor_embed_capped(&[&i1, &i3, &phi4, &mode6.phase()], cap)?,
            C64::new(el_r, 0.0),
        );

        let loop_shift = tensor_embed_capped(
            &[
                &b1.exp_i_phi().adjoint(),
                &b3.exp_i_phi().adjoint(),
                &mode4.exp_i_phase(1.0),
                &i6,
            ],
            cap,
        )?;
        let loop_shift_adj = loop_shift.adjoint();
        Ok(Self {
            params: *params,
            trunc: *trunc,
            static_part: h,
            loop_shift,
            loop_shift_adj,
            mode4,
            mode6,
        })
    }

    pub fn params(&self) -> &CircuitParams {
        &self.params
    }

    pub fn truncation(&self) -> &TruncationSpec {
        &self.trunc
    }

    pub fn dim(&self) -> usize {
        self.static_part.dim()
    }

    pub fn coupler_basis(&self) -> &OscillatorBasis {
        &self.mode4
    }

    pub fn resonator_basis(&self) -> &OscillatorBasis {
        &self.mode6
    }

    /// Hamiltonian (GHz) at reduced flux `f`, hermiticity asserted.
    pub fn hamiltonian(&self, f: f64) -> Result<Operator> {
        validate_flux(f)?;
        let amp = -0.5 * self.params.alpha * self.params.ej_ghz;
        let phase = C64::from_polar(1.0, 2.0 * PI * f);
        let h = self
            .static_part
            .add_scaled(&self.loop_shift, phase * amp)
            .add_scaled(&self.loop_shift_adj, phase.conj() * amp);
        h.check_hermitian(HERMITIAN_TOL)?;
        Ok(h)
    }

    /// Hamiltonian with the small junction removed (αE_J → 0), the loop
    /// opened; flux drops out.
    pub fn hamiltonian_open_loop(&self) -> Operator {
        self.static_part.clone()
    }
}

/// Full circuit Hamiltonian in GHz at reduced flux `f`.
pub fn build_full_hamiltonian(
    params: &CircuitParams,
    trunc: &TruncationSpec,
    f: f64,
) -> Result<Operator> {
    validate_flux(f)?;
    FullModel::new(params, trunc)?.hamiltonian(f)
}

/// Coupler phase that minimizes the φ₄ potential
/// E_L,c·φ₄²/2 + E_L,R·(φ₆+φ₄)²/2 − αE_J cos(φ₄ − φ₁ − φ₃ + 2πf)
/// at fixed φ₁, φ₃, φ₆ (all phases in radians).
pub fn adiabatic_phi4(params: &CircuitParams, phi1: f64, phi3: f64, phi6: f64, f: f64) -> f64 {
    let x = 2.0 * PI * f - phi1 - phi3;
    let el_r = params.el_resonator_ghz();
    let el = params.el_coupler_ghz() + el_r;
    let aej = params.alpha * params.ej_ghz;
    // Strictly convex when E_L,eff > αE_J; Newton from the linearized root.
    let mut p = adiabatic_phi4_linear(params, phi1, phi3, phi6, f);
    for _ in 0..100 {
        let grad = el * p + el_r * phi6 + aej * (p + x).sin();
        let curv = el + aej * (p + x).cos();
        let step = grad / curv;
        p -= step;
        if step.abs() <= 1e-15 * (1.0 + p.abs()) {
            break;
        }
    }
    p
}

/// Minimizer with the junction sine linearized around φ₄ = 0:
/// −[L_eff·αI_C·(2π/Φ₀)]·sin(2πf − φ₁ − φ₃) − L_c/(L_c+L_R)·φ₆.
pub fn adiabatic_phi4_linear(params: &CircuitParams, phi1: f64, phi3: f64, phi6: f64, f: f64) -> f64 {
    let x = 2.0 * PI * f - phi1 - phi3;
    let el_eff = inductive_energy_ghz(params.l_eff_nh());
    let share = params.lc_nh / (params.lc_nh + params.lr_nh);
    -params.alpha * params.ej_ghz / el_eff * x.sin() - share * phi6
}

/// The φ₄-dependent potential in GHz.
pub fn phi4_potential(params: &CircuitParams, phi1: f64, phi3: f64, phi4: f64, phi6: f64, f: f64) -> f64 {
    0.5 * params.el_coupler_ghz() * phi4 * phi4
        + 0.5 * params.el_resonator_ghz() * (phi6 + phi4).powi(2)
        - params.alpha * params.ej_ghz * (phi4 - phi1 - phi3 + 2.0 * PI * f).cos()
}
