//! Closed-form resonator and coupling estimates from lumped elements.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::circuit::CircuitParams;
use crate::constants::{FEMTO, GHZ, H, HBAR, NANO};
use crate::error::{Error, Result};

/// Resonator loaded by the coupler: ω_r/2π = 1/(2π√((L_R+L_c)C_R)) in GHz and
/// Z′ = √((L_R+L_c)/C_R) in Ω.
pub fn renormalized_resonator(lr_nh: f64, lc_nh: f64, cr_ff: f64) -> Result<(f64, f64)> {
    if !(lr_nh > 0.0 && lc_nh >= 0.0 && cr_ff > 0.0) {
        return Err(Error::param(
            "resonator",
            format!("need L_R > 0, L_c ≥ 0, C_R > 0; got {lr_nh} nH, {lc_nh} nH, {cr_ff} fF"),
        ));
    }
    let l = (lr_nh + lc_nh) * NANO;
    let c = cr_ff * FEMTO;
    Ok((1.0 / (2.0 * PI * (l * c).sqrt()) / GHZ, (l / c).sqrt()))
}

/// g/2π = L_c·I_p·I_rms/h in GHz.
pub fn g_simple_limit(lc_nh: f64, ip_na: f64, irms_na: f64) -> f64 {
    lc_nh * NANO * ip_na * NANO * irms_na * NANO / H / GHZ
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum XiMode {
    /// ξ_R from the two-mode hybridization of resonator and coupler branch.
    Computed,
    /// ξ_R = 1.
    Unity,
}

/// Every intermediate of the coupling estimate. Frequencies are ordinary
/// (ω/2π) in GHz.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingEstimate {
    pub g_ghz: f64,
    pub l_eff_nh: f64,
    /// Bare resonator 1/(2π√(L_R C_R)).
    pub omega_r_bare_ghz: f64,
    pub irms_na: f64,
    pub z_r_ohm: f64,
    pub xi_r: f64,
    pub omega_a_ghz: f64,
    /// Coupler-branch mode 1/(2π√(L_eff C_tot)).
    pub omega_4_ghz: f64,
    /// g̃ = √(ω_R/√(L_R C_tot))/2π.
    pub g_tilde_ghz: f64,
    /// α·C_J + C_sh.
    pub c_tot_ff: f64,
    /// ω_R² − ω₄² in (2π·GHz)²; the mode-splitting term of ω_A, unrelated to
    /// the qubit gap.
    pub delta_mode_sq: f64,
    /// L_c·I_p·I_rms/h for comparison.
    pub g_simple_limit_ghz: f64,
    /// Loaded resonator frequency, for g/ω_r.
    pub omega_r_loaded_ghz: f64,
}

impl CouplingEstimate {
    pub fn g_over_omega_r(&self) -> f64 {
        self.g_ghz / self.omega_r_loaded_ghz
    }

    /// Relative difference between g and the simple-limit formula.
    pub fn simple_limit_deviation(&self) -> f64 {
        if self.g_simple_limit_ghz == 0.0 {
            return if self.g_ghz == 0.0 { 0.0 } else { f64::INFINITY };
        }
        (self.g_ghz / self.g_simple_limit_ghz - 1.0).abs()
    }
}

pub fn coupling_estimate(params: &CircuitParams, ip_na: f64) -> Result<CouplingEstimate> {
    coupling_estimate_with(params, ip_na, XiMode::Computed)
}

pub fn coupling_estimate_with(params: &CircuitParams, ip_na: f64, xi: XiMode) -> Result<CouplingEstimate> {
    params.validate()?;
    if !(ip_na >= 0.0 && ip_na.is_finite()) {
        return Err(Error::param("Ip_nA", format!("must be non-negative, got {ip_na}")));
    }
    let lr = params.lr_nh * NANO;
    let lc = params.lc_nh * NANO;
    let cr = params.cr_ff * FEMTO;
    let l_eff = 1.0 / (1.0 / lr + 1.0 / lc);
    let c_tot = (params.alpha * params.cj_ff + params.csh_ff) * FEMTO;

    let w_r_sq = 1.0 / (cr * lr);
    let w_r = w_r_sq.sqrt();
    let w4_sq = 1.0 / (l_eff * c_tot);
    let delta_mode_sq = w_r_sq - w4_sq;
    let g_tilde_sq = w_r / (lr * c_tot).sqrt();
    let w_a_sq = 0.5 * (w_r_sq + w4_sq) - ((0.5 * delta_mode_sq).powi(2) + g_tilde_sq * g_tilde_sq).sqrt();
    let xi_r = match xi {
        XiMode::Unity => 1.0,
        XiMode::Computed => {
            if w_a_sq <= 0.0 {
                return Err(Error::Regime(format!(
                    "hybridized mode frequency² = {w_a_sq:e} rad²/s² ≤ 0; the coupler cannot be eliminated adiabatically"
                )));
            }
            (w_r / w_a_sq.sqrt()).sqrt()
        }
    };
    let irms = (HBAR * w_r / (2.0 * lr)).sqrt();
    let ip = ip_na * NANO;
    let g = xi_r * l_eff * ip * irms / HBAR / (2.0 * PI) / GHZ;
    let to_ghz = |w: f64| w / (2.0 * PI) / GHZ;
    let (loaded, _) = renormalized_resonator(params.lr_nh, params.lc_nh, params.cr_ff)?;
    Ok(CouplingEstimate {
        g_ghz: g,
        l_eff_nh: l_eff / NANO,
        omega_r_bare_ghz: to_ghz(w_r),
        irms_na: irms / NANO,
        z_r_ohm: (lr / cr).sqrt(),
        xi_r,
        omega_a_ghz: to_ghz(w_a_sq.max(0.0).sqrt()),
        omega_4_ghz: to_ghz(w4_sq.sqrt()),
        g_tilde_ghz: to_ghz(g_tilde_sq.sqrt()),
        c_tot_ff: c_tot / FEMTO,
        delta_mode_sq,
        g_simple_limit_ghz: g_simple_limit(params.lc_nh, ip_na, irms / NANO),
        omega_r_loaded_ghz: loaded,
    })
}
