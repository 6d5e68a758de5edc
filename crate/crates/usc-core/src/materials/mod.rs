//! Thin-film material figures: kinetic inductance, resistivity, sheet values,
//! critical temperature from R(T) and the grAl sheet-resistance table.

pub mod calibration;
pub mod rt;

use serde::{Deserialize, Serialize};

use crate::constants::{HBAR, K_B, NANO};
use crate::error::{Error, Result};

pub use calibration::{gral_calibration, CalibrationEntry, CalibrationTable};
pub use rt::{tc_from_rt_curve, RTCurve, TcOptions, TcResult, DEFAULT_ONSET_WINDOW};

/// Prefactor of the low-temperature, low-frequency kinetic inductance.
pub const MATTIS_BARDEEN_PREFACTOR: f64 = 0.18;

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::param(name, format!("must be positive and finite, got {v}")))
    }
}

/// L_k = 0.18·ħR/(k_B·T_c), nH.
pub fn kinetic_inductance(r_normal_ohm: f64, tc_k: f64) -> Result<f64> {
    let r = positive("R_normal_ohm", r_normal_ohm)?;
    let tc = positive("Tc_K", tc_k)?;
    Ok(MATTIS_BARDEEN_PREFACTOR * HBAR * r / (K_B * tc) / NANO)
}

/// Kinetic inductance of one square of film with sheet resistance `rs`, pH/□.
pub fn sheet_kinetic_inductance(rs_ohm_per_sq: f64, tc_k: f64) -> Result<f64> {
    Ok(kinetic_inductance(rs_ohm_per_sq, tc_k)? * 1e3)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WireGeometry {
    pub length_um: f64,
    pub width_um: f64,
    pub thickness_nm: f64,
}

impl WireGeometry {
    pub fn new(length_um: f64, width_um: f64, thickness_nm: f64) -> Result<Self> {
        Ok(Self {
            length_um: positive("length_um", length_um)?,
            width_um: positive("width_um", width_um)?,
            thickness_nm: positive("thickness_nm", thickness_nm)?,
        })
    }

    /// The coupler wire: 30 µm × 487 nm × 50 nm.
    pub fn coupler() -> Self {
        Self {
            length_um: 30.0,
            width_um: 0.487,
            thickness_nm: 50.0,
        }
    }

    pub fn squares(&self) -> f64 {
        self.length_um / self.width_um
    }

    fn validate(&self) -> Result<()> {
        Self::new(self.length_um, self.width_um, self.thickness_nm).map(|_| ())
    }
}

/// ρ = R·w·t/l, µΩ·cm.
pub fn resistivity(r_ohm: f64, geom: &WireGeometry) -> Result<f64> {
    let r = positive("R_ohm", r_ohm)?;
    geom.validate()?;
    let rho_ohm_m = r * (geom.width_um * 1e-6) * (geom.thickness_nm * 1e-9) / (geom.length_um * 1e-6);
    // 1 µΩ·cm = 1e-8 Ω·m
    Ok(rho_ohm_m / 1e-8)
}

/// R·w/l, Ω/□.
pub fn sheet_resistance(r_ohm: f64, geom: &WireGeometry) -> Result<f64> {
    let r = positive("R_ohm", r_ohm)?;
    geom.validate()?;
    Ok(r / geom.squares())
}

/// L_total·w/l, pH/□.
pub fn sheet_inductance(lk_total_nh: f64, geom: &WireGeometry) -> Result<f64> {
    let l = positive("Lk_nH", lk_total_nh)?;
    geom.validate()?;
    Ok(l * 1e3 / geom.squares())
}
