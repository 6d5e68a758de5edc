use serde::{Deserialize, Serialize};

use crate::constants::{
    capacitance_from_ec_ff, charging_energy_ghz, critical_current_na, inductive_energy_ghz,
    josephson_energy_ghz,
};
use crate::error::{Error, Result};

/// Shunt capacitance assumed wherever a device value is needed; the device
/// value is unpublished. Gives a renormalized qubit gap of about 3.54 GHz for
/// the design parameters.
pub const ASSUMED_CSH_FF: f64 = 11.0;

/// Critical current density of the estimated device, µA/µm².
pub const DEVICE_JC_UA_PER_UM2: f64 = 0.66;

/// Junction area that turns [`DEVICE_JC_UA_PER_UM2`] into E_J/h = 93.46 GHz.
pub fn default_junction_area_um2() -> f64 {
    critical_current_na(93.46) / 1000.0 / DEVICE_JC_UA_PER_UM2
}

/// How the large-junction Josephson energy is specified.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum JunctionEnergy {
    Frequency { ej_ghz: f64 },
    /// E_J = (Φ₀/2π)·Jc·area.
    CurrentDensity { jc_ua_per_um2: f64, area_um2: f64 },
}

/// How the large-junction capacitance is specified. E_C ≡ e²/2C_J.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum JunctionCharge {
    CapacitanceFf(f64),
    ChargingEnergyGhz(f64),
}

/// Lumped elements of the flux qubit galvanically coupled to an LC resonator.
///
/// Energies are frequencies E/h in GHz. The charging-energy convention is
/// E_C = e²/2C_J, so the junction kinetic term reads 4E_C·n².
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    pub ej_ghz: f64,
    pub cj_ff: f64,
    /// Small-junction ratio.
    pub alpha: f64,
    pub csh_ff: f64,
    pub lr_nh: f64,
    pub cr_ff: f64,
    pub lc_nh: f64,
}

impl CircuitParams {
    pub fn new(
        junction: JunctionEnergy,
        charge: JunctionCharge,
        alpha: f64,
        csh_ff: f64,
        lr_nh: f64,
        cr_ff: f64,
        lc_nh: f64,
    ) -> Result<Self> {
        let ej_ghz = match junction {
            JunctionEnergy::Frequency { ej_ghz } => ej_ghz,
            JunctionEnergy::CurrentDensity {
                jc_ua_per_um2,
                area_um2,
            } => {
                positive("Jc_uA_per_um2", jc_ua_per_um2)?;
                positive("junction_area_um2", area_um2)?;
                josephson_energy_ghz(jc_ua_per_um2 * area_um2 * 1000.0)
            }
        };
        let cj_ff = match charge {
            JunctionCharge::CapacitanceFf(c) => c,
            JunctionCharge::ChargingEnergyGhz(ec) => {
                positive("EC_GHz", ec)?;
                capacitance_from_ec_ff(ec)
            }
        };
        let p = Self {
            ej_ghz,
            cj_ff,
            alpha,
            csh_ff,
            lr_nh,
            cr_ff,
            lc_nh,
        };
        p.validate()?;
        Ok(p)
    }

    /// Design values: E_J/h = 93.46 GHz, E_C/h = 4.94 GHz, α = 0.58,
    /// L_c = 0.5 nH, L_R = 898.6 pH, C_R = 742.3 fF.
    pub fn design(csh_ff: f64) -> Result<Self> {
        Self::new(
            JunctionEnergy::Frequency { ej_ghz: 93.46 },
            JunctionCharge::ChargingEnergyGhz(4.94),
            0.58,
            csh_ff,
            0.8986,
            742.3,
            0.5,
        )
    }

    /// Values estimated for the measured device: L_c = 0.74 nH, α = 0.53,
    /// Jc = 0.66 µA/µm² over the default junction area, L_R = 0.9 nH,
    /// C_R = 0.74 pF.
    pub fn estimated_device(csh_ff: f64) -> Result<Self> {
        Self::new(
            JunctionEnergy::CurrentDensity {
                jc_ua_per_um2: DEVICE_JC_UA_PER_UM2,
                area_um2: default_junction_area_um2(),
            },
            JunctionCharge::ChargingEnergyGhz(4.94),
            0.53,
            csh_ff,
            0.9,
            740.0,
            0.74,
        )
    }

    pub fn validate(&self) -> Result<()> {
        positive("EJ_GHz", self.ej_ghz)?;
        positive("CJ_fF", self.cj_ff)?;
        positive("Csh_fF", self.csh_ff)?;
        positive("LR_nH", self.lr_nh)?;
        positive("CR_fF", self.cr_ff)?;
        positive("Lc_nH", self.lc_nh)?;
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::param("alpha", format!("must satisfy 0 < alpha ≤ 1, got {}", self.alpha)));
        }
        Ok(())
    }

    pub fn ec_ghz(&self) -> f64 {
        charging_energy_ghz(self.cj_ff)
    }

    /// α̃ = α + C_sh/C_J.
    pub fn alpha_tilde(&self) -> f64 {
        self.alpha + self.csh_ff / self.cj_ff
    }

    /// Parallel combination of L_R and L_c, nH.
    pub fn l_eff_nh(&self) -> f64 {
        1.0 / (1.0 / self.lr_nh + 1.0 / self.lc_nh)
    }

    pub fn ic_na(&self) -> f64 {
        critical_current_na(self.ej_ghz)
    }

    /// Small-junction critical current αI_C, nA.
    pub fn small_junction_ic_na(&self) -> f64 {
        self.alpha * self.ic_na()
    }

    pub fn el_coupler_ghz(&self) -> f64 {
        inductive_energy_ghz(self.lc_nh)
    }

    pub fn el_resonator_ghz(&self) -> f64 {
        inductive_energy_ghz(self.lr_nh)
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be positive and finite, got {v}")))
    }
}

/// Basis sizes of the four circuit modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationSpec {
    pub ncut1: usize,
    pub ncut3: usize,
    /// Oscillator levels for the coupler branch.
    pub n4: usize,
    /// Oscillator levels for the resonator.
    pub n6: usize,
}

impl Default for TruncationSpec {
    fn default() -> Self {
        Self {
            ncut1: 5,
            ncut3: 5,
            n4: 10,
            n6: 10,
        }
    }
}

impl TruncationSpec {
    pub fn new(ncut1: usize, ncut3: usize, n4: usize, n6: usize) -> Result<Self> {
        let t = Self { ncut1, ncut3, n4, n6 };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("ncut1", self.ncut1),
            ("ncut3", self.ncut3),
            ("n4", self.n4),
            ("n6", self.n6),
        ] {
            if v < 4 {
                return Err(Error::param(name, format!("must be at least 4, got {v}")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        (2 * self.ncut1 + 1) * (2 * self.ncut3 + 1) * self.n4 * self.n6
    }

    pub fn doubled(&self) -> Self {
        Self {
            ncut1: 2 * self.ncut1,
            ncut3: 2 * self.ncut3,
            n4: 2 * self.n4,
            n6: 2 * self.n6,
        }
    }
}
