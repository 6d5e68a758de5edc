//! Physical constants (SI, exact 2019 definitions) and the unit conversions used
//! throughout the crate.
//!
//! Energies are carried as ordinary frequencies in GHz (E/h). Angular
//! frequencies only appear inside closed-form coupling and impedance formulas.

use std::f64::consts::PI;

/// Planck constant, J·s.
pub const H: f64 = 6.626_070_15e-34;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = H / (2.0 * PI);
/// Elementary charge, C.
pub const E_CHARGE: f64 = 1.602_176_634e-19;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Magnetic flux quantum h/2e, Wb.
pub const PHI0: f64 = H / (2.0 * E_CHARGE);
/// Reduced flux quantum Φ₀/2π, Wb.
pub const PHI0_RED: f64 = PHI0 / (2.0 * PI);

pub const GHZ: f64 = 1e9;
pub const NANO: f64 = 1e-9;
pub const PICO: f64 = 1e-12;
pub const FEMTO: f64 = 1e-15;

/// Charging energy E_C = e²/2C as a frequency in GHz, capacitance in fF.
pub fn charging_energy_ghz(c_ff: f64) -> f64 {
    E_CHARGE * E_CHARGE / (2.0 * c_ff * FEMTO) / H / GHZ
}

/// Inverse of [`charging_energy_ghz`]: capacitance in fF from E_C/h in GHz.
pub fn capacitance_from_ec_ff(ec_ghz: f64) -> f64 {
    E_CHARGE * E_CHARGE / (2.0 * ec_ghz * GHZ * H) / FEMTO
}

/// Inductive energy E_L = (Φ₀/2π)²/L as a frequency in GHz, inductance in nH.
pub fn inductive_energy_ghz(l_nh: f64) -> f64 {
    PHI0_RED * PHI0_RED / (l_nh * NANO) / H / GHZ
}

/// Junction critical current in nA for a Josephson energy E_J/h in GHz.
pub fn critical_current_na(ej_ghz: f64) -> f64 {
    ej_ghz * GHZ * H / PHI0_RED / NANO
}

/// Josephson energy E_J/h in GHz for a critical current in nA.
pub fn josephson_energy_ghz(ic_na: f64) -> f64 {
    ic_na * NANO * PHI0_RED / H / GHZ
}

/// Energy in GHz of `L·I²` with L in nH and I in nA.
pub fn inductance_current_sq_ghz(l_nh: f64, i_na: f64) -> f64 {
    l_nh * NANO * (i_na * NANO).powi(2) / H / GHZ
}
