pub mod materials;
pub mod sim;
pub mod spectro;

use usc_core::circuit::{CircuitParams, JunctionCharge, JunctionEnergy};
use usc_core::reduced::QRMParams;
use usc_core::spectro::synth::linspace;
use usc_core::TransitionLabel;

use crate::config::Config;
use crate::output::{CliResult, Failure};

pub fn circuit_params(c: &Config) -> CliResult<CircuitParams> {
    let junction = match (c.is_set("Jc_uA_per_um2"), c.is_set("junction_area_um2")) {
        (true, true) if c.is_set("EJ_GHz") => {
            return Err(Failure::validation(
                "set either `EJ_GHz` or `Jc_uA_per_um2` with `junction_area_um2`, not both",
            ))
        }
        (true, true) => JunctionEnergy::CurrentDensity {
            jc_ua_per_um2: c.f64("Jc_uA_per_um2")?,
            area_um2: c.f64("junction_area_um2")?,
        },
        (false, false) => JunctionEnergy::Frequency { ej_ghz: c.f64("EJ_GHz")? },
        _ => return Err(Failure::validation("`Jc_uA_per_um2` and `junction_area_um2` must be given together")),
    };
    let charge = if c.is_set("CJ_fF") {
        if c.is_set("EC_GHz") {
            return Err(Failure::validation("set either `EC_GHz` or `CJ_fF`, not both"));
        }
        JunctionCharge::CapacitanceFf(c.f64("CJ_fF")?)
    } else {
        JunctionCharge::ChargingEnergyGhz(c.f64("EC_GHz")?)
    };
    Ok(CircuitParams::new(
        junction,
        charge,
        c.f64("alpha")?,
        c.f64("Csh_fF")?,
        c.f64("LR_nH")?,
        c.f64("CR_fF")?,
        c.f64("Lc_nH")?,
    )?)
}

pub fn qrm_params(c: &Config) -> CliResult<QRMParams> {
    let mut p = QRMParams::new(c.f64("Delta_GHz")?, c.f64("Ip_nA")?, c.f64("omega_r_GHz")?, c.f64("g_GHz")?)?;
    if let Some(nf) = c.opt_usize("nfock")? {
        p = p.with_nfock(nf);
        p.validate()?;
    }
    Ok(p)
}

pub fn fluxes(c: &Config) -> CliResult<Vec<f64>> {
    let v = if c.is_set("flux_list_Phi0") {
        c.f64_list("flux_list_Phi0")?
    } else {
        let n = c.usize("flux_points")?;
        linspace(c.f64("flux_start_Phi0")?, c.f64("flux_stop_Phi0")?, n)
    };
    if v.is_empty() {
        return Err(Failure::validation("the flux sweep is empty"));
    }
    Ok(v)
}

pub fn labels(c: &Config) -> CliResult<Vec<TransitionLabel>> {
    let v: Vec<TransitionLabel> = c
        .list("labels")
        .iter()
        .map(|s| s.parse::<TransitionLabel>())
        .collect::<usc_core::Result<_>>()
        .map_err(|e| Failure::validation(format!("key `labels`: {e}")))?;
    if v.is_empty() {
        return Err(Failure::validation("key `labels`: no transitions given"));
    }
    Ok(v)
}

pub fn column(label: TransitionLabel) -> usize {
    TransitionLabel::ALL.iter().position(|&l| l == label).unwrap()
}
