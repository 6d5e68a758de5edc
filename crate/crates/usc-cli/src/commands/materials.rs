//! materials {lk, rho, tc, calib}.

use std::path::Path;

use serde_json::{json, Value};

use usc_core::materials::{
    gral_calibration, kinetic_inductance, resistivity, sheet_resistance, tc_from_rt_curve, RTCurve, TcOptions,
    WireGeometry,
};

use crate::output::{num, CliResult, Failure};

pub fn lk(r_ohm: f64, tc_k: f64) -> CliResult<Value> {
    Ok(json!({ "R_ohm": r_ohm, "Tc_K": tc_k, "Lk_nH": num(kinetic_inductance(r_ohm, tc_k)?) }))
}

pub fn rho(r_ohm: f64, geom: WireGeometry) -> CliResult<Value> {
    let geom = WireGeometry::new(geom.length_um, geom.width_um, geom.thickness_nm)?;
    Ok(json!({
        "R_ohm": r_ohm,
        "length_um": geom.length_um,
        "width_um": geom.width_um,
        "thickness_nm": geom.thickness_nm,
        "squares": geom.squares(),
        "rho_uOhm_cm": num(resistivity(r_ohm, &geom)?),
        "Rs_ohm_per_sq": num(sheet_resistance(r_ohm, &geom)?),
    }))
}

pub fn tc(path: &Path, onset_window: f64) -> CliResult<Value> {
    let file = std::fs::File::open(path).map_err(|e| Failure::io(format!("cannot open `{}`: {e}", path.display())))?;
    let curve = RTCurve::read_csv(file)?;
    let r = tc_from_rt_curve(&curve, &TcOptions { onset_window })?;
    let mut v = serde_json::to_value(r).expect("plain data serializes");
    v["n_samples"] = json!(curve.len());
    v["onset_definition"] = json!("median resistance over the top `onset_window` fraction of the temperature span");
    Ok(v)
}

pub fn calib(flow_sccm: f64, baked: bool, interpolate: bool) -> CliResult<Value> {
    let e = gral_calibration(flow_sccm, baked, interpolate)?;
    let mut v = serde_json::to_value(e).expect("plain data serializes");
    v["table_version"] = json!(usc_core::materials::calibration::TABLE_VERSION);
    v["summary"] = json!(format!("{:.2} ± {:.2} Ω/sq", e.rs, e.uncertainty));
    Ok(v)
}
