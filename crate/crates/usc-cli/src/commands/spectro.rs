//! normalize, fit, overlay.

use std::path::Path;

use serde_json::{json, Map, Value};

use usc_core::reduced::QRMParams;
use usc_core::spectro::{
    branches_to_points, extract_ridges, fit_qrm, label_transitions_among, normalize_map, overlay_svg, FitOptions,
    FitResult, MagnitudeScale, OverlayCurves, RidgeOptions, S21Map, TransitionPoints, PARAM_NAMES,
};

use super::{labels, qrm_params};
use crate::config::Config;
use crate::output::{num, CliResult, Failure, Sink};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum Stage {
    Normalize,
    Ridges,
    Label,
    Fit,
    Overlay,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Normalize => "normalize",
            Stage::Ridges => "ridges",
            Stage::Label => "label",
            Stage::Fit => "fit",
            Stage::Overlay => "overlay",
        }
    }
}

fn open(path: &Path) -> CliResult<std::fs::File> {
    std::fs::File::open(path).map_err(|e| Failure::io(format!("cannot open `{}`: {e}", path.display())))
}

fn load_map(c: &Config) -> CliResult<S21Map> {
    let path = Path::new(c.require("map")?);
    let file = open(path)?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        return Ok(S21Map::read_json(file)?);
    }
    let scale = match c.require("map_scale")? {
        "db" => MagnitudeScale::Db,
        "linear" => MagnitudeScale::Linear,
        "normalized" => MagnitudeScale::Normalized,
        v => return Err(Failure::validation(format!("key `map_scale`: `{v}` is not db, linear or normalized"))),
    };
    Ok(S21Map::read_csv(file, scale)?)
}

fn normalize_stage(map: &S21Map, sink: &mut Sink) -> CliResult<(S21Map, Value)> {
    let norm = normalize_map(map)?;
    sink.csv("normalized_map.csv", |w| norm.write_csv(w))?;
    let info = json!({
        "n_freq": norm.n_freq(),
        "n_flux": norm.n_flux(),
        "filled_cells": map.filled_cells.len(),
        "degenerate_rows": norm.degenerate_rows,
    });
    Ok((norm, info))
}

pub fn normalize(c: &Config, sink: &mut Sink) -> CliResult<Value> {
    let map = load_map(c)?;
    Ok(normalize_stage(&map, sink)?.1)
}

fn ridge_options(c: &Config) -> CliResult<RidgeOptions> {
    Ok(RidgeOptions {
        prominence: c.f64("prominence")?,
        per_flux_max_peaks: c.usize("per_flux_max_peaks")?,
        jump_cap_ghz: c.f64("jump_cap_GHz")?,
        max_gap: c.usize("max_gap_columns")?,
        min_branch_len: c.usize("min_branch_points")?,
    })
}

fn guess(c: &Config) -> CliResult<QRMParams> {
    Ok(QRMParams::new(c.f64("Delta_GHz")?, c.f64("Ip_nA")?, c.f64("omega_r_GHz")?, c.f64("g_GHz")?)?)
}

fn fit_options(c: &Config) -> CliResult<FitOptions> {
    let mut free = [true; 4];
    for name in c.list("fixed") {
        let i = ["omega_r", "Delta", "Ip", "g"]
            .iter()
            .position(|&n| n == name)
            .ok_or_else(|| Failure::validation(format!("key `fixed`: unknown parameter `{name}` (omega_r, Delta, Ip, g)")))?;
        free[i] = false;
    }
    Ok(FitOptions {
        free,
        max_iter: c.usize("max_iter")?,
        sigma_ghz: c.opt_f64("sigma_GHz")?,
        nfock: c.opt_usize("fit_nfock")?,
        ..FitOptions::default()
    })
}

fn fit_value(fit: &FitResult) -> Value {
    let mut params = Map::new();
    for (i, name) in PARAM_NAMES.iter().enumerate() {
        params.insert(
            name.to_string(),
            json!({ "value": num(fit.value(i)), "uncertainty": num(fit.uncertainties[i]), "free": fit.free[i] }),
        );
    }
    json!({
        "parameters": params,
        "residual_rms_GHz": num(fit.residual_rms_ghz),
        "fit": serde_json::to_value(fit).expect("plain data serializes"),
    })
}

/// Label only the points that carry no label yet.
fn label_stage(c: &Config, pts: TransitionPoints, guess: &QRMParams, sink: &mut Sink) -> CliResult<(TransitionPoints, Value)> {
    let candidates = labels(c)?;
    let tol = c.f64("ambiguity_tol_GHz")?;
    let (known, unknown): (Vec<_>, Vec<_>) = pts.points.into_iter().partition(|p| p.label.is_some());
    let report = label_transitions_among(&TransitionPoints { points: unknown }, guess, &candidates, tol)?;
    let mut all = known;
    all.extend(report.points.points.iter().copied());
    let labeled = TransitionPoints::new(all)?;
    sink.csv("labeled_points.csv", |w| labeled.write_csv(w))?;
    let ambiguous: Vec<&str> = report.ambiguous().map(|a| a.group.as_str()).collect();
    if !ambiguous.is_empty() {
        eprintln!(
            "warning: ambiguous label for {}; set labels in the points file to override",
            ambiguous.join(", ")
        );
    }
    let info = json!({
        "assignments": serde_json::to_value(&report.assignments).expect("plain data serializes"),
        "ambiguous": ambiguous,
    });
    sink.json("label_report.json", info.clone())?;
    Ok((labeled, info))
}

pub fn fit(c: &Config, sink: &mut Sink, stop_after: Option<Stage>) -> CliResult<Value> {
    let stop = stop_after.unwrap_or(Stage::Overlay);
    let g0 = guess(c)?;
    let opts = fit_options(c)?;
    let mut summary = Map::new();

    let (points, norm) = if c.is_set("points") {
        if c.is_set("map") {
            return Err(Failure::validation("set either `map` or `points`, not both"));
        }
        if stop < Stage::Label {
            return Err(Failure::validation(format!(
                "--stop-after {} needs a map; `points` input starts at the label stage",
                stop.name()
            )));
        }
        let pts = TransitionPoints::read_csv(open(Path::new(c.require("points")?))?)?;
        (pts, None)
    } else {
        let map = load_map(c).map_err(|e| e.in_stage("normalize"))?;
        let (norm, info) = normalize_stage(&map, sink).map_err(|e| e.in_stage("normalize"))?;
        summary.insert("normalize".into(), info);
        if stop == Stage::Normalize {
            return Ok(Value::Object(summary));
        }
        let ropts = ridge_options(c).map_err(|e| e.in_stage("ridges"))?;
        let traced = match c.require("trace_map")? {
            "raw" => &map,
            "normalized" => &norm,
            v => return Err(Failure::validation(format!("key `trace_map`: `{v}` is not raw or normalized"))),
        };
        let branches = extract_ridges(traced, &ropts).map_err(|e| Failure::from(e).in_stage("ridges"))?;
        if branches.is_empty() {
            eprintln!("warning: no ridges found above prominence {}", ropts.prominence);
        }
        let pts = branches_to_points(&branches);
        sink.csv("ridges.csv", |w| pts.write_csv(w))?;
        summary.insert(
            "ridges".into(),
            json!({ "branches": branches.len(), "points": pts.len() }),
        );
        if stop == Stage::Ridges {
            return Ok(Value::Object(summary));
        }
        (pts, Some(norm))
    };

    let (labeled, info) = label_stage(c, points, &g0, sink).map_err(|e| e.in_stage("label"))?;
    summary.insert("label".into(), info);
    if stop == Stage::Label {
        return Ok(Value::Object(summary));
    }

    let usable = labeled.labeled();
    let fit = fit_qrm(&usable, &g0, &opts).map_err(|e| Failure::from(e).in_stage("fit"))?;
    let fv = fit_value(&fit);
    sink.json("fit.json", fv.clone())?;
    summary.insert("fit".into(), fv);
    if stop == Stage::Fit {
        return Ok(Value::Object(summary));
    }

    let flux = match &norm {
        Some(m) => m.flux.clone(),
        None => {
            let mut f: Vec<f64> = usable.points.iter().map(|p| p.flux).collect();
            f.sort_by(f64::total_cmp);
            f.dedup();
            f
        }
    };
    let curves = OverlayCurves::compute(&fit.params, &flux).map_err(|e| Failure::from(e).in_stage("overlay"))?;
    sink.csv("overlay.csv", |w| curves.write_csv(w))?;
    if let Some(m) = &norm {
        sink.svg("overlay.svg", &overlay_svg(m, &curves, &labels(c)?))?;
    }
    summary.insert("overlay".into(), json!({ "n_flux": flux.len() }));
    Ok(Value::Object(summary))
}

pub fn overlay(c: &Config, sink: &mut Sink) -> CliResult<Value> {
    let params = match c.get("fit") {
        Some(path) => {
            let v: Value = serde_json::from_reader(open(Path::new(path))?)
                .map_err(|e| Failure::validation(format!("fit file `{path}`: {e}")))?;
            let inner = v.pointer("/result/fit").or_else(|| v.pointer("/fit")).unwrap_or(&v);
            let fit = FitResult::from_json(&inner.to_string())
                .map_err(|e| Failure::validation(format!("fit file `{path}`: {e}")))?;
            fit.params
        }
        None => qrm_params(c)?,
    };
    let map = load_map(c)?;
    let norm = if map.scale == MagnitudeScale::Normalized { map } else { normalize_stage(&map, sink)?.0 };
    let curves = OverlayCurves::compute(&params, &norm.flux)?;
    sink.csv("overlay.csv", |w| curves.write_csv(w))?;
    sink.svg("overlay.svg", &overlay_svg(&norm, &curves, &labels(c)?))?;
    Ok(json!({ "params": serde_json::to_value(params).expect("plain data serializes"), "n_flux": norm.flux.len() }))
}
