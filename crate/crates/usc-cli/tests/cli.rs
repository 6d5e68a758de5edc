use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use usc_core::reduced::QRMParams;
use usc_core::spectro::synth::{linspace, rabi_map};
use usc_core::TransitionLabel::{W01, W02};

fn usc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_usc")).args(args).output().unwrap()
}

fn ok_json(args: &[&str]) -> Value {
    let out = usc(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn data_rows(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(str::to_string)
        .collect()
}

#[test]
fn help_everywhere_documents_keys() {
    for (args, needle) in [
        (vec!["--help"], "Exit codes"),
        (vec!["simulate", "--help"], "LR_nH"),
        (vec!["simulate-qrm", "--help"], "omega_r_GHz"),
        (vec!["bs-shift", "--help"], "bs_shift_MHz"),
        (vec!["estimate-coupling", "--help"], "Csh_fF"),
        (vec!["materials", "--help"], "calib"),
        (vec!["materials", "lk", "--help"], "Critical temperature, K"),
        (vec!["materials", "rho", "--help"], "thickness-nm"),
        (vec!["materials", "tc", "--help"], "onset-window"),
        (vec!["materials", "calib", "--help"], "sccm"),
        (vec!["normalize", "--help"], "map_scale"),
        (vec!["fit", "--help"], "jump_cap_GHz"),
        (vec!["overlay", "--help"], "labels"),
    ] {
        let out = usc(&args);
        assert_eq!(code(&out), 0, "{args:?}");
        assert!(String::from_utf8_lossy(&out.stdout).contains(needle), "{args:?} lacks {needle}");
    }
}

#[test]
fn simulate_reports_qubit_gap_and_single_flux_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("design.cfg");
    std::fs::write(
        &cfg,
        "# design values, assumed shunt\nEJ_GHz = 93.46\nEC_GHz = 4.94\nalpha = 0.58\nLc_nH = 0.5\nLR_nH = 0.8986\nCR_fF = 742.3\nCsh_fF = 11\n\
         flux_list_Phi0 = 0.5\nncut1 = 4\nncut3 = 4\nn4 = 5\nn6 = 5\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let v = ok_json(&["simulate", "-c", cfg.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(v["config"]["Csh_fF"], "11");
    let rows = data_rows(&out.join("qubit.csv"));
    assert_eq!(rows.len(), 1);
    let gap: f64 = rows[0].split(',').nth(1).unwrap().parse().unwrap();
    assert!((gap - 3.57).abs() / 3.57 < 0.05, "{gap}");
    assert_eq!(data_rows(&out.join("spectrum.csv")).len(), 1);
    let svg = std::fs::read_to_string(out.join("spectrum.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("Csh_fF = 11"));
    assert!(out.join("simulate.json").exists());
}

#[test]
fn truncation_over_cap_is_a_resource_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = usc(&["simulate", "-s", "Csh_fF=11", "-s", "n4=400", "-s", "n6=400", "-o", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("exceeds cap"));
}

#[test]
fn config_errors_name_the_key() {
    let out = usc(&["estimate-coupling", "-s", "Ip_nA=19.6"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("Csh_fF"));
    let out = usc(&["simulate-qrm", "-s", "omega_r=4.4"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("`omega_r`"));
    let out = usc(&["bs-shift", "-s", "g_GHz=fast"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("g_GHz"));
    assert_eq!(code(&usc(&["frobnicate"])), 1);
}

#[test]
fn coupling_estimate_reports_intermediates() {
    let base = ["estimate-coupling", "-s", "Csh_fF=11", "-s", "alpha=0.58", "-s", "CR_fF=740", "-s", "Lc_nH=0.74"];
    let run = |extra: &[&str]| {
        let mut a = base.to_vec();
        a.extend_from_slice(extra);
        ok_json(&a)["result"].clone()
    };
    let r = run(&["-s", "Ip_nA=19.6", "-s", "LR_nH=0.9"]);
    let g = r["g_ghz"].as_f64().unwrap();
    assert!((g - 0.61).abs() / 0.61 < 0.1, "{g}");
    assert!(r["g_over_omega_r"].as_f64().unwrap() >= 0.1);
    for k in ["l_eff_nh", "omega_r_bare_ghz", "irms_na", "z_r_ohm", "xi_r"] {
        assert!(r[k].is_number(), "{k}");
    }
    assert_eq!(r["simple_limit_check"], "differs");
    assert_eq!(run(&["-s", "Ip_nA=0", "-s", "LR_nH=0.9"])["g_ghz"].as_f64().unwrap(), 0.0);
    assert_eq!(run(&["-s", "Ip_nA=19.6", "-s", "LR_nH=740"])["simple_limit_check"], "agrees");
}

#[test]
fn bloch_siegert_report() {
    let r = ok_json(&["bs-shift", "-s", "bs_shift_MHz=23"])["result"].clone();
    let s01 = r["numeric_shift_MHz"]["w01"].as_f64().unwrap();
    let s02 = r["numeric_shift_MHz"]["w02"].as_f64().unwrap();
    assert!((s01.abs() - 23.0).abs() < 5.0 && s01 * s02 < 0.0);
    let g = r["g_from_shift_GHz"].as_f64().unwrap();
    assert!((g - 0.48).abs() / 0.48 < 0.01, "{g}");
}

#[test]
fn materials_commands() {
    let lk = ok_json(&["materials", "lk", "860", "1.60"])["result"]["Lk_nH"].as_f64().unwrap();
    assert!((lk - 0.739).abs() < 5e-4);
    let c = ok_json(&["materials", "calib", "0.6", "--baked"])["result"].clone();
    assert_eq!(c["summary"], "14.57 ± 1.49 Ω/sq");
    let rho = ok_json(&["materials", "rho", "960"])["result"]["rho_uOhm_cm"].as_f64().unwrap();
    assert!((rho - 78.3).abs() / 78.3 < 0.01);
    assert_eq!(code(&usc(&["materials", "calib", "0.65"])), 1);

    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("rt.csv");
    let mut text = String::from("temperature_K,resistance_ohm\n");
    for i in 0..=600 {
        let t = 1.0 + 0.005 * i as f64;
        text.push_str(&format!("{t},{}\n", 500.0 * (1.0 + ((t - 1.6) / 0.1).tanh())));
    }
    std::fs::write(&f, text).unwrap();
    let tc = ok_json(&["materials", "tc", f.to_str().unwrap()])["result"]["tc_k"].as_f64().unwrap();
    assert!((tc - 1.6).abs() < 0.005, "{tc}");
    assert_eq!(code(&usc(&["materials", "tc", "/nonexistent/rt.csv"])), 2);
}

fn write_rabi_map(dir: &Path) -> std::path::PathBuf {
    let map = rabi_map(
        &QRMParams::device_fit(),
        &linspace(3.5, 7.5, 801),
        &linspace(0.47, 0.53, 61),
        &[W01, W02],
        0.015,
        0.0,
        0,
    )
    .unwrap();
    let p = dir.join("map.csv");
    let mut buf = Vec::new();
    map.write_csv(&mut buf).unwrap();
    std::fs::write(&p, buf).unwrap();
    p
}

const GUESS: [&str; 8] = ["-s", "Delta_GHz=5.8", "-s", "Ip_nA=12.5", "-s", "omega_r_GHz=4.4", "-s", "g_GHz=0.5"];

#[test]
fn fit_pipeline_recovers_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let map = write_rabi_map(dir.path());
    let out = dir.path().join("out");
    let mut args = vec!["fit", "-o", out.to_str().unwrap(), "-s"];
    let m = format!("map={}", map.display());
    args.extend([m.as_str(), "-s", "map_scale=linear", "-s", "prominence=0.5", "-s", "labels=w01,w02"]);
    args.extend(GUESS);
    let v = ok_json(&args);
    let fit = &v["result"]["fit"]["parameters"];
    for (name, truth) in [("omega_r_GHz", 4.463), ("Delta_GHz", 5.707), ("Ip_nA", 11.619), ("g_GHz", 0.578)] {
        let x = fit[name]["value"].as_f64().unwrap();
        assert!((x - truth).abs() / truth < 1e-3, "{name}: {x}");
    }
    for f in ["normalized_map.csv", "ridges.csv", "labeled_points.csv", "label_report.json", "fit.json", "overlay.csv", "overlay.svg"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let overlay = std::fs::read_to_string(out.join("overlay.svg")).unwrap();
    assert!(overlay.contains("stroke-dasharray") && overlay.contains("polyline"));

    // the labeled points feed a fit directly
    let pts = format!("points={}", out.join("labeled_points.csv").display());
    let again = dir.path().join("again");
    let mut args = vec!["fit", "--stop-after", "fit", "-o", again.to_str().unwrap(), "-s", pts.as_str()];
    args.extend(GUESS);
    let w = ok_json(&args);
    assert_eq!(w["result"]["fit"]["parameters"], v["result"]["fit"]["parameters"]);
}

#[test]
fn stop_after_normalize_writes_only_the_normalized_map() {
    let dir = tempfile::tempdir().unwrap();
    let map = write_rabi_map(dir.path());
    let out = dir.path().join("out");
    let m = format!("map={}", map.display());
    let mut args = vec!["fit", "--stop-after", "normalize", "-o", out.to_str().unwrap(), "-s", m.as_str(), "-s", "map_scale=linear"];
    args.extend(GUESS);
    ok_json(&args);
    let files: Vec<String> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert_eq!(files, vec!["normalized_map.csv".to_string()]);
}

#[test]
fn stage_and_io_failures() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["fit", "-o", dir.path().to_str().unwrap(), "-s", "map=/nonexistent/map.csv"];
    args.extend(GUESS);
    let out = usc(&args);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("stage `normalize`"));

    let pts = dir.path().join("pts.csv");
    std::fs::write(&pts, "flux,freq_GHz,label\n0.5,4.21,w01\n0.5,5.96,w02\n").unwrap();
    let p = format!("points={}", pts.display());
    let mut args = vec!["fit", "-o", dir.path().to_str().unwrap(), "-s", p.as_str()];
    args.extend(GUESS);
    let out = usc(&args);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("stage `fit`"), "{}", stderr(&out));
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().to_str().unwrap();
    let read = || std::fs::read(dir.path().join("qrm_spectrum.csv")).unwrap();
    let a = usc(&["simulate-qrm", "-o", o, "-s", "flux_points=7"]);
    let first = read();
    let b = usc(&["simulate-qrm", "-o", o, "-s", "flux_points=7"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(first, read());
    assert_eq!(usc(&["bs-shift"]).stdout, usc(&["bs-shift"]).stdout);
}
