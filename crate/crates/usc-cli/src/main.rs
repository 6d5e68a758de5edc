mod commands;
mod config;
mod output;
mod plot;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use commands::spectro::Stage;
use config::{keys_help, Config, Key};
use output::{pretty, CliResult, Failure, Sink, EXIT_OK, EXIT_VALIDATION, TOOL};

const SIMULATE: &[&[Key]] = &[config::CIRCUIT, config::TRUNCATION, config::FLUX, config::OUTPUT];
const SIMULATE_QRM: &[&[Key]] = &[config::QRM, config::FLUX, config::LABELS, config::OUTPUT];
const BS_SHIFT: &[&[Key]] = &[config::QRM, config::BS, config::OUTPUT];
const COUPLING: &[&[Key]] = &[config::CIRCUIT, config::COUPLING, config::OUTPUT];
const NORMALIZE: &[&[Key]] = &[config::MAP, config::OUTPUT];
const FIT: &[&[Key]] = &[config::GUESS, config::MAP, config::RIDGES, config::LABELS, config::FIT, config::OUTPUT];
const OVERLAY: &[&[Key]] = &[config::QRM, config::OVERLAY, config::MAP, config::LABELS, config::OUTPUT];

const EXIT_CODES: &str = "Exit codes: 0 success, 1 invalid input or configuration, 2 I/O failure, 3 numerical failure \
(non-convergence, rank deficiency, truncation over the dimension cap).";

#[derive(Parser)]
#[command(
    name = "usc",
    version,
    about = "Flux qubit / LC resonator ultrastrong-coupling toolkit",
    after_help = EXIT_CODES
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Configuration file with one `key = value` per line
    #[arg(short, long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Set or override one key (repeatable)
    #[arg(short, long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory; same as the `out_dir` key
    #[arg(short, long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Four-mode circuit spectrum and renormalized qubit gap versus flux
    #[command(after_help = keys_help(SIMULATE))]
    Simulate(RunArgs),
    /// Quantum Rabi and Jaynes-Cummings transition curves versus flux
    #[command(name = "simulate-qrm", after_help = keys_help(SIMULATE_QRM))]
    SimulateQrm(RunArgs),
    /// Bloch-Siegert shifts (QRM minus JC) and the analytic estimate
    #[command(name = "bs-shift", after_help = keys_help(BS_SHIFT))]
    BsShift(RunArgs),
    /// Coupling strength from the lumped circuit elements
    #[command(name = "estimate-coupling", after_help = keys_help(COUPLING))]
    EstimateCoupling(RunArgs),
    /// Kinetic inductance, resistivity, Tc and film calibration
    Materials {
        #[command(subcommand)]
        command: MaterialsCommand,
    },
    /// Row-normalize an S21 map
    #[command(after_help = keys_help(NORMALIZE))]
    Normalize(RunArgs),
    /// Normalize, trace ridges, label, fit the Rabi model and overlay
    #[command(after_help = keys_help(FIT))]
    Fit {
        #[command(flatten)]
        run: RunArgs,
        /// Stop after this stage; earlier artifacts are still written
        #[arg(long, value_enum, value_name = "STAGE")]
        stop_after: Option<Stage>,
    },
    /// Model curves (QRM solid, JC dashed) over a normalized map
    #[command(after_help = keys_help(OVERLAY))]
    Overlay(RunArgs),
}

#[derive(Subcommand)]
enum MaterialsCommand {
    /// Kinetic inductance L_k = 0.18·ħR/(k_B·Tc), nH
    Lk {
        /// Normal-state resistance, Ω
        r_ohm: f64,
        /// Critical temperature, K
        tc_k: f64,
    },
    /// Resistivity (µΩ·cm) and sheet resistance of a wire
    Rho {
        /// Normal-state resistance, Ω
        r_ohm: f64,
        /// Wire length, µm
        #[arg(long, default_value_t = 30.0)]
        length_um: f64,
        /// Wire width, µm
        #[arg(long, default_value_t = 0.487)]
        width_um: f64,
        /// Film thickness, nm
        #[arg(long, default_value_t = 50.0)]
        thickness_nm: f64,
    },
    /// Tc, ΔTc, T10 and T90 from an R(T) CSV (temperature_K, resistance_ohm)
    Tc {
        file: PathBuf,
        /// Fraction of the temperature span, from the top, whose median resistance is the onset
        #[arg(long, default_value_t = usc_core::materials::DEFAULT_ONSET_WINDOW)]
        onset_window: f64,
    },
    /// Sheet resistance of granular aluminum films by oxygen flow (Ω/sq)
    Calib {
        /// Oxygen flow, sccm
        flow_sccm: f64,
        /// After baking
        #[arg(long)]
        baked: bool,
        /// Interpolate linearly between tabulated flows
        #[arg(long)]
        interpolate: bool,
    },
}

fn load(run: &RunArgs, groups: &[&[Key]]) -> CliResult<Config> {
    let mut c = Config::load(run.config.as_deref(), &run.set, groups)?;
    if let Some(d) = &run.out_dir {
        c.set("out_dir", d.to_string_lossy());
    }
    Ok(c)
}

fn sink(c: &Config, command: &str) -> CliResult<Sink> {
    Sink::new(&PathBuf::from(c.require("out_dir")?), command, c.resolved())
}

/// Commands writing artifacts: a `<command>.json` report next to them.
fn with_artifacts(
    run: &RunArgs,
    groups: &[&[Key]],
    command: &str,
    f: impl FnOnce(&Config, &mut Sink) -> CliResult<Value>,
) -> CliResult<Value> {
    let c = load(run, groups)?;
    let mut s = sink(&c, command)?;
    let result = f(&c, &mut s)?;
    s.json(&format!("{command}.json"), result.clone())?;
    Ok(s.envelope(result))
}

/// Report-only commands: stdout, plus a file when an output directory is set.
fn report(run: &RunArgs, groups: &[&[Key]], command: &str, f: impl FnOnce(&Config) -> CliResult<Value>) -> CliResult<Value> {
    let c = load(run, groups)?;
    let result = f(&c)?;
    if c.is_set("out_dir") {
        let mut s = sink(&c, command)?;
        s.json(&format!("{command}.json"), result.clone())?;
        return Ok(s.envelope(result));
    }
    Ok(serde_json::json!({ "tool": TOOL, "command": command, "config": c.resolved(), "result": result }))
}

fn materials(cmd: &MaterialsCommand) -> CliResult<Value> {
    let (name, args, result): (&str, BTreeMap<&str, String>, Value) = match cmd {
        MaterialsCommand::Lk { r_ohm, tc_k } => (
            "materials lk",
            BTreeMap::from([("R_ohm", r_ohm.to_string()), ("Tc_K", tc_k.to_string())]),
            commands::materials::lk(*r_ohm, *tc_k)?,
        ),
        MaterialsCommand::Rho { r_ohm, length_um, width_um, thickness_nm } => (
            "materials rho",
            BTreeMap::from([
                ("R_ohm", r_ohm.to_string()),
                ("length_um", length_um.to_string()),
                ("width_um", width_um.to_string()),
                ("thickness_nm", thickness_nm.to_string()),
            ]),
            commands::materials::rho(
                *r_ohm,
                usc_core::materials::WireGeometry { length_um: *length_um, width_um: *width_um, thickness_nm: *thickness_nm },
            )?,
        ),
        MaterialsCommand::Tc { file, onset_window } => (
            "materials tc",
            BTreeMap::from([("file", file.display().to_string()), ("onset_window", onset_window.to_string())]),
            commands::materials::tc(file, *onset_window)?,
        ),
        MaterialsCommand::Calib { flow_sccm, baked, interpolate } => (
            "materials calib",
            BTreeMap::from([
                ("flow_sccm", flow_sccm.to_string()),
                ("baked", baked.to_string()),
                ("interpolate", interpolate.to_string()),
            ]),
            commands::materials::calib(*flow_sccm, *baked, *interpolate)?,
        ),
    };
    Ok(serde_json::json!({ "tool": TOOL, "command": name, "config": args, "result": result }))
}

fn run(cli: Cli) -> CliResult<Value> {
    use commands::{sim, spectro};
    match &cli.command {
        Command::Simulate(r) => with_artifacts(r, SIMULATE, "simulate", sim::simulate),
        Command::SimulateQrm(r) => with_artifacts(r, SIMULATE_QRM, "simulate-qrm", sim::simulate_qrm),
        Command::BsShift(r) => report(r, BS_SHIFT, "bs-shift", sim::bs_shift),
        Command::EstimateCoupling(r) => report(r, COUPLING, "estimate-coupling", sim::estimate_coupling),
        Command::Materials { command } => materials(command),
        Command::Normalize(r) => with_artifacts(r, NORMALIZE, "normalize", spectro::normalize),
        Command::Fit { run, stop_after } => {
            // every stage writes its own artifact; the summary goes to stdout only
            let c = load(run, FIT)?;
            let mut s = sink(&c, "fit")?;
            let result = spectro::fit(&c, &mut s, *stop_after)?;
            Ok(s.envelope(result))
        }
        Command::Overlay(r) => with_artifacts(r, OVERLAY, "overlay", spectro::overlay),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(v) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(pretty(&v).as_bytes()).is_err() {
                return ExitCode::from(output::EXIT_IO);
            }
            ExitCode::from(EXIT_OK)
        }
        Err(Failure { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
