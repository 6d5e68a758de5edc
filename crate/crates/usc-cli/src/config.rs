//! Flat `key = value` run configuration with unit-suffixed keys.

use std::collections::BTreeMap;
use std::path::Path;

use crate::output::Failure;

/// One accepted configuration key.
pub struct Key {
    pub name: &'static str,
    /// `None` marks a key without default; reading it when unset is a
    /// missing-parameter error.
    pub default: Option<&'static str>,
    pub help: &'static str,
}

const fn key(name: &'static str, default: Option<&'static str>, help: &'static str) -> Key {
    Key { name, default, help }
}

pub const OUTPUT: &[Key] = &[key("out_dir", Some("."), "directory for written artifacts, created if absent")];

pub const CIRCUIT: &[Key] = &[
    key("EJ_GHz", Some("93.46"), "large-junction Josephson energy E_J/h"),
    key("Jc_uA_per_um2", None, "critical current density; with junction_area_um2 replaces EJ_GHz"),
    key("junction_area_um2", None, "large-junction area; with Jc_uA_per_um2 replaces EJ_GHz"),
    key("EC_GHz", Some("4.94"), "large-junction charging energy e²/2C_J over h"),
    key("CJ_fF", None, "large-junction capacitance; replaces EC_GHz"),
    key("alpha", Some("0.58"), "small-junction ratio"),
    key("Csh_fF", None, "shunt capacitance across the small junction (required; 11 fF reproduces a 3.54 GHz gap)"),
    key("LR_nH", Some("0.8986"), "resonator inductance"),
    key("CR_fF", Some("742.3"), "resonator capacitance"),
    key("Lc_nH", Some("0.5"), "shared coupler inductance"),
];

pub const TRUNCATION: &[Key] = &[
    key("ncut1", Some("5"), "charge cutoff of junction 1 (states -n..n)"),
    key("ncut3", Some("5"), "charge cutoff of junction 3"),
    key("n4", Some("10"), "oscillator levels of the coupler branch"),
    key("n6", Some("10"), "oscillator levels of the resonator"),
    key("dim_cap", Some("400000"), "largest Hilbert-space dimension allowed"),
    key("levels", Some("6"), "number of lowest levels reported (at least 4)"),
    key("qubit_ncut", Some("8"), "charge cutoff of the renormalized qubit-only model"),
    key("full_model", Some("true"), "diagonalize the four-mode circuit (false: qubit-only output)"),
];

pub const FLUX: &[Key] = &[
    key("flux_start_Phi0", Some("0.48"), "first external flux, in flux quanta"),
    key("flux_stop_Phi0", Some("0.52"), "last external flux, in flux quanta"),
    key("flux_points", Some("21"), "number of evenly spaced flux values"),
    key("flux_list_Phi0", None, "comma-separated flux values; replaces the start/stop/points sweep"),
];

pub const QRM: &[Key] = &[
    key("Delta_GHz", Some("5.707"), "qubit gap"),
    key("Ip_nA", Some("11.619"), "persistent current"),
    key("omega_r_GHz", Some("4.463"), "resonator frequency"),
    key("g_GHz", Some("0.578"), "coupling strength"),
    key("nfock", Some("40"), "photon-number cutoff"),
];

/// Same parameters as [`QRM`] but without defaults: a fit needs a stated guess.
pub const GUESS: &[Key] = &[
    key("Delta_GHz", None, "initial qubit gap"),
    key("Ip_nA", None, "initial persistent current"),
    key("omega_r_GHz", None, "initial resonator frequency"),
    key("g_GHz", None, "initial coupling strength"),
];

pub const BS: &[Key] = &[
    key("flux_Phi0", Some("0.5"), "external flux at which the shifts are evaluated"),
    key("bs_shift_MHz", None, "measured Bloch-Siegert shift to invert for g (optional)"),
];

pub const COUPLING: &[Key] = &[
    key("Ip_nA", None, "persistent current of the qubit (required)"),
    key("xi", Some("computed"), "`computed` or `unity` (the simple-limit mode-mixing factor)"),
    key("simple_limit_tol", Some("0.002"), "relative tolerance for the simple-limit cross-check"),
];

pub const MAP: &[Key] = &[
    key("map", None, "S21 map file, .csv (corner cell, flux row, frequency column) or .json"),
    key("map_scale", Some("db"), "magnitude scale of a CSV map: `db`, `linear` or `normalized`"),
];

pub const RIDGES: &[Key] = &[
    key("trace_map", Some("raw"), "map the ridges are traced on: `raw` or `normalized`"),
    key("prominence", Some("1"), "minimum peak prominence, in units of the traced map"),
    key("per_flux_max_peaks", Some("6"), "most peaks kept per flux column"),
    key("jump_cap_GHz", Some("0.1"), "largest frequency jump between neighbouring columns of one branch"),
    key("max_gap_columns", Some("1"), "flux columns a branch may skip"),
    key("min_branch_points", Some("3"), "shorter branches are dropped"),
];

pub const LABELS: &[Key] = &[
    key("labels", Some("w01,w02,w12,w03_half,sideband3"), "candidate transitions for labeling and overlay curves"),
    key("ambiguity_tol_GHz", Some("0.01"), "labels closer than this in mean |Δf| are ambiguous"),
];

pub const FIT: &[Key] = &[
    key("points", None, "transition-points CSV (flux,freq_GHz[,label,weight,branch]); replaces `map`"),
    key("fixed", Some(""), "comma-separated parameters held at the guess: omega_r, Delta, Ip, g"),
    key("sigma_GHz", None, "known frequency noise; scales the covariance instead of the residual variance"),
    key("max_iter", Some("200"), "iteration cap of the local search"),
    key("fit_nfock", None, "fixed photon-number cutoff (default: chosen automatically)"),
];

pub const OVERLAY: &[Key] = &[key("fit", None, "fit JSON whose parameters replace the Delta_GHz/Ip_nA/omega_r_GHz/g_GHz keys")];

/// Help text listing every key of `groups`.
pub fn keys_help(groups: &[&[Key]]) -> String {
    let mut s = String::from("Configuration keys (file lines `key = value`, `#` comments, or --set key=value):\n");
    for g in groups {
        for k in g.iter() {
            let d = match k.default {
                Some("") => " [default: empty]".to_string(),
                Some(d) => format!(" [default: {d}]"),
                None => String::new(),
            };
            s.push_str(&format!("  {:<20} {}{d}\n", k.name, k.help));
        }
    }
    s
}

pub struct Config {
    values: BTreeMap<String, String>,
    defaults: BTreeMap<&'static str, &'static str>,
}

impl Config {
    /// Reads `path` (if any), then applies `--set` overrides. Keys outside
    /// `groups` are rejected.
    pub fn load(path: Option<&Path>, sets: &[String], groups: &[&[Key]]) -> Result<Self, Failure> {
        let mut values = BTreeMap::new();
        if let Some(p) = path {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Failure::io(format!("cannot read config `{}`: {e}", p.display())))?;
            for (n, raw) in text.lines().enumerate() {
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (k, v) = split_pair(line)
                    .ok_or_else(|| Failure::validation(format!("{}:{}: expected `key = value`", p.display(), n + 1)))?;
                if values.insert(k.to_string(), v.to_string()).is_some() {
                    return Err(Failure::validation(format!("{}:{}: key `{k}` set twice", p.display(), n + 1)));
                }
            }
        }
        for s in sets {
            let (k, v) = split_pair(s).ok_or_else(|| Failure::validation(format!("--set `{s}`: expected key=value")))?;
            values.insert(k.to_string(), v.to_string());
        }
        let mut defaults = BTreeMap::new();
        for g in groups {
            for k in g.iter() {
                if let Some(d) = k.default {
                    defaults.insert(k.name, d);
                }
            }
        }
        for k in values.keys() {
            if !groups.iter().any(|g| g.iter().any(|x| x.name == k)) {
                return Err(Failure::validation(format!("unknown configuration key `{k}`")));
            }
        }
        Ok(Self { values, defaults })
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.values.insert(key.to_string(), value.into());
    }

    pub fn is_set(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values
            .get(key)
            .map(String::as_str)
            .or_else(|| self.defaults.get(key).copied())
    }

    pub fn require(&self, key: &str) -> Result<&str, Failure> {
        self.get(key)
            .ok_or_else(|| Failure::validation(format!("missing parameter `{key}`")))
    }

    pub fn f64(&self, key: &str) -> Result<f64, Failure> {
        parse_f64(key, self.require(key)?)
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>, Failure> {
        self.get(key).map(|v| parse_f64(key, v)).transpose()
    }

    pub fn usize(&self, key: &str) -> Result<usize, Failure> {
        let v = self.require(key)?;
        v.parse()
            .map_err(|_| Failure::validation(format!("key `{key}`: `{v}` is not a non-negative integer")))
    }

    pub fn opt_usize(&self, key: &str) -> Result<Option<usize>, Failure> {
        if self.get(key).is_some() {
            self.usize(key).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn bool(&self, key: &str) -> Result<bool, Failure> {
        match self.require(key)? {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            v => Err(Failure::validation(format!("key `{key}`: `{v}` is not true/false"))),
        }
    }

    pub fn list(&self, key: &str) -> Vec<String> {
        self.get(key)
            .unwrap_or("")
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect()
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>, Failure> {
        self.list(key).iter().map(|v| parse_f64(key, v)).collect()
    }

    /// Every key with a value after defaults, for provenance.
    pub fn resolved(&self) -> BTreeMap<String, String> {
        let mut out: BTreeMap<String, String> = self.defaults.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        out.extend(self.values.clone());
        out
    }
}

fn split_pair(s: &str) -> Option<(&str, &str)> {
    let (k, v) = s.split_once('=')?;
    let k = k.trim();
    (!k.is_empty()).then_some((k, v.trim()))
}

fn parse_f64(key: &str, v: &str) -> Result<f64, Failure> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(Failure::validation(format!("key `{key}`: `{v}` is not a finite number"))),
    }
}
