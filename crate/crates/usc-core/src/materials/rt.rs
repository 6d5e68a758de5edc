//! Superconducting transition from a resistance-temperature curve.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fraction of the temperature span, counted from the top, whose median
/// resistance defines the onset.
pub const DEFAULT_ONSET_WINDOW: f64 = 0.10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RTCurve {
    temperature_k: Vec<f64>,
    resistance_ohm: Vec<f64>,
}

impl RTCurve {
    /// Sorts by temperature; repeated temperatures and negative or
    /// non-finite values are rejected.
    pub fn new(mut samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::param("RTCurve", "need at least two samples"));
        }
        for &(t, r) in &samples {
            if !t.is_finite() || !r.is_finite() || r < 0.0 {
                return Err(Error::param("RTCurve", format!("bad sample T={t} K, R={r} Ω")));
            }
        }
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(w) = samples.windows(2).find(|w| w[1].0 <= w[0].0) {
            return Err(Error::param("RTCurve", format!("repeated temperature {} K", w[0].0)));
        }
        let (temperature_k, resistance_ohm) = samples.into_iter().unzip();
        Ok(Self {
            temperature_k,
            resistance_ohm,
        })
    }

    /// Two columns (temperature_K, resistance_ohm); an optional non-numeric
    /// header line and `#` comments are skipped.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(r);
        let mut samples = Vec::new();
        for (i, rec) in rd.records().enumerate() {
            let rec = rec?;
            if rec.len() < 2 {
                return Err(Error::Parse(format!("R(T) row {} needs two columns", i + 1)));
            }
            let parsed = (rec[0].parse::<f64>(), rec[1].parse::<f64>());
            match parsed {
                (Ok(t), Ok(r)) => samples.push((t, r)),
                _ if i == 0 => continue,
                _ => return Err(Error::Parse(format!("R(T) row {}: `{}`, `{}`", i + 1, &rec[0], &rec[1]))),
            }
        }
        Self::new(samples)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            temperature_k: self.temperature_k.clone(),
            resistance_ohm: self.resistance_ohm.iter().map(|r| r * factor).collect(),
        }
    }

    pub fn temperatures(&self) -> &[f64] {
        &self.temperature_k
    }

    pub fn resistances(&self) -> &[f64] {
        &self.resistance_ohm
    }

    pub fn len(&self) -> usize {
        self.temperature_k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.temperature_k.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TcOptions {
    pub onset_window: f64,
}

impl Default for TcOptions {
    fn default() -> Self {
        Self {
            onset_window: DEFAULT_ONSET_WINDOW,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TcResult {
    pub tc_k: f64,
    /// T10 − T90.
    pub delta_tc_k: f64,
    /// Resistance down 10% from onset.
    pub t10_k: f64,
    /// Resistance down 90% from onset.
    pub t90_k: f64,
    pub onset_resistance_ohm: f64,
    /// ΔTc/2.
    pub tc_uncertainty_k: f64,
    pub onset_window: f64,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Temperatures where the linearly interpolated curve crosses `level`.
fn crossings(t: &[f64], r: &[f64], level: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 0..t.len() - 1 {
        let (a, b) = (r[i] - level, r[i + 1] - level);
        if a == 0.0 && b == 0.0 {
            continue;
        }
        // half-open so a sample sitting exactly on the level counts once
        if (a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0) || (i == 0 && a == 0.0) {
            let x = if a == b { t[i] } else { t[i] + (t[i + 1] - t[i]) * a / (a - b) };
            out.push(x);
        }
    }
    out
}

pub fn tc_from_rt_curve(curve: &RTCurve, opts: &TcOptions) -> Result<TcResult> {
    if !(opts.onset_window > 0.0 && opts.onset_window <= 1.0) {
        return Err(Error::param("onset_window", format!("must lie in (0, 1], got {}", opts.onset_window)));
    }
    let (t, r) = (curve.temperatures(), curve.resistances());
    let rmax = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let rmin = r.iter().copied().fold(f64::INFINITY, f64::min);
    if !(rmax >= 2.0 * rmin && rmax > 0.0) {
        return Err(Error::NoTransition(format!(
            "resistance spans only {rmin}–{rmax} Ω; a transition needs max ≥ 2·min"
        )));
    }
    let (tmin, tmax) = (t[0], t[t.len() - 1]);
    let cut = tmax - opts.onset_window * (tmax - tmin);
    let onset = median(t.iter().zip(r).filter(|(&ti, _)| ti >= cut).map(|(_, &ri)| ri).collect());
    let at = |frac: f64| -> Result<f64> {
        let level = frac * onset;
        let xs = crossings(t, r, level);
        match xs.len() {
            1 => Ok(xs[0]),
            0 => Err(Error::NoTransition(format!(
                "resistance never crosses {level} Ω ({:.0}% of onset {onset} Ω)",
                frac * 100.0
            ))),
            _ => Err(Error::AmbiguousTransition { level, crossings: xs }),
        }
    };
    let tc = at(0.5)?;
    let t10 = at(0.9)?;
    let t90 = at(0.1)?;
    let delta = t10 - t90;
    Ok(TcResult {
        tc_k: tc,
        delta_tc_k: delta,
        t10_k: t10,
        t90_k: t90,
        onset_resistance_ohm: onset,
        tc_uncertainty_k: 0.5 * delta,
        onset_window: opts.onset_window,
    })
}
