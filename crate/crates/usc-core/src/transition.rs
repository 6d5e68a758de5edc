use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spectroscopic transitions tracked across spectra, fits and exports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransitionLabel {
    W01,
    W02,
    W12,
    /// Two-photon ω₀₃/2.
    W03Half,
    /// Three-photon blue sideband (ω₀₃ + ω₀₁)/3.
    Sideband3,
}

impl TransitionLabel {
    pub const ALL: [TransitionLabel; 5] = [
        TransitionLabel::W01,
        TransitionLabel::W02,
        TransitionLabel::W12,
        TransitionLabel::W03Half,
        TransitionLabel::Sideband3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TransitionLabel::W01 => "w01",
            TransitionLabel::W02 => "w02",
            TransitionLabel::W12 => "w12",
            TransitionLabel::W03Half => "w03_half",
            TransitionLabel::Sideband3 => "sideband3",
        }
    }

    /// Highest level index the transition touches.
    pub fn max_level(self) -> usize {
        match self {
            TransitionLabel::W01 => 1,
            TransitionLabel::W02 | TransitionLabel::W12 => 2,
            TransitionLabel::W03Half | TransitionLabel::Sideband3 => 3,
        }
    }

    /// Frequency from ascending levels `e` (at least `max_level() + 1` of them).
    pub fn from_levels(self, e: &[f64]) -> f64 {
        match self {
            TransitionLabel::W01 => e[1] - e[0],
            TransitionLabel::W02 => e[2] - e[0],
            TransitionLabel::W12 => e[2] - e[1],
            TransitionLabel::W03Half => (e[3] - e[0]) / 2.0,
            TransitionLabel::Sideband3 => (e[3] - e[0] + e[1] - e[0]) / 3.0,
        }
    }

    /// d(frequency)/d(E_n) for n = 0..=3.
    pub fn level_weights(self) -> [f64; 4] {
        match self {
            TransitionLabel::W01 => [-1.0, 1.0, 0.0, 0.0],
            TransitionLabel::W02 => [-1.0, 0.0, 1.0, 0.0],
            TransitionLabel::W12 => [0.0, -1.0, 1.0, 0.0],
            TransitionLabel::W03Half => [-0.5, 0.0, 0.0, 0.5],
            TransitionLabel::Sideband3 => [-2.0 / 3.0, 1.0 / 3.0, 0.0, 1.0 / 3.0],
        }
    }
}

impl fmt::Display for TransitionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TransitionLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TransitionLabel::ALL
            .into_iter()
            .find(|l| l.name() == s.trim())
            .ok_or_else(|| {
                Error::Parse(format!(
                    "unknown transition label `{s}` (expected one of w01, w02, w12, w03_half, sideband3)"
                ))
            })
    }
}
