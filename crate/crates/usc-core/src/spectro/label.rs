use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::points::TransitionPoints;
use crate::error::{Error, Result};
use crate::reduced::rabi::{transitions_fixed, Model, QRMParams};
use crate::transition::TransitionLabel;

/// Two labels whose mean deviations differ by less than this are ambiguous, GHz.
pub const DEFAULT_AMBIGUITY_TOL_GHZ: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchAssignment {
    /// Branch index, or the point index for points without a branch.
    pub group: String,
    pub n_points: usize,
    /// Mean |Δf| against every candidate, ascending.
    pub candidates: Vec<(TransitionLabel, f64)>,
    pub label: Option<TransitionLabel>,
    pub ambiguous: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelReport {
    pub points: TransitionPoints,
    pub assignments: Vec<BranchAssignment>,
}

impl LabelReport {
    pub fn ambiguous(&self) -> impl Iterator<Item = &BranchAssignment> {
        self.assignments.iter().filter(|a| a.ambiguous)
    }
}

/// Assigns each branch the label whose model curve (Rabi model at `guess`)
/// is closest on average. Ambiguous branches keep no label and are flagged
/// in the report for manual override.
pub fn label_transitions(points: &TransitionPoints, guess: &QRMParams, ambiguity_tol_ghz: f64) -> Result<LabelReport> {
    label_transitions_among(points, guess, &TransitionLabel::ALL, ambiguity_tol_ghz)
}

/// As [`label_transitions`], choosing only among `candidates`.
pub fn label_transitions_among(
    points: &TransitionPoints,
    guess: &QRMParams,
    candidates: &[TransitionLabel],
    ambiguity_tol_ghz: f64,
) -> Result<LabelReport> {
    guess.validate()?;
    if candidates.is_empty() {
        return Err(Error::param("labels", "need at least one candidate label"));
    }
    let mut groups: BTreeMap<(u8, usize), Vec<usize>> = BTreeMap::new();
    for (i, p) in points.points.iter().enumerate() {
        let key = match p.branch {
            Some(b) => (0, b),
            None => (1, i),
        };
        groups.entry(key).or_default().push(i);
    }
    let mut cache: BTreeMap<u64, [f64; 5]> = BTreeMap::new();
    let mut out = points.clone();
    let mut assignments = Vec::new();
    for ((kind, id), idx) in groups {
        let mut dev = [0.0; 5];
        for &i in &idx {
            let p = &points.points[i];
            let model = *cache
                .entry(p.flux.to_bits())
                .or_insert_with(|| transitions_fixed(guess, p.flux, Model::Rabi));
            for (d, m) in dev.iter_mut().zip(model) {
                *d += (p.freq_ghz - m).abs();
            }
        }
        let mut cands: Vec<(TransitionLabel, f64)> = TransitionLabel::ALL
            .iter()
            .zip(dev)
            .filter(|(l, _)| candidates.contains(l))
            .map(|(&l, d)| (l, d / idx.len() as f64))
            .collect();
        cands.sort_by(|a, b| a.1.total_cmp(&b.1));
        let ambiguous = cands.len() > 1 && cands[1].1 - cands[0].1 < ambiguity_tol_ghz;
        let label = (!ambiguous).then_some(cands[0].0);
        for &i in &idx {
            out.points[i].label = label;
        }
        assignments.push(BranchAssignment {
            group: if kind == 0 { format!("branch {id}") } else { format!("point {id}") },
            n_points: idx.len(),
            candidates: cands,
            label,
            ambiguous,
        });
    }
    Ok(LabelReport {
        points: out,
        assignments,
    })
}
