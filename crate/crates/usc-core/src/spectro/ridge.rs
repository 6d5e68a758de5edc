//! Peak picking per flux column and linking of peaks into branches.

use serde::{Deserialize, Serialize};

use super::map::S21Map;
use super::points::{TransitionPoint, TransitionPoints};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RidgeOptions {
    /// Minimum topographic prominence, in map units.
    pub prominence: f64,
    pub per_flux_max_peaks: usize,
    /// Largest frequency jump between neighbouring columns on one branch, GHz.
    pub jump_cap_ghz: f64,
    /// Columns a branch may skip before it is closed.
    pub max_gap: usize,
    /// Branches shorter than this are dropped.
    pub min_branch_len: usize,
}

impl Default for RidgeOptions {
    fn default() -> Self {
        Self {
            prominence: 1.0,
            per_flux_max_peaks: 6,
            jump_cap_ghz: 0.1,
            max_gap: 1,
            min_branch_len: 3,
        }
    }
}

impl RidgeOptions {
    fn validate(&self) -> Result<()> {
        if !(self.prominence >= 0.0 && self.prominence.is_finite()) {
            return Err(Error::param("prominence", "must be non-negative"));
        }
        if self.per_flux_max_peaks == 0 {
            return Err(Error::param("per_flux_max_peaks", "must be at least 1"));
        }
        if !(self.jump_cap_ghz > 0.0) {
            return Err(Error::param("jump_cap_GHz", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Peak {
    freq: f64,
    height: f64,
}

/// Local maxima of one column with their prominence, refined to sub-pixel
/// frequency by a parabola through the three samples around the maximum.
fn column_peaks(freq: &[f64], col: &[f64], min_prom: f64, max_peaks: usize) -> Vec<Peak> {
    let n = col.len();
    let mut peaks = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if col[i] > col[i - 1] {
            // plateau: advance to its end
            let mut j = i;
            while j + 1 < n && col[j + 1] == col[i] {
                j += 1;
            }
            if j + 1 < n && col[j + 1] < col[i] {
                let h = col[i];
                let mut left_min = h;
                let mut k = i;
                while k > 0 && col[k - 1] <= h {
                    k -= 1;
                    left_min = left_min.min(col[k]);
                }
                let mut right_min = h;
                let mut k = j;
                while k + 1 < n && col[k + 1] <= h {
                    k += 1;
                    right_min = right_min.min(col[k]);
                }
                let prom = h - left_min.max(right_min);
                if prom >= min_prom && prom > 0.0 {
                    let c = (i + j) / 2;
                    let mut f = freq[c];
                    if i == j {
                        let (a, b, d) = (col[i - 1], col[i], col[i + 1]);
                        let den = a - 2.0 * b + d;
                        if den < 0.0 {
                            let shift = 0.5 * (a - d) / den;
                            let step = if shift >= 0.0 { freq[i + 1] - freq[i] } else { freq[i] - freq[i - 1] };
                            f += shift * step;
                        }
                    }
                    peaks.push(Peak { freq: f, height: prom });
                }
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    peaks.sort_by(|a, b| b.height.total_cmp(&a.height));
    peaks.truncate(max_peaks);
    peaks.sort_by(|a, b| a.freq.total_cmp(&b.freq));
    peaks
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    /// (flux, frequency in GHz), flux ascending.
    pub points: Vec<(f64, f64)>,
}

/// Traces ridges of a normalized map. An empty result is not an error.
pub fn extract_ridges(map: &S21Map, opts: &RidgeOptions) -> Result<Vec<Branch>> {
    opts.validate()?;
    let nf = map.n_freq();
    if nf < 3 {
        return Ok(Vec::new());
    }
    struct Open {
        pts: Vec<(f64, f64)>,
        last_col: usize,
    }
    let mut open: Vec<Open> = Vec::new();
    let mut done: Vec<Vec<(f64, f64)>> = Vec::new();
    for j in 0..map.n_flux() {
        let col: Vec<f64> = map.magnitude.iter().map(|r| r[j]).collect();
        let peaks = column_peaks(&map.freq_ghz, &col, opts.prominence, opts.per_flux_max_peaks);
        // greedy matching by increasing distance
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (b, br) in open.iter().enumerate() {
            let last = br.pts.last().unwrap().1;
            for (p, pk) in peaks.iter().enumerate() {
                let d = (pk.freq - last).abs();
                if d <= opts.jump_cap_ghz {
                    pairs.push((d, b, p));
                }
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut used_b = vec![false; open.len()];
        let mut used_p = vec![false; peaks.len()];
        for (_, b, p) in pairs {
            if !used_b[b] && !used_p[p] {
                used_b[b] = true;
                used_p[p] = true;
                open[b].pts.push((map.flux[j], peaks[p].freq));
                open[b].last_col = j;
            }
        }
        for (p, pk) in peaks.iter().enumerate() {
            if !used_p[p] {
                open.push(Open {
                    pts: vec![(map.flux[j], pk.freq)],
                    last_col: j,
                });
            }
        }
        let (keep, close): (Vec<Open>, Vec<Open>) = open.into_iter().partition(|b| j - b.last_col <= opts.max_gap);
        done.extend(close.into_iter().map(|b| b.pts));
        open = keep;
    }
    done.extend(open.into_iter().map(|b| b.pts));
    let mut branches: Vec<Branch> = done
        .into_iter()
        .filter(|p| p.len() >= opts.min_branch_len)
        .map(|points| Branch { points })
        .collect();
    branches.sort_by(|a, b| {
        let ka = (a.points[0].0, a.points[0].1);
        let kb = (b.points[0].0, b.points[0].1);
        ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
    });
    Ok(branches)
}

/// Unlabeled points tagged with their branch index.
pub fn branches_to_points(branches: &[Branch]) -> TransitionPoints {
    let points = branches
        .iter()
        .enumerate()
        .flat_map(|(b, br)| {
            br.points.iter().map(move |&(flux, freq_ghz)| TransitionPoint {
                flux,
                freq_ghz,
                label: None,
                weight: 1.0,
                branch: Some(b),
            })
        })
        .collect();
    TransitionPoints { points }
}
