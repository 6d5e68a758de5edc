//! Levenberg-Marquardt fit of the Rabi model to labeled transition points.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::points::{TransitionPoint, TransitionPoints};
use crate::error::{Error, Result};
use crate::reduced::rabi::{rabi_levels_with_gradients, transitions_fixed, Model, QRMParams, MAX_NFOCK};
use crate::transition::TransitionLabel;

/// Largest model change on doubling the cutoff accepted by the automatic choice, GHz.
pub const FOCK_TOL_GHZ: f64 = 1e-9;

pub const PARAM_NAMES: [&str; 4] = ["omega_r_GHz", "Delta_GHz", "Ip_nA", "g_GHz"];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// `true` marks a parameter as free; order (ω_r, Δ, I_p, g).
    pub free: [bool; 4],
    pub max_iter: usize,
    /// Stop when an accepted step lowers the objective by less than this fraction.
    pub ftol: f64,
    /// Stop when the step is this small relative to the parameters.
    pub xtol: f64,
    /// Known noise level; when set the covariance is σ²(JᵀWJ)⁻¹ instead of
    /// being scaled by the residual variance.
    pub sigma_ghz: Option<f64>,
    /// Fixed Fock cutoff; when `None` the smallest cutoff that changes the
    /// model by less than [`FOCK_TOL_GHZ`] on doubling is used.
    pub nfock: Option<usize>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            free: [true; 4],
            max_iter: 200,
            ftol: 1e-14,
            xtol: 1e-12,
            sigma_ghz: None,
            nfock: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitIteration {
    pub iteration: usize,
    /// ½Σw·r² after the step if accepted, otherwise the rejected trial value.
    pub objective: f64,
    pub lambda: f64,
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: QRMParams,
    /// 1σ, same order as [`PARAM_NAMES`]; zero for fixed parameters.
    pub uncertainties: [f64; 4],
    pub covariance: [[f64; 4]; 4],
    pub free: [bool; 4],
    /// √(Σ r²/N) over unweighted residuals, GHz.
    pub residual_rms_ghz: f64,
    pub objective: f64,
    pub n_points: usize,
    pub dof: usize,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<FitIteration>,
    /// Largest model change on the data when the Fock cutoff is doubled, GHz.
    pub fock_change_ghz: f64,
}

impl FitResult {
    pub fn value(&self, i: usize) -> f64 {
        param_vec(&self.params)[i]
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn param_vec(p: &QRMParams) -> [f64; 4] {
    [p.omega_r_ghz, p.delta_ghz, p.ip_na, p.g_ghz]
}

fn with_params(base: &QRMParams, v: &[f64; 4]) -> QRMParams {
    QRMParams {
        omega_r_ghz: v[0],
        delta_ghz: v[1],
        ip_na: v[2],
        g_ghz: v[3],
        ..*base
    }
}

struct Data<'a> {
    points: Vec<&'a TransitionPoint>,
    labels: Vec<TransitionLabel>,
    /// Unique fluxes and, per point, the index into them.
    fluxes: Vec<f64>,
    flux_of: Vec<usize>,
    sqrt_w: Vec<f64>,
}

impl<'a> Data<'a> {
    fn new(points: &'a TransitionPoints) -> Result<Self> {
        let mut pts = Vec::new();
        let mut labels = Vec::new();
        for (i, p) in points.points.iter().enumerate() {
            let label = p.label.ok_or_else(|| {
                Error::param("points", format!("point {i} has no transition label; label the points before fitting"))
            })?;
            pts.push(p);
            labels.push(label);
        }
        let mut index: BTreeMap<u64, usize> = BTreeMap::new();
        let mut fluxes = Vec::new();
        let mut flux_of = Vec::new();
        for p in &pts {
            let k = *index.entry(p.flux.to_bits()).or_insert_with(|| {
                fluxes.push(p.flux);
                fluxes.len() - 1
            });
            flux_of.push(k);
        }
        let sqrt_w = pts.iter().map(|p| p.weight.sqrt()).collect();
        Ok(Self {
            points: pts,
            labels,
            fluxes,
            flux_of,
            sqrt_w,
        })
    }

    fn n(&self) -> usize {
        self.points.len()
    }

    /// Weighted residuals √w(f_obs − f_model) and, when asked, the
    /// model gradient ∂f_model/∂θ per point.
    fn evaluate(&self, p: &QRMParams, with_grad: bool) -> (DVector<f64>, Option<DMatrix<f64>>) {
        let per_flux: Vec<([f64; 4], [[f64; 4]; 4])> =
            self.fluxes.iter().map(|&f| rabi_levels_with_gradients(p, f)).collect();
        let mut r = DVector::zeros(self.n());
        let mut g = with_grad.then(|| DMatrix::zeros(self.n(), 4));
        for i in 0..self.n() {
            let (e, de) = &per_flux[self.flux_of[i]];
            let c = self.labels[i].level_weights();
            let model: f64 = (0..4).map(|k| c[k] * e[k]).sum();
            r[i] = self.sqrt_w[i] * (self.points[i].freq_ghz - model);
            if let Some(g) = g.as_mut() {
                for j in 0..4 {
                    g[(i, j)] = (0..4).map(|k| c[k] * de[k][j]).sum();
                }
            }
        }
        (r, g)
    }
}

fn free_indices(free: &[bool; 4]) -> Vec<usize> {
    (0..4).filter(|&i| free[i]).collect()
}

/// Jacobian of the weighted residuals restricted to free parameters.
fn residual_jacobian(data: &Data, grad: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(data.n(), idx.len(), |i, j| -data.sqrt_w[i] * grad[(i, idx[j])])
}

fn check_rank(jac: &DMatrix<f64>, idx: &[usize]) -> Result<()> {
    let norms: Vec<f64> = jac.column_iter().map(|c| c.norm()).collect();
    if let Some(j) = norms.iter().position(|&n| n == 0.0) {
        return Err(Error::Rank(format!("the data carry no information on {}", PARAM_NAMES[idx[j]])));
    }
    let scaled = DMatrix::from_fn(jac.nrows(), jac.ncols(), |i, j| jac[(i, j)] / norms[j]);
    let sv = scaled.singular_values();
    let (lo, hi) = (sv.min(), sv.max());
    if lo <= 1e-10 * hi {
        return Err(Error::Rank(format!(
            "Jacobian is rank deficient (singular value ratio {:e})",
            lo / hi
        )));
    }
    Ok(())
}

fn fock_change(data: &Data, p: &QRMParams) -> f64 {
    let doubled = p.with_nfock(2 * p.nfock);
    data.fluxes
        .iter()
        .map(|&f| {
            let a = transitions_fixed(p, f, Model::Rabi);
            let b = transitions_fixed(&doubled, f, Model::Rabi);
            a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

fn auto_nfock(data: &Data, p: &QRMParams, from: usize) -> usize {
    let mut nf = from.max(8);
    while nf < MAX_NFOCK && fock_change(data, &p.with_nfock(nf)) >= FOCK_TOL_GHZ {
        nf *= 2;
    }
    nf.min(MAX_NFOCK)
}

struct Run {
    params: QRMParams,
    r: DVector<f64>,
    jac: DMatrix<f64>,
    cost: f64,
    trace: Vec<FitIteration>,
    iterations: usize,
    converged: bool,
}

fn levenberg_marquardt(data: &Data, start: QRMParams, idx: &[usize], opts: &FitOptions) -> Result<Run> {
    let mut theta = param_vec(&start);
    let mut params = start;
    let (mut r, grad) = data.evaluate(&params, true);
    let mut cost = 0.5 * r.norm_squared();
    let mut jac = residual_jacobian(data, grad.as_ref().unwrap(), idx);
    if !idx.is_empty() {
        check_rank(&jac, idx)?;
    }
    let mut trace = Vec::new();
    let mut lambda = -1.0;
    let mut converged = idx.is_empty() || cost == 0.0;
    let mut iterations = 0;

    while !converged && iterations < opts.max_iter {
        iterations += 1;
        let a = jac.transpose() * &jac;
        let b = -(jac.transpose() * &r);
        if lambda < 0.0 {
            lambda = 1e-3;
        }
        let mut accepted = false;
        while !accepted {
            let mut m = a.clone();
            for k in 0..idx.len() {
                m[(k, k)] += lambda * a[(k, k)].max(1e-300);
            }
            let step = match m.cholesky() {
                Some(ch) => ch.solve(&b),
                None => {
                    lambda *= 4.0;
                    continue;
                }
            };
            let mut trial = theta;
            for (k, &i) in idx.iter().enumerate() {
                trial[i] += step[k];
            }
            let tp = with_params(&start, &trial);
            let ok = tp.omega_r_ghz > 0.0 && trial.iter().all(|v| v.is_finite());
            let tcost = if ok { 0.5 * data.evaluate(&tp, false).0.norm_squared() } else { f64::INFINITY };
            if tcost < cost {
                trace.push(FitIteration { iteration: iterations, objective: tcost, lambda, accepted: true });
                let scale = idx.iter().map(|&i| theta[i] * theta[i]).sum::<f64>().sqrt();
                let small_step = step.norm() <= opts.xtol * (scale + opts.xtol);
                let small_gain = cost - tcost <= opts.ftol * cost;
                theta = trial;
                params = tp;
                cost = tcost;
                let (nr, ng) = data.evaluate(&params, true);
                r = nr;
                jac = residual_jacobian(data, ng.as_ref().unwrap(), idx);
                lambda = (lambda / 3.0).max(1e-15);
                accepted = true;
                converged = small_step || small_gain || cost == 0.0;
            } else {
                trace.push(FitIteration { iteration: iterations, objective: tcost, lambda, accepted: false });
                lambda *= 4.0;
                if lambda > 1e15 {
                    // no descent direction left at working precision
                    converged = true;
                    break;
                }
            }
        }
    }
    Ok(Run { params, r, jac, cost, trace, iterations, converged })
}

pub fn fit_qrm(points: &TransitionPoints, guess: &QRMParams, opts: &FitOptions) -> Result<FitResult> {
    let mut start = *guess;
    if let Some(nf) = opts.nfock {
        start.nfock = nf;
    }
    start.validate()?;
    let data = Data::new(points)?;
    let idx = free_indices(&opts.free);
    let n = data.n();
    if n < 4 {
        return Err(Error::Rank(format!("need at least 4 labeled points, got {n}")));
    }
    if data.fluxes.len() < 2 {
        return Err(Error::Rank("points must span at least 2 flux values".into()));
    }
    if idx.len() > n {
        return Err(Error::Rank(format!("{} free parameters but only {n} points", idx.len())));
    }
    if opts.nfock.is_none() {
        start.nfock = auto_nfock(&data, &start, 8);
    }

    let mut run = levenberg_marquardt(&data, start, &idx, opts)?;
    let mut fock_change_ghz = fock_change(&data, &run.params);
    while opts.nfock.is_none() && fock_change_ghz >= FOCK_TOL_GHZ && run.params.nfock < MAX_NFOCK {
        // the optimum moved into a region the starting cutoff does not resolve
        let nf = auto_nfock(&data, &run.params, 2 * run.params.nfock);
        let restart = run.params.with_nfock(nf);
        let prev = std::mem::take(&mut run.trace);
        let its = run.iterations;
        run = levenberg_marquardt(&data, restart, &idx, opts)?;
        run.trace = prev.into_iter().chain(run.trace).collect();
        run.iterations += its;
        fock_change_ghz = fock_change(&data, &run.params);
    }
    let Run { mut params, r, jac, cost, trace, iterations, converged } = run;
    if !converged {
        return Err(Error::FitConvergence {
            iterations,
            trace: trace.iter().filter(|t| t.accepted).map(|t| t.objective).collect(),
        });
    }

    let dof = n - idx.len();
    let mut covariance = [[0.0; 4]; 4];
    let mut uncertainties = [0.0; 4];
    if !idx.is_empty() {
        check_rank(&jac, &idx)?;
        let s2 = match opts.sigma_ghz {
            Some(s) => s * s,
            None if dof > 0 => 2.0 * cost / dof as f64,
            None => 0.0,
        };
        let inv = (jac.transpose() * &jac)
            .try_inverse()
            .ok_or_else(|| Error::Rank("normal matrix is singular at the optimum".into()))?;
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                covariance[i][j] = s2 * inv[(a, b)];
            }
            uncertainties[i] = covariance[i][i].max(0.0).sqrt();
        }
    }
    // the spectrum is even in Δ, I_p and g
    params.delta_ghz = params.delta_ghz.abs();
    params.ip_na = params.ip_na.abs();
    params.g_ghz = params.g_ghz.abs();

    let unweighted: f64 = (0..n).map(|i| (r[i] / data.sqrt_w[i]).powi(2)).sum();

    Ok(FitResult {
        params,
        uncertainties,
        covariance,
        free: opts.free,
        residual_rms_ghz: (unweighted / n as f64).sqrt(),
        objective: cost,
        n_points: n,
        dof,
        iterations,
        converged,
        trace,
        fock_change_ghz,
    })
}

/// Model frequency for one labeled point.
pub fn model_frequency(p: &QRMParams, flux: f64, label: TransitionLabel) -> f64 {
    let t = transitions_fixed(p, flux, Model::Rabi);
    let i = TransitionLabel::ALL.iter().position(|&l| l == label).unwrap();
    t[i]
}
