//! Lowest eigenpairs of Hermitian operators.
//!
//! Small problems go through a dense Hermitian decomposition. Large ones use a
//! thick-restart Lanczos iteration with full (twice-applied classical
//! Gram-Schmidt) reorthogonalization, which keeps the projected matrix
//! Hermitian and makes restarts a plain Rayleigh-Ritz step.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::operator::Operator;
use crate::error::{Error, Result};

/// Relative hermiticity tolerance applied before every solve.
pub const HERMITIAN_TOL: f64 = 1e-12;

const RITZ_BLOCK: usize = 256;
const REORTH_RATIO: f64 = 0.717;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EigenMethod {
    /// Dense below `dense_max_dim`, Lanczos above.
    Auto,
    Dense,
    /// Dense solve of the 2N×2N real-symmetric embedding.
    RealEmbedding,
    Lanczos,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenOptions {
    pub method: EigenMethod,
    pub dense_max_dim: usize,
    /// Residual tolerance relative to max |H_ij|.
    pub rel_tol: f64,
    /// Krylov subspace size; 0 picks max(2k + 24, 48).
    pub ncv: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            method: EigenMethod::Auto,
            dense_max_dim: 400,
            rel_tol: 1e-10,
            ncv: 0,
            max_restarts: 5000,
            seed: 0x5eed_0f_1a9c,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EigenDiagnostics {
    pub method: String,
    pub restarts: usize,
    pub matvecs: usize,
    /// Largest ‖Hv − λv‖ over the returned pairs.
    pub max_residual: f64,
    pub norm_estimate: f64,
}

#[derive(Clone, Debug)]
pub struct Eigensystem {
    /// Ascending.
    pub values: Vec<f64>,
    /// Unit-norm eigenvectors, `vectors[i]` belongs to `values[i]`.
    pub vectors: Vec<Vec<C64>>,
    pub diagnostics: EigenDiagnostics,
}

impl Eigensystem {
    pub fn pairs(self) -> Vec<(f64, Vec<C64>)> {
        self.values.into_iter().zip(self.vectors).collect()
    }
}

/// The `k` lowest eigenpairs of a Hermitian operator, ascending.
pub fn eigs_hermitian(h: &Operator, k: usize) -> Result<Vec<(f64, Vec<C64>)>> {
    Ok(eigs_hermitian_with(h, k, &EigenOptions::default())?.pairs())
}

/// Eigenvalues only.
pub fn eigvals_hermitian(h: &Operator, k: usize, opts: &EigenOptions) -> Result<Vec<f64>> {
    Ok(eigs_hermitian_with(h, k, opts)?.values)
}

pub fn eigs_hermitian_with(h: &Operator, k: usize, opts: &EigenOptions) -> Result<Eigensystem> {
    let n = h.dim();
    if k == 0 || k > n {
        return Err(Error::param("k", format!("need 1 ≤ k ≤ {n}, got {k}")));
    }
    h.check_hermitian(HERMITIAN_TOL)?;
    let method = match opts.method {
        EigenMethod::Auto if n <= opts.dense_max_dim => EigenMethod::Dense,
        EigenMethod::Auto => EigenMethod::Lanczos,
        m => m,
    };
    // Lanczos needs room for a Krylov space larger than k.
    let method = if method == EigenMethod::Lanczos && n <= k + 2 {
        EigenMethod::Dense
    } else {
        method
    };
    let mut sys = match method {
        EigenMethod::Dense => dense_complex(h, k),
        EigenMethod::RealEmbedding => dense_real_embedding(h, k)?,
        _ => lanczos(h, k, opts)?,
    };
    let norm = h.max_abs();
    sys.diagnostics.norm_estimate = norm;
    sys.diagnostics.max_residual = max_residual(h, &sys.values, &sys.vectors);
    Ok(sys)
}

fn max_residual(h: &Operator, values: &[f64], vectors: &[Vec<C64>]) -> f64 {
    let mut y = vec![C64::new(0.0, 0.0); h.dim()];
    let mut worst: f64 = 0.0;
    for (lam, v) in values.iter().zip(vectors) {
        h.apply(v, &mut y);
        let r: f64 = y
            .iter()
            .zip(v)
            .map(|(a, b)| (a - b * lam).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(r);
    }
    worst
}

/// Ascending eigen-decomposition of a dense Hermitian matrix.
pub fn dense_hermitian_eigen(m: DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    (values, vectors)
}

/// Ascending eigenvalues of a dense real-symmetric matrix, with vectors.
pub fn dense_symmetric_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    (values, vectors)
}

fn dense_complex(h: &Operator, k: usize) -> Eigensystem {
    let (values, vecs) = dense_hermitian_eigen(h.to_dense());
    Eigensystem {
        values: values[..k].to_vec(),
        vectors: (0..k).map(|c| vecs.column(c).iter().copied().collect()).collect(),
        diagnostics: EigenDiagnostics {
            method: "dense".into(),
            ..Default::default()
        },
    }
}

/// Solves via M = [[A, −B], [B, A]] with H = A + iB. Every eigenvalue of H
/// appears twice in M; each real eigenvector (x, y) maps to x + iy, and a
/// cluster of 2d real vectors spans exactly d independent complex ones.
fn dense_real_embedding(h: &Operator, k: usize) -> Result<Eigensystem> {
    let n = h.dim();
    let hd = h.to_dense();
    let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = hd[(i, j)];
            m[(i, j)] = z.re;
            m[(i + n, j + n)] = z.re;
            m[(i, j + n)] = -z.im;
            m[(i + n, j)] = z.im;
        }
    }
    let (vals, vecs) = dense_symmetric_eigen(m);
    let scale = vals.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
    let cluster_tol = 1e-9 * scale;

    let mut values = Vec::with_capacity(k);
    let mut vectors: Vec<Vec<C64>> = Vec::with_capacity(k);
    let mut start = 0;
    while start < vals.len() && values.len() < k {
        let mut end = start + 1;
        while end < vals.len() && vals[end] - vals[end - 1] <= cluster_tol {
            end += 1;
        }
        let mean = vals[start..end].iter().sum::<f64>() / (end - start) as f64;
        let mut basis: Vec<Vec<C64>> = Vec::new();
        for c in start..end {
            let mut z: Vec<C64> = (0..n)
                .map(|i| C64::new(vecs[(i, c)], vecs[(i + n, c)]))
                .collect();
            for _ in 0..2 {
                for b in basis.iter().chain(vectors.iter()) {
                    let proj = dot(b, &z);
                    axpy(-proj, b, &mut z);
                }
            }
            let nz = norm(&z);
            // Each complex line carries norm² 1/2 per real vector; a partner
            // vector leaves only roundoff behind.
            if nz > 0.3 {
                z.iter_mut().for_each(|x| *x /= nz);
                basis.push(z);
            }
        }
        if 2 * basis.len() != end - start {
            return Err(Error::Unconverged(format!(
                "real embedding cluster of size {} at {mean} produced {} complex vectors",
                end - start,
                basis.len()
            )));
        }
        for z in basis {
            if values.len() < k {
                values.push(mean);
                vectors.push(z);
            }
        }
        start = end;
    }
    // Rayleigh quotients sharpen clustered means back to each vector.
    let mut y = vec![C64::new(0.0, 0.0); n];
    for (lam, v) in values.iter_mut().zip(&vectors) {
        h.apply(v, &mut y);
        *lam = dot(v, &y).re;
    }
    Ok(Eigensystem {
        values,
        vectors,
        diagnostics: EigenDiagnostics {
            method: "real-embedding".into(),
            ..Default::default()
        },
    })
}

/// Conjugate-linear in `a`. Four partial sums break the serial add chain.
fn dot(a: &[C64], b: &[C64]) -> C64 {
    let mut acc = [C64::new(0.0, 0.0); 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail: C64 = ca
        .remainder()
        .iter()
        .zip(cb.remainder())
        .map(|(x, y)| x.conj() * y)
        .sum();
    for (x, y) in ca.zip(cb) {
        for l in 0..4 {
            acc[l] += x[l].conj() * y[l];
        }
    }
    acc[0] + acc[1] + acc[2] + acc[3] + tail
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(alpha: C64, x: &[C64], y: &mut [C64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

fn start_vector(n: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n as u64);
    let mut v: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    v
}

/// Orthogonalizes `w` against `basis` and returns the summed coefficients.
///
/// `local` names basis indices to project out first (the three-term
/// recurrence neighbours). After one full classical Gram-Schmidt sweep a
/// second sweep runs only if the norm shrank enough to signal cancellation.
fn orthogonalize(basis: &[Vec<C64>], w: &mut [C64], local: &[usize]) -> Vec<C64> {
    let mut coef = vec![C64::new(0.0, 0.0); basis.len()];
    for &i in local {
        let c = dot(&basis[i], w);
        axpy(-c, &basis[i], w);
        coef[i] += c;
    }
    for _ in 0..2 {
        let before = norm(w);
        let c: Vec<C64> = basis.iter().map(|b| dot(b, w)).collect();
        for (b, ci) in basis.iter().zip(&c) {
            axpy(-ci, b, w);
        }
        coef.iter_mut().zip(&c).for_each(|(a, b)| *a += b);
        if norm(w) > REORTH_RATIO * before {
            break;
        }
    }
    coef
}

fn lanczos(h: &Operator, k: usize, opts: &EigenOptions) -> Result<Eigensystem> {
    let n = h.dim();
    let m = if opts.ncv == 0 { (2 * k + 24).max(48) } else { opts.ncv };
    let m = m.min(n - 1).max(k + 2);
    let norm_h = h.max_abs().max(f64::MIN_POSITIVE);
    let tol = opts.rel_tol * norm_h;

    let mut basis: Vec<Vec<C64>> = vec![start_vector(n, opts.seed)];
    let mut t = DMatrix::<C64>::zeros(m, m);
    let mut kept = 0;
    let mut matvecs = 0;
    let mut restarts = 0;
    let mut w = vec![C64::new(0.0, 0.0); n];
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(1));

    loop {
        let mut beta = 0.0;
        let mut j = kept;
        while j < m {
            h.apply(&basis[j], &mut w);
            matvecs += 1;
            let local: &[usize] = if j > kept { &[j, j - 1] } else { &[] };
            let coef = orthogonalize(&basis, &mut w, local);
            for (i, c) in coef.iter().enumerate() {
                if i == j {
                    t[(j, j)] = C64::new(c.re, 0.0);
                } else {
                    t[(i, j)] = *c;
                    t[(j, i)] = c.conj();
                }
            }
            beta = norm(&w);
            if beta <= 1e-14 * norm_h {
                // Invariant subspace: continue from a fresh orthogonal direction.
                w.iter_mut().for_each(|x| {
                    *x = C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
                });
                orthogonalize(&basis, &mut w, &[]);
                let nw = norm(&w);
                w.iter_mut().for_each(|x| *x /= nw);
                beta = 0.0;
                basis.push(w.clone());
            } else {
                basis.push(w.iter().map(|x| x / beta).collect());
            }
            j += 1;
        }

        let (theta, s) = dense_hermitian_eigen(t.clone());
        let resid: Vec<f64> = (0..m).map(|i| beta * s[(m - 1, i)].norm()).collect();
        let worst = resid[..k].iter().cloned().fold(0.0, f64::max);
        let done = worst <= tol;

        let keep = if done { k } else { k + (m - k) / 2 };
        // Blocked so each slab of the basis is reused from cache by every output.
        let mut ritz: Vec<Vec<C64>> = vec![vec![C64::new(0.0, 0.0); n]; keep];
        for lo in (0..n).step_by(RITZ_BLOCK) {
            let hi = (lo + RITZ_BLOCK).min(n);
            for (c, r) in ritz.iter_mut().enumerate() {
                for (row, v) in basis.iter().take(m).enumerate() {
                    axpy(s[(row, c)], &v[lo..hi], &mut r[lo..hi]);
                }
            }
        }
        if done {
            let vectors = ritz
                .into_iter()
                .map(|mut v| {
                    let nv = norm(&v);
                    v.iter_mut().for_each(|x| *x /= nv);
                    v
                })
                .collect();
            return Ok(Eigensystem {
                values: theta[..k].to_vec(),
                vectors,
                diagnostics: EigenDiagnostics {
                    method: "lanczos".into(),
                    restarts,
                    matvecs,
                    ..Default::default()
                },
            });
        }
        restarts += 1;
        if restarts > opts.max_restarts {
            return Err(Error::NoConvergence {
                iterations: restarts,
                matvecs,
                residual: worst,
                tolerance: tol,
            });
        }
        let residual_vec = basis.pop().expect("basis holds m + 1 vectors");
        basis = ritz;
        basis.push(residual_vec);
        t.fill(C64::new(0.0, 0.0));
        for (i, th) in theta.iter().take(keep).enumerate() {
            t[(i, i)] = C64::new(*th, 0.0);
        }
        kept = keep;
    }
}
