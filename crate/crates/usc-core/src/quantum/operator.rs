//! Square complex operators stored in compressed sparse row form.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Default cap on the dimension of composite operators.
pub const DEFAULT_DIM_CAP: usize = 400_000;

/// A square complex matrix in CSR layout. Column indices are sorted within
/// each row and explicit zeros are not stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            row_ptr: vec![0; dim + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut rows = Vec::with_capacity(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            rows.push(vec![(i, C64::new(d, 0.0))]);
        }
        Self::from_rows(diag.len(), rows)
    }

    /// Builds an operator from `(row, col, value)` triplets; duplicates are
    /// summed.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); dim];
        for (r, c, v) in triplets {
            assert!(r < dim && c < dim, "triplet ({r}, {c}) out of range for dim {dim}");
            let row = &mut rows[r];
            match row.last_mut() {
                Some((lc, lv)) if *lc == c => *lv += v,
                _ => row.push((c, v)),
            }
        }
        Self::from_rows(dim, rows)
    }

    fn from_rows(dim: usize, rows: Vec<Vec<(usize, C64)>>) -> Self {
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (c, v) in row {
                if v != C64::new(0.0, 0.0) {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            dim,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn from_dense(m: &DMatrix<C64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "operator must be square");
        let n = m.nrows();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| (j, m[(i, j)])).collect())
            .collect();
        Self::from_rows(n, rows)
    }

    pub fn from_real_dense(m: &DMatrix<f64>) -> Self {
        Self::from_dense(&m.map(|x| C64::new(x, 0.0)))
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (i, j, v) in self.iter() {
            m[(i, j)] = v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterates over stored entries as `(row, col, value)`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |p| (i, self.col_idx[p], self.values[p]))
        })
    }

    fn row(&self, i: usize) -> (&[usize], &[C64]) {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[a..b], &self.values[a..b])
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(p) => vals[p],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest entry magnitude, ‖A‖_max.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn adjoint(&self) -> Self {
        let trip = self.iter().map(|(i, j, v)| (j, i, v.conj())).collect();
        Self::from_triplets(self.dim, trip)
    }

    /// ‖A − A†‖_max.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, j, v) in self.iter() {
            worst = worst.max((v - self.get(j, i).conj()).norm());
        }
        worst
    }

    /// Checks ‖A − A†‖_max ≤ `rel_tol`·‖A‖_max.
    pub fn check_hermitian(&self, rel_tol: f64) -> Result<()> {
        let deviation = self.hermiticity_deviation();
        let tolerance = rel_tol * self.max_abs();
        if deviation > tolerance {
            return Err(Error::NotHermitian {
                deviation,
                tolerance,
            });
        }
        Ok(())
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out.prune();
        out
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    fn prune(&mut self) {
        if self.values.iter().all(|v| *v != C64::new(0.0, 0.0)) {
            return;
        }
        let rows = (0..self.dim)
            .map(|i| {
                let (c, v) = self.row(i);
                c.iter().copied().zip(v.iter().copied()).collect()
            })
            .collect();
        *self = Self::from_rows(self.dim, rows);
    }

    /// `self + s·other`, merging rows.
    pub fn add_scaled(&self, other: &Operator, s: C64) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in operator sum");
        let mut row_ptr = Vec::with_capacity(self.dim + 1);
        let mut col_idx = Vec::with_capacity(self.nnz() + other.nnz());
        let mut values = Vec::with_capacity(self.nnz() + other.nnz());
        row_ptr.push(0);
        for i in 0..self.dim {
            let (ca, va) = self.row(i);
            let (cb, vb) = other.row(i);
            let (mut p, mut q) = (0, 0);
            while p < ca.len() || q < cb.len() {
                let (c, v) = if q >= cb.len() || (p < ca.len() && ca[p] < cb[q]) {
                    p += 1;
                    (ca[p - 1], va[p - 1])
                } else if p >= ca.len() || cb[q] < ca[p] {
                    q += 1;
                    (cb[q - 1], s * vb[q - 1])
                } else {
                    p += 1;
                    q += 1;
                    (ca[p - 1], va[p - 1] + s * vb[q - 1])
                };
                if v != C64::new(0.0, 0.0) {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            dim: self.dim,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Sparse matrix product `self · other`.
    pub fn matmul(&self, other: &Operator) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in operator product");
        let mut rows = Vec::with_capacity(self.dim);
        let mut acc = vec![C64::new(0.0, 0.0); self.dim];
        let mut touched = vec![false; self.dim];
        let mut cols: Vec<usize> = Vec::new();
        for i in 0..self.dim {
            let (ca, va) = self.row(i);
            for (&k, &a) in ca.iter().zip(va) {
                let (cb, vb) = other.row(k);
                for (&j, &b) in cb.iter().zip(vb) {
                    if !touched[j] {
                        touched[j] = true;
                        cols.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            cols.sort_unstable();
            let row = cols
                .iter()
                .map(|&j| {
                    let v = acc[j];
                    acc[j] = C64::new(0.0, 0.0);
                    touched[j] = false;
                    (j, v)
                })
                .collect();
            cols.clear();
            rows.push(row);
        }
        Self::from_rows(self.dim, rows)
    }

    /// Kronecker product `self ⊗ other`; `self` indexes the slow (outer) mode.
    pub fn kron(&self, other: &Operator) -> Self {
        let nb = other.dim;
        let dim = self.dim * nb;
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut col_idx = Vec::with_capacity(self.nnz() * other.nnz());
        let mut values = Vec::with_capacity(self.nnz() * other.nnz());
        row_ptr.push(0);
        for ia in 0..self.dim {
            let (ca, va) = self.row(ia);
            for ib in 0..nb {
                let (cb, vb) = other.row(ib);
                for (&ja, &a) in ca.iter().zip(va) {
                    for (&jb, &b) in cb.iter().zip(vb) {
                        let v = a * b;
                        if v != C64::new(0.0, 0.0) {
                            col_idx.push(ja * nb + jb);
                            values.push(v);
                        }
                    }
                }
                row_ptr.push(col_idx.len());
            }
        }
        Self {
            dim,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// `y ← A·x`.
    pub fn apply(&self, x: &[C64], y: &mut [C64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        for (i, yi) in y.iter_mut().enumerate() {
            let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
            let mut s = C64::new(0.0, 0.0);
            for p in a..b {
                s += self.values[p] * x[self.col_idx[p]];
            }
            *yi = s;
        }
    }

    /// ⟨u|A|v⟩.
    pub fn expectation(&self, u: &[C64], v: &[C64]) -> C64 {
        let mut av = vec![C64::new(0.0, 0.0); self.dim];
        self.apply(v, &mut av);
        u.iter().zip(&av).map(|(a, b)| a.conj() * b).sum()
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        self.add_scaled(rhs, C64::new(1.0, 0.0))
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self.add_scaled(rhs, C64::new(-1.0, 0.0))
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.matmul(rhs)
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        self.scale_real(rhs)
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scale_real(-1.0)
    }
}

/// Kronecker product of `factors` in the given mode order, refusing to build
/// anything whose dimension exceeds `cap`.
pub fn tensor_embed_capped(factors: &[&Operator], cap: usize) -> Result<Operator> {
    if factors.is_empty() {
        return Err(Error::InvalidBasis("tensor product of zero factors".into()));
    }
    let dim = total_dim(factors.iter().map(|f| f.dim()))?;
    if dim > cap {
        return Err(Error::TruncationTooLarge { dim, cap });
    }
    let mut out = factors[0].clone();
    for f in &factors[1..] {
        out = out.kron(f);
    }
    Ok(out)
}

/// [`tensor_embed_capped`] with [`DEFAULT_DIM_CAP`].
pub fn tensor_embed(factors: &[&Operator]) -> Result<Operator> {
    tensor_embed_capped(factors, DEFAULT_DIM_CAP)
}

/// Product of mode dimensions with overflow reported as an oversize error.
pub fn total_dim(dims: impl IntoIterator<Item = usize>) -> Result<usize> {
    dims.into_iter().try_fold(1usize, |acc, d| {
        acc.checked_mul(d).ok_or(Error::TruncationTooLarge {
            dim: usize::MAX,
            cap: DEFAULT_DIM_CAP,
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_kron_identity() {
        let i6 = tensor_embed(&[&Operator::identity(2), &Operator::identity(3)]).unwrap();
        assert_eq!(i6, Operator::identity(6));
    }

    #[test]
    fn kron_of_diagonals_hand_expanded() {
        // diag(0,1) ⊗ diag(0,2): first factor is the outer index.
        let a = Operator::diagonal(&[0.0, 1.0]);
        let b = Operator::diagonal(&[0.0, 2.0]);
        let k = tensor_embed(&[&a, &b]).unwrap().to_dense();
        let expect = [0.0, 0.0, 0.0, 2.0];
        for i in 0..4 {
            for j in 0..4 {
                let e = if i == j { expect[i] } else { 0.0 };
                assert_eq!(k[(i, j)], c(e, 0.0));
            }
        }
        // with I inserted the Kronecker sum spectrum is all pair sums
        let ks = &tensor_embed(&[&a, &Operator::identity(2)]).unwrap()
            + &tensor_embed(&[&Operator::identity(2), &b]).unwrap();
        let mut d: Vec<f64> = (0..4).map(|i| ks.get(i, i).re).collect();
        d.sort_by(f64::total_cmp);
        assert_eq!(d, vec![0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn cap_is_enforced() {
        let a = Operator::identity(100);
        let err = tensor_embed_capped(&[&a, &a, &a], 1000).unwrap_err();
        assert!(matches!(err, Error::TruncationTooLarge { dim: 1_000_000, cap: 1000 }));
    }

    #[test]
    fn products_and_sums_match_dense() {
        let mut m1 = DMatrix::zeros(3, 3);
        let mut m2 = DMatrix::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                m1[(i, j)] = c((i * 3 + j) as f64 - 4.0, (i as f64) - (j as f64) * 0.5);
                m2[(i, j)] = c(((i + 2 * j) % 3) as f64, 0.25 * i as f64);
            }
        }
        let (a, b) = (Operator::from_dense(&m1), Operator::from_dense(&m2));
        assert!(((&a * &b).to_dense() - &m1 * &m2).norm() < 1e-12);
        assert!(((&a + &b).to_dense() - (&m1 + &m2)).norm() < 1e-12);
        assert!(((&a - &a).nnz()) == 0);
        assert!((a.adjoint().to_dense() - m1.adjoint()).norm() < 1e-12);
        let x: Vec<C64> = (0..3).map(|i| c(i as f64, 1.0)).collect();
        let mut y = vec![C64::default(); 3];
        a.apply(&x, &mut y);
        let yd = &m1 * nalgebra::DVector::from_vec(x.clone());
        for i in 0..3 {
            assert!((y[i] - yd[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn hermiticity_check() {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = c(0.0, 1.0);
        m[(1, 0)] = c(0.0, -1.0);
        let op = Operator::from_dense(&m);
        assert!(op.check_hermitian(1e-12).is_ok());
        m[(1, 0)] = c(0.0, 1.0);
        let op = Operator::from_dense(&m);
        assert!(matches!(op.check_hermitian(1e-12), Err(Error::NotHermitian { .. })));
    }
}
