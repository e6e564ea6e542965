//! Dense square-matrix kernel, generic over the scalar kind.
//!
//! Determinants use fraction-free Bareiss elimination in the rational kind
//! (exact, with bounded intermediate growth) and partially pivoted LU in the
//! floating kinds. Inverses use Gauss-Jordan with the matching pivot policy.
//! On top of the kernel sit the two rank-one-update facts used by the
//! identity module: the matrix determinant lemma in its block form
//! |R + STU| = |R||T||T^-1 + U R^-1 S|, and the Sherman-Morrison inverse
//! update for R + s u^T.

use std::ops::Index;

use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarKind};

/// Relative pivot threshold for the floating kinds: a pivot counts as zero
/// when its magnitude is at most `PIVOT_EPS` times the row's initial
/// max-magnitude.
pub const PIVOT_EPS: f64 = 1e-12;

/// Immutable dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| S::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { S::one() } else { S::zero() })
    }

    /// Build a symmetric matrix from its upper triangle: `f` is called only
    /// for `i <= j` and the result mirrored, so the output is symmetric
    /// entry-for-entry even in floating arithmetic.
    pub fn symmetric_from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m.set(j, i, v.clone());
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<T: Scalar>(&self, mut f: impl FnMut(&S) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(&mut f).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Self::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() + other[(i, j)].clone()
        })
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Self::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() - other[(i, j)].clone()
        })
    }

    pub fn scale(&self, k: &S) -> Self {
        self.map(|v| k.clone() * v.clone())
    }

    pub fn neg(&self) -> Self {
        self.map(|v| -v.clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        Self::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = S::zero();
            for k in 0..self.cols {
                acc = acc + self[(i, k)].clone() * other[(k, j)].clone();
            }
            acc
        })
    }

    pub fn matvec(&self, v: &ColVector<S>) -> ColVector<S> {
        assert_eq!(self.cols, v.dim(), "matrix/vector dimension mismatch");
        ColVector::from_fn(self.rows, |i| {
            let mut acc = S::zero();
            for k in 0..self.cols {
                acc = acc + self[(i, k)].clone() * v[k].clone();
            }
            acc
        })
    }

    /// Copy of the sub-block with rows `r0..r1` and columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        Self::from_fn(r1 - r0, c1 - c0, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    pub fn col(&self, j: usize) -> ColVector<S> {
        ColVector::from_fn(self.rows, |i| self[(i, j)].clone())
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self[(i, j)] == self[(j, i)]))
    }
}

impl<S: Scalar> Index<(usize, usize)> for Matrix<S> {
    type Output = S;

    fn index(&self, (i, j): (usize, usize)) -> &S {
        self.get(i, j)
    }
}

/// Dense column vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ColVector<S> {
    data: Vec<S>,
}

impl<S: Scalar> ColVector<S> {
    pub fn from_vec(data: Vec<S>) -> Self {
        ColVector { data }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize) -> S) -> Self {
        ColVector {
            data: (0..dim).map(&mut f).collect(),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_fn(dim, |_| S::zero())
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, S> {
        self.data.iter()
    }

    pub fn map<T: Scalar>(&self, f: impl FnMut(&S) -> T) -> ColVector<T> {
        ColVector {
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Plain bilinear dot product; never conjugates.
    pub fn dot(&self, other: &Self) -> S {
        assert_eq!(self.dim(), other.dim(), "vector dimension mismatch");
        let mut acc = S::zero();
        for (a, b) in self.data.iter().zip(&other.data) {
            acc = acc + a.clone() * b.clone();
        }
        acc
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "vector dimension mismatch");
        Self::from_fn(self.dim(), |i| self[i].clone() + other[i].clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "vector dimension mismatch");
        Self::from_fn(self.dim(), |i| self[i].clone() - other[i].clone())
    }

    pub fn scale(&self, k: &S) -> Self {
        Self::from_fn(self.dim(), |i| k.clone() * self[i].clone())
    }

    /// Outer product a b^T as an (n x m) matrix.
    pub fn outer(&self, other: &Self) -> Matrix<S> {
        Matrix::from_fn(self.dim(), other.dim(), |i, j| {
            self[i].clone() * other[j].clone()
        })
    }

    /// v v^T, mirrored so the result is symmetric entry-for-entry.
    pub fn outer_self(&self) -> Matrix<S> {
        Matrix::symmetric_from_fn(self.dim(), |i, j| self[i].clone() * self[j].clone())
    }

    /// Matrix with this vector as its single column.
    pub fn as_column(&self) -> Matrix<S> {
        Matrix::from_fn(self.dim(), 1, |i, _| self[i].clone())
    }
}

impl<S: Scalar> Index<usize> for ColVector<S> {
    type Output = S;

    fn index(&self, i: usize) -> &S {
        &self.data[i]
    }
}

fn require_square<S: Scalar>(m: &Matrix<S>, what: &str) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::Dimension(format!(
            "{what} must be square, got {}x{}",
            m.rows(),
            m.cols()
        )))
    }
}

/// Determinant of a square matrix.
///
/// Exact (fraction-free Bareiss) in the rational kind, partially pivoted LU
/// in the floating kinds. A floating matrix whose best pivot falls below the
/// scaled threshold is reported as having determinant zero.
pub fn determinant<S: Scalar>(m: &Matrix<S>) -> Result<S> {
    require_square(m, "determinant input")?;
    match S::KIND {
        ScalarKind::Rational => Ok(bareiss_det(m)),
        ScalarKind::Float | ScalarKind::Complex => Ok(lu_det(m)),
    }
}

/// (Q + Q^T)/2. Each off-diagonal pair is averaged once and mirrored, so the
/// output is symmetric entry-for-entry in every kind.
pub fn symmetric_part<S: Scalar>(q: &Matrix<S>) -> Result<Matrix<S>> {
    require_square(q, "symmetric_part input")?;
    let half = S::from_ratio(1, 2);
    Ok(Matrix::symmetric_from_fn(q.rows(), |i, j| {
        half.clone() * (q[(i, j)].clone() + q[(j, i)].clone())
    }))
}

/// |R + STU| computed as |R| |T| |T^-1 + U R^-1 S| without forming R + STU.
pub fn det_rank_one_like_update<S: Scalar>(
    r: &Matrix<S>,
    s: &Matrix<S>,
    t: &Matrix<S>,
    u: &Matrix<S>,
) -> Result<S> {
    require_square(r, "R")?;
    require_square(t, "T")?;
    let n = r.rows();
    let m = t.rows();
    if s.rows() != n || s.cols() != m || u.rows() != m || u.cols() != n {
        return Err(Error::Dimension(format!(
            "S must be {n}x{m} and U {m}x{n}, got {}x{} and {}x{}",
            s.rows(),
            s.cols(),
            u.rows(),
            u.cols()
        )));
    }
    let r_inv = inverse(r)?;
    let t_inv = inverse(t)?;
    let det_r = determinant(r)?;
    let det_t = determinant(t)?;
    let inner = t_inv.add(&u.mul(&r_inv).mul(s));
    Ok(det_r * det_t * determinant(&inner)?)
}

/// (R + s u^T)^-1 via the rank-one inverse update
/// R^-1 - (1 + u^T R^-1 s)^-1 R^-1 s u^T R^-1.
pub fn inv_rank_one_update<S: Scalar>(
    r: &Matrix<S>,
    s: &ColVector<S>,
    u: &ColVector<S>,
) -> Result<Matrix<S>> {
    require_square(r, "R")?;
    if s.dim() != r.rows() || u.dim() != r.rows() {
        return Err(Error::Dimension(format!(
            "update vectors must have dimension {}, got {} and {}",
            r.rows(),
            s.dim(),
            u.dim()
        )));
    }
    let r_inv = inverse(r)?;
    let ris = r_inv.matvec(s);
    let quad = u.dot(&ris);
    let denom = S::one() + quad.clone();
    let singular = if S::is_exact() {
        denom.is_zero()
    } else {
        denom.magnitude() <= PIVOT_EPS * quad.magnitude().max(1.0)
    };
    if singular {
        return Err(Error::UpdateSingular);
    }
    // u^T R^-1 as a row, i.e. (R^-1)^T u transposed.
    let utr = r_inv.transpose().matvec(u);
    let correction = ris.outer(&utr).scale(&(S::one() / denom));
    Ok(r_inv.sub(&correction))
}

/// Matrix inverse by Gauss-Jordan elimination.
pub fn inverse<S: Scalar>(m: &Matrix<S>) -> Result<Matrix<S>> {
    require_square(m, "inverse input")?;
    let n = m.rows();
    let mut a = m.clone();
    let mut inv = Matrix::<S>::identity(n);
    let scales = row_scales(m);

    for k in 0..n {
        let pivot_row = select_pivot(&a, k, &scales).ok_or(Error::Singular)?;
        if pivot_row != k {
            swap_rows(&mut a, k, pivot_row);
            swap_rows(&mut inv, k, pivot_row);
        }
        let pivot = a[(k, k)].clone();
        for j in 0..n {
            let v = a[(k, j)].clone() / pivot.clone();
            a.set(k, j, v);
            let w = inv[(k, j)].clone() / pivot.clone();
            inv.set(k, j, w);
        }
        for i in 0..n {
            if i == k || a[(i, k)].is_zero() {
                continue;
            }
            let factor = a[(i, k)].clone();
            for j in 0..n {
                let v = a[(i, j)].clone() - factor.clone() * a[(k, j)].clone();
                a.set(i, j, v);
                let w = inv[(i, j)].clone() - factor.clone() * inv[(k, j)].clone();
                inv.set(i, j, w);
            }
        }
    }
    Ok(inv)
}

fn swap_rows<S: Scalar>(m: &mut Matrix<S>, a: usize, b: usize) {
    if a == b {
        return;
    }
    for j in 0..m.cols() {
        let va = m[(a, j)].clone();
        let vb = m[(b, j)].clone();
        m.set(a, j, vb);
        m.set(b, j, va);
    }
}

fn row_scales<S: Scalar>(m: &Matrix<S>) -> Vec<f64> {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| m[(i, j)].magnitude())
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Pick the elimination pivot in column `k` among rows `k..`. Rational kind:
/// first exactly-nonzero entry. Floating kinds: scaled partial pivoting, with
/// entries at or below `PIVOT_EPS` times their row scale treated as zero.
fn select_pivot<S: Scalar>(a: &Matrix<S>, k: usize, scales: &[f64]) -> Option<usize> {
    let n = a.rows();
    if S::is_exact() {
        return (k..n).find(|&i| !a[(i, k)].is_zero());
    }
    let mut best: Option<(usize, f64)> = None;
    for i in k..n {
        let mag = a[(i, k)].magnitude();
        if scales[i] == 0.0 || mag <= PIVOT_EPS * scales[i] {
            continue;
        }
        let ratio = mag / scales[i];
        if best.is_none_or(|(_, b)| ratio > b) {
            best = Some((i, ratio));
        }
    }
    best.map(|(i, _)| i)
}

/// Fraction-free Bareiss elimination. Exact over the rationals; every
/// division in the recurrence is exact.
fn bareiss_det<S: Scalar>(m: &Matrix<S>) -> S {
    let n = m.rows();
    if n == 0 {
        return S::one();
    }
    let mut a = m.clone();
    let mut sign = S::one();
    let mut prev = S::one();
    for k in 0..n - 1 {
        let pivot_row = match (k..n).find(|&i| !a[(i, k)].is_zero()) {
            Some(r) => r,
            None => return S::zero(),
        };
        if pivot_row != k {
            swap_rows(&mut a, k, pivot_row);
            sign = -sign;
        }
        let pivot = a[(k, k)].clone();
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (a[(i, j)].clone() * pivot.clone()
                    - a[(i, k)].clone() * a[(k, j)].clone())
                    / prev.clone();
                a.set(i, j, v);
            }
            a.set(i, k, S::zero());
        }
        prev = pivot;
    }
    sign * a[(n - 1, n - 1)].clone()
}

/// Partially pivoted LU determinant for the floating kinds.
fn lu_det<S: Scalar>(m: &Matrix<S>) -> S {
    let n = m.rows();
    if n == 0 {
        return S::one();
    }
    let mut a = m.clone();
    let scales = row_scales(m);
    let mut det = S::one();
    for k in 0..n {
        let pivot_row = match select_pivot(&a, k, &scales) {
            Some(r) => r,
            None => return S::zero(),
        };
        if pivot_row != k {
            swap_rows(&mut a, k, pivot_row);
            det = -det;
        }
        let pivot = a[(k, k)].clone();
        det = det * pivot.clone();
        for i in k + 1..n {
            if a[(i, k)].is_zero() {
                continue;
            }
            let factor = a[(i, k)].clone() / pivot.clone();
            for j in k + 1..n {
                let v = a[(i, j)].clone() - factor.clone() * a[(k, j)].clone();
                a.set(i, j, v);
            }
            a.set(i, k, S::zero());
        }
    }
    det
}
