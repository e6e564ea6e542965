//! Quadratic hypersurfaces in graph form and the closed-form calculus of the
//! implicit function `y(x)`.
//!
//! A surface is the zero set of `v^T Q v` with `v = (x, y, 1)` augmented.
//! Writing the symmetric part of `Q` in blocks
//! `[[A, b, c], [b^T, d, e], [c^T, e, f]]` turns the defining form into a
//! quadratic in `y`,
//!
//! ```text
//! d y^2 + 2 (b^T x + e) y + (x^T A x + 2 c^T x + f),
//! ```
//!
//! whose discriminant is itself a quadratic polynomial in `x` with
//! coefficients `Lambda = dA - b b^T`, `mu = e b - d c`, `nu = d f - e^2`:
//!
//! ```text
//! Delta_y(x) = -4 x^T Lambda x + 8 mu^T x - 4 nu.
//! ```
//!
//! Solving for `y` picks a branch sign; gradients and Hessians of the branch
//! follow in closed form from `Delta_y` and its derivatives.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{symmetric_part, ColVector, Matrix};
use crate::scalar::{Scalar, ScalarKind};

/// A quadratic hypersurface: the graph dimension `n`, the raw coefficient
/// matrix of size `(n+2) x (n+2)` and its symmetric part.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadricSurface<S> {
    n: usize,
    raw_q: Matrix<S>,
    sym_q: Matrix<S>,
}

impl<S: Scalar> QuadricSurface<S> {
    /// Wrap a raw coefficient matrix. `raw_q` may be asymmetric; everything
    /// except direct evaluation works off its symmetric part.
    pub fn new(n: usize, raw_q: Matrix<S>) -> Result<Self> {
        if n < 1 {
            return Err(Error::Dimension("graph dimension must be at least 1".into()));
        }
        if raw_q.rows() != n + 2 || raw_q.cols() != n + 2 {
            return Err(Error::Dimension(format!(
                "coefficient matrix must be {}x{}, got {}x{}",
                n + 2,
                n + 2,
                raw_q.rows(),
                raw_q.cols()
            )));
        }
        let sym_q = symmetric_part(&raw_q)?;
        Ok(QuadricSurface { n, raw_q, sym_q })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn raw_q(&self) -> &Matrix<S> {
        &self.raw_q
    }

    pub fn sym_q(&self) -> &Matrix<S> {
        &self.sym_q
    }

    /// Re-embed the coefficients into another scalar kind (exact for
    /// rational -> rational, nearest-double otherwise).
    pub fn convert<T: Scalar>(&self) -> QuadricSurface<T>
    where
        S: ExactEmbed<T>,
    {
        QuadricSurface {
            n: self.n,
            raw_q: self.raw_q.map(ExactEmbed::embed),
            sym_q: self.sym_q.map(ExactEmbed::embed),
        }
    }
}

/// Conversion from one scalar kind into another, used to re-run an exact
/// instance in floating or complex arithmetic.
pub trait ExactEmbed<T: Scalar>: Scalar {
    fn embed(&self) -> T;
}

impl<T: Scalar> ExactEmbed<T> for num::BigRational {
    fn embed(&self) -> T {
        T::from_rational(self)
    }
}

/// Block decomposition of the symmetric part:
/// `[[A, b, c], [b^T, d, e], [c^T, e, f]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockParts<S> {
    pub a: Matrix<S>,
    pub b: ColVector<S>,
    pub c: ColVector<S>,
    pub d: S,
    pub e: S,
    pub f: S,
}

impl<S: Scalar> BlockParts<S> {
    pub fn n(&self) -> usize {
        self.b.dim()
    }

    /// Rebuild the symmetric coefficient matrix from the blocks.
    pub fn reassemble(&self) -> Matrix<S> {
        let n = self.n();
        Matrix::from_fn(n + 2, n + 2, |i, j| match (i, j) {
            (i, j) if i < n && j < n => self.a[(i, j)].clone(),
            (i, j) if i < n && j == n => self.b[i].clone(),
            (i, j) if i < n && j == n + 1 => self.c[i].clone(),
            (i, j) if i == n && j < n => self.b[j].clone(),
            (i, j) if i == n + 1 && j < n => self.c[j].clone(),
            (i, j) if i == n && j == n => self.d.clone(),
            (i, j) if (i, j) == (n, n + 1) || (i, j) == (n + 1, n) => self.e.clone(),
            _ => self.f.clone(),
        })
    }
}

/// Coefficients of the discriminant quadratic:
/// `Delta_y(x) = -4 x^T Lambda x + 8 mu^T x - 4 nu`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminantData<S> {
    pub lambda: Matrix<S>,
    pub mu: ColVector<S>,
    pub nu: S,
}

/// Root-branch selector: `Plus` takes `+sqrt(Delta_y)` in the solved root.
/// The sign in the determinant identity is the opposite one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BranchSign {
    Plus,
    Minus,
}

impl BranchSign {
    pub fn scalar<S: Scalar>(&self) -> S {
        match self {
            BranchSign::Plus => S::one(),
            BranchSign::Minus => -S::one(),
        }
    }

    pub fn opposite(&self) -> BranchSign {
        match self {
            BranchSign::Plus => BranchSign::Minus,
            BranchSign::Minus => BranchSign::Plus,
        }
    }
}

impl fmt::Display for BranchSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BranchSign::Plus => write!(f, "plus"),
            BranchSign::Minus => write!(f, "minus"),
        }
    }
}

/// Read the symmetric blocks off the surface's symmetric part.
pub fn decompose<S: Scalar>(q: &QuadricSurface<S>) -> BlockParts<S> {
    let n = q.n();
    let s = q.sym_q();
    BlockParts {
        a: s.block(0, n, 0, n),
        b: ColVector::from_fn(n, |i| s[(i, n)].clone()),
        c: ColVector::from_fn(n, |i| s[(i, n + 1)].clone()),
        d: s[(n, n)].clone(),
        e: s[(n, n + 1)].clone(),
        f: s[(n + 1, n + 1)].clone(),
    }
}

/// Evaluate the raw quadratic form `v(x)^T Q v(x)` with `v = (x, y, 1)`.
/// Zero exactly when `(x, y)` lies on the hypersurface.
pub fn eval_quadric<S: Scalar>(q: &QuadricSurface<S>, x: &ColVector<S>, y: &S) -> Result<S> {
    check_point_dim(q.n(), x)?;
    let v = ColVector::from_fn(q.n() + 2, |i| {
        if i < q.n() {
            x[i].clone()
        } else if i == q.n() {
            y.clone()
        } else {
            S::one()
        }
    });
    Ok(v.dot(&q.raw_q().matvec(&v)))
}

/// Coefficients `(a, b2, c0)` of the defining form as a quadratic in `y`:
/// `a y^2 + b2 y + c0` with `a = d`, `b2 = 2(b^T x + e)`,
/// `c0 = x^T A x + 2 c^T x + f`.
pub fn quadratic_in_y<S: Scalar>(parts: &BlockParts<S>, x: &ColVector<S>) -> Result<(S, S, S)> {
    check_point_dim(parts.n(), x)?;
    let two = S::from_int(2);
    let b2 = two.clone() * (parts.b.dot(x) + parts.e.clone());
    let c0 = x.dot(&parts.a.matvec(x)) + two * parts.c.dot(x) + parts.f.clone();
    Ok((parts.d.clone(), b2, c0))
}

/// Discriminant coefficients `Lambda = dA - b b^T`, `mu = e b - d c`,
/// `nu = d f - e^2`.
pub fn discriminant_data<S: Scalar>(parts: &BlockParts<S>) -> DiscriminantData<S> {
    let n = parts.n();
    let lambda = Matrix::symmetric_from_fn(n, |i, j| {
        parts.d.clone() * parts.a[(i, j)].clone() - parts.b[i].clone() * parts.b[j].clone()
    });
    let mu = ColVector::from_fn(n, |i| {
        parts.e.clone() * parts.b[i].clone() - parts.d.clone() * parts.c[i].clone()
    });
    let nu = parts.d.clone() * parts.f.clone() - parts.e.clone() * parts.e.clone();
    DiscriminantData { lambda, mu, nu }
}

/// `Delta_y(x) = -4 x^T Lambda x + 8 mu^T x - 4 nu`.
pub fn discriminant_value<S: Scalar>(dd: &DiscriminantData<S>, x: &ColVector<S>) -> Result<S> {
    check_point_dim(dd.mu.dim(), x)?;
    let four = S::from_int(4);
    let eight = S::from_int(8);
    Ok(-(four.clone() * x.dot(&dd.lambda.matvec(x))) + eight * dd.mu.dot(x)
        - four * dd.nu.clone())
}

/// Gradient of the discriminant quadratic: `-8 Lambda x + 8 mu`.
pub fn discriminant_gradient<S: Scalar>(
    dd: &DiscriminantData<S>,
    x: &ColVector<S>,
) -> Result<ColVector<S>> {
    check_point_dim(dd.mu.dim(), x)?;
    let eight = S::from_int(8);
    Ok(dd.mu.sub(&dd.lambda.matvec(x)).scale(&eight))
}

/// Solve the quadratic in `y` on the selected branch:
/// `y = (-2(b^T x + e) + sign * sqrt(Delta_y)) / (2d)`.
pub fn solve_y<S: Scalar>(
    parts: &BlockParts<S>,
    x: &ColVector<S>,
    branch: BranchSign,
) -> Result<S> {
    let (a, b2, c0) = quadratic_in_y(parts, x)?;
    if a.is_zero() {
        return Err(Error::DegenerateLeadingCoefficient);
    }
    let delta = b2.clone() * b2.clone() - S::from_int(4) * a.clone() * c0;
    let root = sqrt_branch_value(&delta, false)?;
    let two = S::from_int(2);
    Ok((-b2 + branch.scalar::<S>() * root) / (two * a))
}

/// Closed-form gradient of the branch function:
/// `grad y = (-b + sign * (-2 Lambda x + 2 mu) / sqrt(Delta_y)) / d`.
pub fn gradient_y<S: Scalar>(
    parts: &BlockParts<S>,
    dd: &DiscriminantData<S>,
    x: &ColVector<S>,
    branch: BranchSign,
) -> Result<ColVector<S>> {
    check_point_dim(parts.n(), x)?;
    if parts.d.is_zero() {
        return Err(Error::DegenerateLeadingCoefficient);
    }
    let delta = discriminant_value(dd, x)?;
    let root = sqrt_branch_value(&delta, true)?;
    let two = S::from_int(2);
    let grad_term = dd.mu.sub(&dd.lambda.matvec(x)).scale(&two);
    let s: S = branch.scalar();
    Ok(ColVector::from_fn(parts.n(), |i| {
        (-parts.b[i].clone() + s.clone() * grad_term[i].clone() / root.clone())
            / parts.d.clone()
    }))
}

/// Closed-form Hessian of the branch function:
/// `H_y = sign * (-16 Delta_y Lambda - g g^T) / (8 d Delta_y^(3/2))` with
/// `g = -8 Lambda x + 8 mu`. Symmetric entry-for-entry by construction.
pub fn hessian_y<S: Scalar>(
    parts: &BlockParts<S>,
    dd: &DiscriminantData<S>,
    x: &ColVector<S>,
    branch: BranchSign,
) -> Result<Matrix<S>> {
    check_point_dim(parts.n(), x)?;
    if parts.d.is_zero() {
        return Err(Error::DegenerateLeadingCoefficient);
    }
    let delta = discriminant_value(dd, x)?;
    let root = sqrt_branch_value(&delta, true)?;
    let numer = hessian_numerator(dd, &delta, x)?;
    let eight = S::from_int(8);
    let coeff = branch.scalar::<S>()
        / (eight * parts.d.clone() * delta.clone() * root);
    Ok(numer.scale(&coeff))
}

/// The square-root-free Hessian numerator `-16 Delta_y Lambda - g g^T`,
/// mirrored so it is symmetric entry-for-entry.
pub(crate) fn hessian_numerator<S: Scalar>(
    dd: &DiscriminantData<S>,
    delta: &S,
    x: &ColVector<S>,
) -> Result<Matrix<S>> {
    let g = discriminant_gradient(dd, x)?;
    let sixteen = S::from_int(16);
    Ok(Matrix::symmetric_from_fn(dd.mu.dim(), |i, j| {
        -(sixteen.clone() * delta.clone() * dd.lambda[(i, j)].clone())
            - g[i].clone() * g[j].clone()
    }))
}

/// Square root of a discriminant value with the kind-specific domain rules:
/// real kinds require `Delta >= 0` (`> 0` when `strict`), the complex kind
/// requires `Delta != 0` and takes the principal branch, and the rational
/// kind additionally requires a perfect rational square.
fn sqrt_branch_value<S: Scalar>(delta: &S, strict: bool) -> Result<S> {
    match S::KIND {
        ScalarKind::Rational | ScalarKind::Float => match delta.real_sign() {
            Some(Ordering::Less) => return Err(Error::NoRealSolution),
            Some(Ordering::Equal) if strict => return Err(Error::OnDiscriminantLocus),
            _ => {}
        },
        ScalarKind::Complex => {
            if delta.is_zero() {
                return Err(Error::OnDiscriminantLocus);
            }
        }
    }
    delta.try_sqrt().ok_or(Error::IrrationalSquareRoot)
}

fn check_point_dim<S: Scalar>(n: usize, x: &ColVector<S>) -> Result<()> {
    if x.dim() == n {
        Ok(())
    } else {
        Err(Error::Dimension(format!(
            "point has dimension {}, surface expects {n}",
            x.dim()
        )))
    }
}
