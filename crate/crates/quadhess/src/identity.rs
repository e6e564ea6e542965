//! Both sides of the Hessian-determinant identity and the intermediate
//! checkpoints of its derivation.
//!
//! For a branch `y(x)` of a quadric with `d != 0` and positive discriminant,
//!
//! ```text
//! |-/+ H_y(x)| * Delta_y(x)^(n/2+1) = -|Q + Q^T|,
//! ```
//!
//! with the determinant sign opposite to the root branch. The left side
//! rationalizes completely: the Hessian is a scalar multiple of
//! `-16 Delta_y Lambda - g g^T` with `g = -8 Lambda x + 8 mu`, and the
//! half-integer powers of `Delta_y` cancel into `Delta_y^(1-n)`, so
//!
//! ```text
//! lhs = (-1)^n (8d)^(-n) Delta_y^(1-n) |{-16 Delta_y Lambda - g g^T}|
//! ```
//!
//! needs no square root at all. The branch sign enters once through the
//! Hessian and once through the opposite sign in the identity, hence
//! squared: the value is branch-independent. This is what makes
//! zero-tolerance rational verification possible.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::linalg::{determinant, inverse, ColVector};
use crate::quadric::{
    decompose, discriminant_data, discriminant_gradient, discriminant_value, hessian_numerator,
    hessian_y, BlockParts, BranchSign, DiscriminantData, QuadricSurface,
};
use crate::scalar::{Scalar, ScalarKind};

/// Default relative tolerance for floating-kind verification:
/// `|lhs - rhs| <= tol * max(1, |rhs|)`.
pub const DEFAULT_FLOAT_TOL: f64 = 1e-8;

/// Right side of the identity: `-|Q + Q^T|`, equal to
/// `-2^(n+2) |sym(Q)|`.
pub fn rhs<S: Scalar>(q: &QuadricSurface<S>) -> S {
    let doubled = q.raw_q().add(&q.raw_q().transpose());
    -determinant(&doubled).expect("coefficient matrix is square")
}

fn check_delta_usable<S: Scalar>(delta: &S) -> Result<()> {
    match S::KIND {
        ScalarKind::Rational | ScalarKind::Float => match delta.real_sign() {
            Some(Ordering::Less) => Err(Error::NoRealSolution),
            Some(Ordering::Equal) => Err(Error::OnDiscriminantLocus),
            _ => Ok(()),
        },
        ScalarKind::Complex => {
            if delta.is_zero() {
                Err(Error::OnDiscriminantLocus)
            } else {
                Ok(())
            }
        }
    }
}

/// Square-root-free left side:
/// `(-1)^n (8d)^(-n) Delta_y^(1-n) |{-16 Delta_y Lambda - g g^T}|`.
///
/// Exact in the rational kind. The branch argument is accepted for
/// signature symmetry with the floating path; the branch sign cancels
/// against the identity's opposite sign, so the value does not depend
/// on it.
pub fn lhs_exact<S: Scalar>(
    parts: &BlockParts<S>,
    dd: &DiscriminantData<S>,
    x: &ColVector<S>,
    _branch: BranchSign,
) -> Result<S> {
    if parts.d.is_zero() {
        return Err(Error::DegenerateLeadingCoefficient);
    }
    let delta = discriminant_value(dd, x)?;
    check_delta_usable(&delta)?;
    let numer = hessian_numerator(dd, &delta, x)?;
    let det_numer = determinant(&numer)?;
    let n = parts.n() as i32;
    let eight_d = S::from_int(8) * parts.d.clone();
    Ok(S::from_int(-1).powi(n) * det_numer * delta.powi(1 - n) / eight_d.powi(n))
}

/// Floating-kind left side `|{-/+} H_y| * Delta_y^(n/2+1)`, with the
/// half-integer power taken through the principal square root.
///
/// When `d = 0` the branch formulas are undefined; the Hessian then comes
/// from implicit differentiation at the unique linear root (and the branch
/// sign is immaterial for even `n`).
pub fn lhs_float<S: Scalar>(
    q: &QuadricSurface<S>,
    x: &ColVector<S>,
    branch: BranchSign,
) -> Result<S> {
    let parts = decompose(q);
    let dd = discriminant_data(&parts);
    let delta = discriminant_value(&dd, x)?;

    let hess = if parts.d.is_zero() {
        let y0 = crate::oracle::linear_root(&parts, x)?;
        let (_, hess) = crate::oracle::implicit_derivatives(q, x, &y0)?;
        hess
    } else {
        hessian_y(&parts, &dd, x, branch)?
    };

    check_delta_usable(&delta)?;
    let root = delta.try_sqrt().ok_or(Error::IrrationalSquareRoot)?;
    let power = root.powi(q.n() as i32 + 2);
    let flipped: S = branch.opposite().scalar();
    Ok(determinant(&hess.scale(&flipped))? * power)
}

/// Determinant of the 2x2 Schur complement of `A` in the symmetric block
/// matrix: `|[[d - b^T A^-1 b, e - b^T A^-1 c], [e - c^T A^-1 b,
/// f - c^T A^-1 c]]|`. Satisfies `|Q| = |A| * xi`.
pub fn schur_complement_det<S: Scalar>(parts: &BlockParts<S>) -> Result<S> {
    let a_inv = inverse(&parts.a)?;
    let bab = parts.b.dot(&a_inv.matvec(&parts.b));
    let bac = parts.b.dot(&a_inv.matvec(&parts.c));
    let cab = parts.c.dot(&a_inv.matvec(&parts.b));
    let cac = parts.c.dot(&a_inv.matvec(&parts.c));
    let m00 = parts.d.clone() - bab;
    let m01 = parts.e.clone() - bac;
    let m10 = parts.e.clone() - cab;
    let m11 = parts.f.clone() - cac;
    Ok(m00 * m11 - m01 * m10)
}

/// Column elimination collapses the symmetric matrix to block-lower-
/// triangular form, so its determinant factors through `A`:
/// returns `(|sym(Q)|, |A| * xi)`; the two components are equal.
pub fn schur_det_factorization<S: Scalar>(
    q: &QuadricSurface<S>,
    parts: &BlockParts<S>,
) -> Result<(S, S)> {
    let det_q = determinant(q.sym_q())?;
    let det_a = determinant(&parts.a)?;
    let xi = schur_complement_det(parts)?;
    Ok((det_q, det_a * xi))
}

/// Determinant of the discriminant's (constant) second-derivative matrix,
/// both as the factored form `(-8)^n d^(n-1) |A| (d - b^T A^-1 b)` and
/// directly as `|-8 Lambda|`. The two agree wherever `A` is nonsingular.
pub fn disc_hessian_det<S: Scalar>(
    parts: &BlockParts<S>,
    dd: &DiscriminantData<S>,
) -> Result<(S, S)> {
    let n = parts.n() as i32;
    let a_inv = inverse(&parts.a)?;
    let det_a = determinant(&parts.a)?;
    let bab = parts.b.dot(&a_inv.matvec(&parts.b));
    let factored = S::from_int(-8).powi(n)
        * parts.d.powi(n - 1)
        * det_a
        * (parts.d.clone() - bab);
    let direct = determinant(&dd.lambda.scale(&S::from_int(-8)))?;
    Ok((factored, direct))
}

/// The scalar `2 Delta_y - g^T (-8 Lambda)^-1 g` evaluated literally at
/// `x`, paired with its closed form `-8 nu + 8 mu^T Lambda^-1 mu`. The
/// literal value is independent of `x`.
pub fn constant_bracket<S: Scalar>(
    dd: &DiscriminantData<S>,
    x: &ColVector<S>,
) -> Result<(S, S)> {
    let neg8_lambda = dd.lambda.scale(&S::from_int(-8));
    let inv = inverse(&neg8_lambda)?;
    let g = discriminant_gradient(dd, x)?;
    let delta = discriminant_value(dd, x)?;
    let literal = S::from_int(2) * delta - g.dot(&inv.matvec(&g));
    // mu^T Lambda^-1 mu = -8 mu^T (-8 Lambda)^-1 mu.
    let closed = -(S::from_int(8) * dd.nu.clone())
        - S::from_int(64) * dd.mu.dot(&inv.matvec(&dd.mu));
    Ok((literal, closed))
}

/// Product form of the determinant scaling: returns
/// `(|-8 Lambda| * bracket(x), (-8)^(n+1) d^n |sym(Q)|)`;
/// the two components are equal.
pub fn det_scaling<S: Scalar>(
    q: &QuadricSurface<S>,
    parts: &BlockParts<S>,
    dd: &DiscriminantData<S>,
    x: &ColVector<S>,
) -> Result<(S, S)> {
    let (literal, _) = constant_bracket(dd, x)?;
    let disc_hess_det = determinant(&dd.lambda.scale(&S::from_int(-8)))?;
    let product = disc_hess_det * literal;
    let n = parts.n() as i32;
    let scaled = S::from_int(-8).powi(n + 1) * parts.d.powi(n) * determinant(q.sym_q())?;
    Ok((product, scaled))
}

/// Consistency of the Schur form with the bracket constants:
/// `d (d - b^T A^-1 b) (nu - mu^T Lambda^-1 mu) = d^2 * xi`.
pub fn xi_consistency<S: Scalar>(
    parts: &BlockParts<S>,
    dd: &DiscriminantData<S>,
) -> Result<(S, S)> {
    let a_inv = inverse(&parts.a)?;
    let lambda_inv = inverse(&dd.lambda)?;
    let bab = parts.b.dot(&a_inv.matvec(&parts.b));
    let mlm = dd.mu.dot(&lambda_inv.matvec(&dd.mu));
    let triple = parts.d.clone() * (parts.d.clone() - bab) * (dd.nu.clone() - mlm);
    let xi = schur_complement_det(parts)?;
    let d2_xi = parts.d.clone() * parts.d.clone() * xi;
    Ok((triple, d2_xi))
}

/// One labelled intermediate value attached to a verification report.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint<S> {
    pub label: &'static str,
    pub value: S,
}

/// Outcome of verifying the identity at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport<S> {
    pub mode: ScalarKind,
    pub branch: BranchSign,
    pub point: ColVector<S>,
    pub lhs: S,
    pub rhs: S,
    /// `|lhs - rhs|` in the field; exactly zero in a passing exact run.
    pub discrepancy: S,
    pub passed: bool,
    pub checkpoints: Vec<Checkpoint<S>>,
}

/// A verification attempt: either a full report, or a structured skip when
/// the point violates the preconditions (so batch sweeps never abort).
#[derive(Debug, Clone, PartialEq)]
pub enum VerifyOutcome<S> {
    Report(VerificationReport<S>),
    Skipped {
        point: ColVector<S>,
        branch: BranchSign,
        reason: Error,
    },
}

impl<S: Scalar> VerifyOutcome<S> {
    pub fn passed(&self) -> bool {
        matches!(self, VerifyOutcome::Report(r) if r.passed)
    }

    pub fn failed(&self) -> bool {
        matches!(self, VerifyOutcome::Report(r) if !r.passed)
    }

    pub fn skipped(&self) -> bool {
        matches!(self, VerifyOutcome::Skipped { .. })
    }
}

/// Verify the identity at `x` on the chosen branch. The computation mode is
/// the scalar kind: rationals run the exact square-root-free path with
/// zero tolerance, the floating kinds run the Hessian path with the given
/// relative tolerance.
pub fn verify_identity<S: Scalar>(
    q: &QuadricSurface<S>,
    x: &ColVector<S>,
    branch: BranchSign,
    tol: f64,
) -> VerifyOutcome<S> {
    let parts = decompose(q);
    let dd = discriminant_data(&parts);
    let rhs_value = rhs(q);
    let lhs_value = match S::KIND {
        ScalarKind::Rational => lhs_exact(&parts, &dd, x, branch),
        ScalarKind::Float | ScalarKind::Complex => lhs_float(q, x, branch),
    };
    let lhs_value = match lhs_value {
        Ok(v) => v,
        Err(reason) => {
            return VerifyOutcome::Skipped {
                point: x.clone(),
                branch,
                reason,
            }
        }
    };
    let diff = lhs_value.clone() - rhs_value.clone();
    let passed = if S::is_exact() {
        lhs_value == rhs_value
    } else {
        diff.magnitude() <= tol * rhs_value.magnitude().max(1.0)
    };
    VerifyOutcome::Report(VerificationReport {
        mode: S::KIND,
        branch,
        point: x.clone(),
        lhs: lhs_value,
        rhs: rhs_value,
        discrepancy: diff.abs_value(),
        passed,
        checkpoints: collect_checkpoints(q, &parts, &dd, x),
    })
}

/// Every intermediate checkpoint whose preconditions hold at this instance.
pub fn collect_checkpoints<S: Scalar>(
    q: &QuadricSurface<S>,
    parts: &BlockParts<S>,
    dd: &DiscriminantData<S>,
    x: &ColVector<S>,
) -> Vec<Checkpoint<S>> {
    let mut out = Vec::new();
    if let Ok((factored, direct)) = disc_hessian_det(parts, dd) {
        out.push(Checkpoint { label: "disc_hessian_det_factored", value: factored });
        out.push(Checkpoint { label: "disc_hessian_det_direct", value: direct });
    }
    if let Ok((literal, closed)) = constant_bracket(dd, x) {
        out.push(Checkpoint { label: "constant_bracket_literal", value: literal });
        out.push(Checkpoint { label: "constant_bracket_closed", value: closed });
    }
    if let Ok((product, scaled)) = det_scaling(q, parts, dd, x) {
        out.push(Checkpoint { label: "det_scaling_product", value: product });
        out.push(Checkpoint { label: "det_scaling_scaled_det_q", value: scaled });
    }
    if let Ok((triple, d2_xi)) = xi_consistency(parts, dd) {
        out.push(Checkpoint { label: "xi_consistency_triple", value: triple });
        out.push(Checkpoint { label: "xi_consistency_d2_xi", value: d2_xi });
    }
    if let Ok(xi) = schur_complement_det(parts) {
        out.push(Checkpoint { label: "schur_complement_det", value: xi });
    }
    if let Ok((det_q, det_a_xi)) = schur_det_factorization(q, parts) {
        out.push(Checkpoint { label: "schur_det_q", value: det_q });
        out.push(Checkpoint { label: "schur_det_a_xi", value: det_a_xi });
    }
    out
}
