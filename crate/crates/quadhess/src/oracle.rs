//! Independent ground-truth machinery: central finite differences, implicit
//! differentiation (which also covers the `d = 0` case the branch formulas
//! cannot reach), Laplace-expansion determinants, and a seeded, reproducible
//! instance generator.
//!
//! Reproducibility contract for the generator: the stream is ChaCha20 seeded
//! through `SeedableRng::seed_from_u64`; every integer draw maps `next_u64`
//! onto `[lo, hi]` as `lo + (next_u64 mod (hi - lo + 1))`; entries are drawn
//! upper-triangle row-major (numerator first, then denominator), then the
//! point coordinates. The same seed and configuration always reproduce the
//! same instance, independent of platform.

use num::BigRational;
use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::linalg::{ColVector, Matrix};
use crate::quadric::{
    decompose, discriminant_data, discriminant_value, quadratic_in_y, solve_y, BlockParts,
    BranchSign, QuadricSurface,
};
use crate::scalar::{rat, Scalar};

/// Central-difference configuration. Only the step size varies; the scheme
/// is always central.
#[derive(Debug, Clone, Copy)]
pub struct FdConfig {
    pub step: f64,
}

impl FdConfig {
    pub fn new(step: f64) -> Self {
        assert!(step > 0.0, "finite-difference step must be positive");
        FdConfig { step }
    }

    /// Default step for first derivatives.
    pub fn gradient_default() -> Self {
        FdConfig { step: 1e-5 }
    }

    /// Default step for second derivatives.
    pub fn hessian_default() -> Self {
        FdConfig { step: 1e-4 }
    }
}

/// The branch root where it exists, falling back to the unique linear root
/// when the quadratic degenerates (`d = 0`).
fn branch_root<S: Scalar>(parts: &BlockParts<S>, x: &ColVector<S>, branch: BranchSign) -> Result<S> {
    if parts.d.is_zero() {
        linear_root(parts, x)
    } else {
        solve_y(parts, x, branch)
    }
}

/// Unique root of the defining form when `d = 0`: `y = -c0 / b2`.
pub fn linear_root<S: Scalar>(parts: &BlockParts<S>, x: &ColVector<S>) -> Result<S> {
    let (_, b2, c0) = quadratic_in_y(parts, x)?;
    let vertical = if S::is_exact() {
        b2.is_zero()
    } else {
        b2.magnitude() <= 1e-12 * c0.magnitude().max(1.0)
    };
    if vertical {
        return Err(Error::VerticalTangent);
    }
    Ok(-c0 / b2)
}

fn shifted<S: Scalar>(x: &ColVector<S>, i: usize, delta: &S) -> ColVector<S> {
    ColVector::from_fn(x.dim(), |k| {
        if k == i {
            x[k].clone() + delta.clone()
        } else {
            x[k].clone()
        }
    })
}

fn stencil_root<S: Scalar>(
    parts: &BlockParts<S>,
    x: &ColVector<S>,
    branch: BranchSign,
) -> Result<S> {
    branch_root(parts, x, branch).map_err(|e| Error::Stencil(Box::new(e)))
}

/// Central-difference gradient of the branch function,
/// `(y(x + h e_i) - y(x - h e_i)) / (2h)` per coordinate.
pub fn fd_gradient<S: Scalar>(
    parts: &BlockParts<S>,
    x: &ColVector<S>,
    branch: BranchSign,
    cfg: &FdConfig,
) -> Result<ColVector<S>> {
    let h = S::from_f64(cfg.step);
    let two_h = S::from_f64(2.0 * cfg.step);
    let mut entries = Vec::with_capacity(x.dim());
    for i in 0..x.dim() {
        let plus = stencil_root(parts, &shifted(x, i, &h), branch)?;
        let minus = stencil_root(parts, &shifted(x, i, &(-h.clone())), branch)?;
        entries.push((plus - minus) / two_h.clone());
    }
    Ok(ColVector::from_vec(entries))
}

/// Central second-difference Hessian of the branch function, symmetrized.
pub fn fd_hessian<S: Scalar>(
    parts: &BlockParts<S>,
    x: &ColVector<S>,
    branch: BranchSign,
    cfg: &FdConfig,
) -> Result<Matrix<S>> {
    let n = x.dim();
    let h = S::from_f64(cfg.step);
    let h2 = h.clone() * h.clone();
    let four_h2 = S::from_f64(4.0) * h2.clone();
    let center = stencil_root(parts, x, branch)?;

    let mut hess = Matrix::zeros(n, n);
    for i in 0..n {
        let plus = stencil_root(parts, &shifted(x, i, &h), branch)?;
        let minus = stencil_root(parts, &shifted(x, i, &(-h.clone())), branch)?;
        let two = S::from_int(2);
        hess.set(
            i,
            i,
            (plus + minus - two * center.clone()) / h2.clone(),
        );
        for j in i + 1..n {
            let pp = stencil_root(parts, &shifted(&shifted(x, i, &h), j, &h), branch)?;
            let pm = stencil_root(parts, &shifted(&shifted(x, i, &h), j, &(-h.clone())), branch)?;
            let mp = stencil_root(parts, &shifted(&shifted(x, i, &(-h.clone())), j, &h), branch)?;
            let mm = stencil_root(
                parts,
                &shifted(&shifted(x, i, &(-h.clone())), j, &(-h.clone())),
                branch,
            )?;
            let v = (pp - pm - mp + mm) / four_h2.clone();
            hess.set(i, j, v.clone());
            hess.set(j, i, v);
        }
    }
    Ok(hess)
}

/// Number of root evaluations a central-difference Hessian consumes:
/// one center, two per diagonal entry, four per off-diagonal pair.
pub fn fd_hessian_root_evals(n: usize) -> usize {
    2 * n * n + 1
}

/// Gradient and Hessian of the local graph function through `(x, y0)` by
/// implicit differentiation of the symmetric form `F(x, y) = v^T Q_sym v`.
///
/// Works for any `d`, including `d = 0`; the only requirements are that the
/// point actually lies on the surface and that `dF/dy` does not vanish
/// there.
pub fn implicit_derivatives<S: Scalar>(
    q: &QuadricSurface<S>,
    x: &ColVector<S>,
    y0: &S,
) -> Result<(ColVector<S>, Matrix<S>)> {
    let parts = decompose(q);
    let (a, b2, c0) = quadratic_in_y(&parts, x)?;
    let two = S::from_int(2);

    let residual = a.clone() * y0.clone() * y0.clone() + b2.clone() * y0.clone() + c0.clone();
    let scale = (a.clone() * y0.clone() * y0.clone())
        .magnitude()
        .max((b2.clone() * y0.clone()).magnitude())
        .max(c0.magnitude())
        .max(1.0);
    let off_surface = if S::is_exact() {
        !residual.is_zero()
    } else {
        residual.magnitude() > 1e-9 * scale
    };
    if off_surface {
        return Err(Error::OffSurface(residual.magnitude()));
    }

    // dF/dy = 2 d y + 2 (b^T x + e)
    let f_y = two.clone() * a.clone() * y0.clone() + b2.clone();
    let fy_scale = (two.clone() * a.clone() * y0.clone())
        .magnitude()
        .max(b2.magnitude())
        .max(1.0);
    let vertical = if S::is_exact() {
        f_y.is_zero()
    } else {
        f_y.magnitude() <= 1e-9 * fy_scale
    };
    if vertical {
        return Err(Error::VerticalTangent);
    }

    // dF/dx = 2 (A x + y b + c)
    let fx = parts
        .a
        .matvec(x)
        .add(&parts.b.scale(y0))
        .add(&parts.c)
        .scale(&two);
    let grad = ColVector::from_fn(x.dim(), |i| -(fx[i].clone()) / f_y.clone());

    // Second derivatives of F: F_xx = 2A, F_xy = 2b, F_yy = 2d.
    let hess = Matrix::symmetric_from_fn(x.dim(), |i, j| {
        let fxx = two.clone() * parts.a[(i, j)].clone();
        let fxy_i = two.clone() * parts.b[i].clone();
        let fxy_j = two.clone() * parts.b[j].clone();
        let fyy = two.clone() * parts.d.clone();
        -(fxx
            + fxy_i * grad[j].clone()
            + fxy_j * grad[i].clone()
            + fyy * grad[i].clone() * grad[j].clone())
            / f_y.clone()
    });
    Ok((grad, hess))
}

/// Laplace-expansion determinant, limited to small matrices. Serves as an
/// independent cross-check of the elimination kernels.
pub const COFACTOR_MAX: usize = 7;

pub fn cofactor_det<S: Scalar>(m: &Matrix<S>) -> Result<S> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "determinant input must be square, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if m.rows() > COFACTOR_MAX {
        return Err(Error::TooLarge {
            size: m.rows(),
            max: COFACTOR_MAX,
        });
    }
    Ok(cofactor_rec(m))
}

fn cofactor_rec<S: Scalar>(m: &Matrix<S>) -> S {
    let n = m.rows();
    match n {
        0 => S::one(),
        1 => m[(0, 0)].clone(),
        _ => {
            let mut acc = S::zero();
            let mut sign = S::one();
            for j in 0..n {
                let minor = Matrix::from_fn(n - 1, n - 1, |r, c| {
                    m[(r + 1, if c < j { c } else { c + 1 })].clone()
                });
                acc = acc + sign.clone() * m[(0, j)].clone() * cofactor_rec(&minor);
                sign = -sign;
            }
            acc
        }
    }
}

const MAX_GEN_ATTEMPTS: usize = 10_000;

/// Instance-generator configuration.
#[derive(Debug, Clone)]
pub struct GenConfig {
    pub n: usize,
    pub seed: u64,
    /// Numerators are drawn uniformly from `[-entry_range, entry_range]`.
    pub entry_range: i64,
    /// When set, each entry is divided by a denominator drawn from
    /// `[1, entry_range]`; otherwise entries are integers.
    pub denominators: bool,
    pub require_d_nonzero: bool,
    pub require_positive_discriminant: bool,
    /// Conditioning floor: reject instances whose discriminant magnitude at
    /// the sampled point falls below this (checked in double precision).
    pub min_discriminant: Option<f64>,
    /// Conditioning floor on `|d|` (checked in double precision).
    pub min_d: Option<f64>,
    /// Bound for the sampled point's coordinates; defaults to `entry_range`.
    pub point_range: Option<i64>,
}

impl GenConfig {
    pub fn new(n: usize, seed: u64) -> Self {
        GenConfig {
            n,
            seed,
            entry_range: 10,
            denominators: true,
            require_d_nonzero: true,
            require_positive_discriminant: true,
            min_discriminant: None,
            min_d: None,
            point_range: None,
        }
    }
}

fn draw_int(rng: &mut ChaCha20Rng, lo: i64, hi: i64) -> i64 {
    let span = (hi - lo + 1) as u64;
    lo + (rng.next_u64() % span) as i64
}

fn draw_rat(rng: &mut ChaCha20Rng, cfg: &GenConfig, bound: i64) -> BigRational {
    let num = draw_int(rng, -bound, bound);
    let den = if cfg.denominators {
        draw_int(rng, 1, cfg.entry_range.max(1))
    } else {
        1
    };
    rat(num, den)
}

fn draw_symmetric(rng: &mut ChaCha20Rng, cfg: &GenConfig, size: usize) -> Matrix<BigRational> {
    let mut m = Matrix::zeros(size, size);
    for i in 0..size {
        for j in i..size {
            let v = draw_rat(rng, cfg, cfg.entry_range);
            m.set(i, j, v.clone());
            m.set(j, i, v);
        }
    }
    m
}

fn draw_point(rng: &mut ChaCha20Rng, cfg: &GenConfig) -> ColVector<BigRational> {
    let bound = cfg.point_range.unwrap_or(cfg.entry_range);
    ColVector::from_fn(cfg.n, |_| draw_rat(rng, cfg, bound))
}

fn generate_with<F>(cfg: &GenConfig, mut tweak: F) -> Result<(QuadricSurface<BigRational>, ColVector<BigRational>)>
where
    F: FnMut(&mut Matrix<BigRational>),
{
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    for _ in 0..MAX_GEN_ATTEMPTS {
        let mut sym = draw_symmetric(&mut rng, cfg, cfg.n + 2);
        tweak(&mut sym);
        let x = draw_point(&mut rng, cfg);
        let q = QuadricSurface::new(cfg.n, sym)?;
        let parts = decompose(&q);
        if cfg.require_d_nonzero && parts.d.is_zero() {
            continue;
        }
        if let Some(min) = cfg.min_d {
            if parts.d.magnitude() < min {
                continue;
            }
        }
        if cfg.require_positive_discriminant || cfg.min_discriminant.is_some() {
            let dd = discriminant_data(&parts);
            let delta = discriminant_value(&dd, &x)?;
            if cfg.require_positive_discriminant
                && delta.real_sign() != Some(std::cmp::Ordering::Greater)
            {
                continue;
            }
            if let Some(min) = cfg.min_discriminant {
                if delta.magnitude() < min {
                    continue;
                }
            }
        }
        return Ok((q, x));
    }
    Err(Error::GenerationExhausted(MAX_GEN_ATTEMPTS))
}

/// Reproducible random symmetric rational quadric plus a sample point
/// satisfying the configured constraints (rejection sampling, bounded
/// attempts).
pub fn random_quadric(cfg: &GenConfig) -> Result<(QuadricSurface<BigRational>, ColVector<BigRational>)> {
    generate_with(cfg, |_| {})
}

/// Like [`random_quadric`] but with the leading coefficient `d` forced to
/// zero (the parabolic case). The discriminant then equals the squared
/// linear coefficient, so the positivity constraint bounds `|b2|` below.
pub fn random_degenerate_quadric(
    cfg: &GenConfig,
) -> Result<(QuadricSurface<BigRational>, ColVector<BigRational>)> {
    let n = cfg.n;
    let mut cfg = cfg.clone();
    cfg.require_d_nonzero = false;
    generate_with(&cfg, |sym| sym.set(n, n, rat(0, 1)))
}

/// Rank-deficient instance: the final row and column of the symmetric
/// matrix are the image of a random coefficient vector, so the determinant
/// of the symmetric part is exactly zero while `A` and `d` stay generic.
pub fn random_singular_quadric(
    cfg: &GenConfig,
) -> Result<(QuadricSurface<BigRational>, ColVector<BigRational>)> {
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    for _ in 0..MAX_GEN_ATTEMPTS {
        let m = cfg.n + 2;
        let core = draw_symmetric(&mut rng, cfg, m - 1);
        let w = ColVector::from_fn(m - 1, |_| draw_rat(&mut rng, cfg, cfg.entry_range));
        let img = core.matvec(&w);
        let corner = w.dot(&img);
        let sym = Matrix::symmetric_from_fn(m, |i, j| {
            if j < m - 1 {
                core[(i, j)].clone()
            } else if i < m - 1 {
                img[i].clone()
            } else {
                corner.clone()
            }
        });
        let x = draw_point(&mut rng, cfg);
        let q = QuadricSurface::new(cfg.n, sym)?;
        let parts = decompose(&q);
        if cfg.require_d_nonzero && parts.d.is_zero() {
            continue;
        }
        if let Some(min) = cfg.min_d {
            if parts.d.magnitude() < min {
                continue;
            }
        }
        if cfg.require_positive_discriminant || cfg.min_discriminant.is_some() {
            let dd = discriminant_data(&parts);
            let delta = discriminant_value(&dd, &x)?;
            if cfg.require_positive_discriminant
                && delta.real_sign() != Some(std::cmp::Ordering::Greater)
            {
                continue;
            }
            if let Some(min) = cfg.min_discriminant {
                if delta.magnitude() < min {
                    continue;
                }
            }
        }
        return Ok((q, x));
    }
    Err(Error::GenerationExhausted(MAX_GEN_ATTEMPTS))
}

/// Reproducible random complex quadric: real and imaginary parts of every
/// entry are drawn like rational numerators/denominators and embedded into
/// doubles. `d` is kept away from zero and the discriminant magnitude at
/// the sampled point away from `min_discriminant` (default 0.1).
pub fn random_complex_quadric(
    cfg: &GenConfig,
) -> Result<(QuadricSurface<num::complex::Complex64>, ColVector<num::complex::Complex64>)> {
    use num::complex::Complex64;
    use num::ToPrimitive;

    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let min_disc = cfg.min_discriminant.unwrap_or(0.1);
    let draw_cx = |rng: &mut ChaCha20Rng, bound: i64| {
        let re = draw_rat(rng, cfg, bound).to_f64().unwrap();
        let im = draw_rat(rng, cfg, bound).to_f64().unwrap();
        Complex64::new(re, im)
    };
    for _ in 0..MAX_GEN_ATTEMPTS {
        let m = cfg.n + 2;
        let mut sym = Matrix::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let v = draw_cx(&mut rng, cfg.entry_range);
                sym.set(i, j, v);
                sym.set(j, i, v);
            }
        }
        let bound = cfg.point_range.unwrap_or(cfg.entry_range);
        let x = ColVector::from_fn(cfg.n, |_| draw_cx(&mut rng, bound));
        let q = QuadricSurface::new(cfg.n, sym)?;
        let parts = decompose(&q);
        if cfg.require_d_nonzero && parts.d.magnitude() < cfg.min_d.unwrap_or(0.5) {
            continue;
        }
        let dd = discriminant_data(&parts);
        let delta = discriminant_value(&dd, &x)?;
        if delta.magnitude() < min_disc {
            continue;
        }
        return Ok((q, x));
    }
    Err(Error::GenerationExhausted(MAX_GEN_ATTEMPTS))
}
