//! The three scalar kinds the toolkit computes over: arbitrary-precision
//! rationals, 64-bit reals and 64-bit complex numbers.
//!
//! Rational arithmetic is exact and is the ground-truth path for identity
//! verification; the floating kinds share one generic code path and differ
//! only in how square roots and sign tests behave. Complex arithmetic is
//! conjugation-free throughout, so derivatives stay holomorphic.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::complex::Complex64;
use num::{BigInt, BigRational, FromPrimitive, Signed, ToPrimitive, Zero};

/// Which of the three scalar fields a value belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalarKind {
    Rational,
    Float,
    Complex,
}

impl fmt::Display for ScalarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarKind::Rational => write!(f, "exact"),
            ScalarKind::Float => write!(f, "float"),
            ScalarKind::Complex => write!(f, "complex"),
        }
    }
}

/// Field operations shared by the three scalar kinds.
///
/// All arithmetic is by value; implementations are cheap to clone at the
/// matrix sizes this crate works with.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const KIND: ScalarKind;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(v: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Embed a rational value into this field (lossless for the rational
    /// kind, nearest-double otherwise).
    fn from_rational(r: &BigRational) -> Self;
    /// Nearest value to a double in this field. For the rational kind this
    /// is the exact binary value of the double.
    fn from_f64(v: f64) -> Self;

    /// Exact zero test. Never tolerance-based; thresholded comparisons go
    /// through [`Scalar::magnitude`].
    fn is_zero(&self) -> bool;

    /// |self| as a double, for pivot selection and tolerance checks.
    fn magnitude(&self) -> f64;

    /// Sign of the value as a real number, or `None` for the complex kind
    /// (and for NaN). Exact for rationals.
    fn real_sign(&self) -> Option<Ordering>;

    /// Square root within the field, if one exists.
    ///
    /// Rationals: `Some` only for perfect rational squares. Reals: principal
    /// root of non-negative values. Complex: principal branch (argument in
    /// (-pi/2, pi/2]), always defined.
    fn try_sqrt(&self) -> Option<Self>;

    /// Absolute value: `|p/q|` for rationals, `|x|` for reals, the modulus
    /// (as a real complex number) for the complex kind.
    fn abs_value(&self) -> Self;

    fn is_exact() -> bool {
        Self::KIND == ScalarKind::Rational
    }

    /// Integer power, with negative exponents via field division.
    fn powi(&self, exp: i32) -> Self {
        if exp < 0 {
            return Self::one() / self.powi(-exp);
        }
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Scalar for BigRational {
    const KIND: ScalarKind = ScalarKind::Rational;

    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }

    fn one() -> Self {
        <BigRational as num::One>::one()
    }

    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn from_f64(v: f64) -> Self {
        <BigRational as FromPrimitive>::from_f64(v).expect("finite float")
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn magnitude(&self) -> f64 {
        self.to_f64().map(f64::abs).unwrap_or(f64::INFINITY)
    }

    fn real_sign(&self) -> Option<Ordering> {
        Some(self.cmp(&<BigRational as Zero>::zero()))
    }

    fn try_sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let num = self.numer();
        let den = self.denom();
        // `self` is stored reduced, so numerator and denominator must be
        // perfect squares independently.
        let sn = num.sqrt();
        if &(&sn * &sn) != num {
            return None;
        }
        let sd = den.sqrt();
        if &(&sd * &sd) != den {
            return None;
        }
        Some(BigRational::new(sn, sd))
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }
}

impl Scalar for f64 {
    const KIND: ScalarKind = ScalarKind::Float;

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_rational(r: &BigRational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }

    fn real_sign(&self) -> Option<Ordering> {
        self.partial_cmp(&0.0)
    }

    fn try_sqrt(&self) -> Option<Self> {
        if *self >= 0.0 {
            Some(self.sqrt())
        } else {
            None
        }
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }

    fn powi(&self, exp: i32) -> Self {
        f64::powi(*self, exp)
    }
}

impl Scalar for Complex64 {
    const KIND: ScalarKind = ScalarKind::Complex;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }

    fn from_int(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }

    fn from_rational(r: &BigRational) -> Self {
        Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn from_f64(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }

    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }

    fn real_sign(&self) -> Option<Ordering> {
        None
    }

    fn try_sqrt(&self) -> Option<Self> {
        // Principal branch; no conjugation anywhere.
        Some(self.sqrt())
    }

    fn abs_value(&self) -> Self {
        Complex64::new(self.norm(), 0.0)
    }
}

/// Shorthand used throughout tests and the generator.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_sqrt_of_perfect_square() {
        let v = rat(64, 25);
        assert_eq!(v.try_sqrt(), Some(rat(8, 5)));
    }

    #[test]
    fn rational_sqrt_rejects_non_squares() {
        assert_eq!(rat(2, 1).try_sqrt(), None);
        assert_eq!(rat(4, 3).try_sqrt(), None);
        assert_eq!(rat(-4, 1).try_sqrt(), None);
    }

    #[test]
    fn rational_powi_negative_exponent() {
        assert_eq!(Scalar::powi(&rat(2, 3), -2), rat(9, 4));
    }

    #[test]
    fn complex_principal_sqrt() {
        let v = Complex64::new(-4.0, 0.0);
        let s = v.try_sqrt().unwrap();
        assert!((s.re - 0.0).abs() < 1e-15 && (s.im - 2.0).abs() < 1e-15);
    }

    #[test]
    fn signs() {
        assert_eq!(rat(-3, 7).real_sign(), Some(Ordering::Less));
        assert_eq!(0.5f64.real_sign(), Some(Ordering::Greater));
        assert_eq!(Complex64::new(1.0, 0.0).real_sign(), None);
    }
}
