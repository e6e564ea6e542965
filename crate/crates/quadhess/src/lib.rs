//! Quadric-hypersurface toolkit.
//!
//! A quadric in graph form is the zero set of `v^T Q v` with
//! `v = (x, y, 1)`; locally it defines a function `y(x)` by solving the
//! quadratic in `y`. This crate computes the closed-form gradient and
//! Hessian of that graph function and verifies the determinant identity
//!
//! ```text
//! |-/+ H_y(x)| * Delta_y(x)^(n/2+1) = -|Q + Q^T|
//! ```
//!
//! where `Delta_y` is the discriminant of the quadratic in `y` and the sign
//! is opposite to the chosen root branch. Verification runs exactly over
//! arbitrary-precision rationals (the left side is rationalized so no square
//! root is ever taken), and numerically over `f64` and conjugation-free
//! `Complex64`. Independent oracles (finite differences, implicit
//! differentiation, cofactor determinants, a seeded instance generator) back
//! every closed form.

pub mod error;
pub mod identity;
pub mod linalg;
pub mod oracle;
pub mod quadric;
pub mod scalar;

pub use error::{Error, Result};
pub use linalg::{ColVector, Matrix};
pub use quadric::{BlockParts, BranchSign, DiscriminantData, QuadricSurface};
pub use scalar::{Scalar, ScalarKind};
