use thiserror::Error;

/// Errors shared across the toolkit. Precondition failures are ordinary
/// values here so batch verification can record a skip instead of aborting.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular")]
    Singular,
    #[error("rank-one update is singular (u^T R^-1 s = -1)")]
    UpdateSingular,
    #[error("matrix of size {size} exceeds the cofactor-expansion limit {max}")]
    TooLarge { size: usize, max: usize },
    #[error("leading coefficient d is zero; the branch-based path is undefined")]
    DegenerateLeadingCoefficient,
    #[error("discriminant is negative; no real branch exists")]
    NoRealSolution,
    #[error("point lies on the discriminant locus (discriminant is zero)")]
    OnDiscriminantLocus,
    #[error("discriminant is not a perfect rational square; exact root unavailable")]
    IrrationalSquareRoot,
    #[error("point is off the surface (residual magnitude {0:.3e})")]
    OffSurface(f64),
    #[error("vertical tangent: the y-derivative of the defining form vanishes")]
    VerticalTangent,
    #[error("finite-difference stencil left the domain: {0}")]
    Stencil(Box<Error>),
    #[error("instance generation exhausted after {0} attempts")]
    GenerationExhausted(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
