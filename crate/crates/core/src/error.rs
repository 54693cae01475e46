use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, SosError>;

/// Everything that can go wrong while evaluating a partition function or
/// one of the identity checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SosError {
    #[error("lattice size must be at least 1")]
    EmptyLattice,
    #[error("dynamical argument {arg} is within the singular band of sinh (|s| <= 1e-8)")]
    SingularTheta { arg: Complex64 },
    #[error("crossing parameter gamma = {gamma} is degenerate (|s(gamma)| <= 1e-8)")]
    DegenerateCrossing { gamma: Complex64 },
    #[error("spectral parameters {i} and {j} coincide (|s(lambda_i - lambda_j)| <= 1e-6)")]
    CoincidentSpectral { i: usize, j: usize },
    #[error("inhomogeneities {i} and {j} coincide (|s(mu_i - mu_j)| <= 1e-6)")]
    CoincidentInhomogeneity { i: usize, j: usize },
    #[error("expected {expected} spectral parameters, found {found}")]
    BadLength { expected: usize, found: usize },
    #[error("{route} route supports L <= {max}, requested L = {size}")]
    TooLarge { route: &'static str, size: usize, max: usize },
    #[error("height quartet {0:?} is not an admissible face configuration")]
    InvalidQuartet([i32; 4]),
    #[error("hexagon boundary {0:?} violates adjacency")]
    InvalidBoundary([i32; 6]),
    #[error("K-factor has a vanishing eigenvalue on some basis state")]
    SingularKFactor,
    #[error("integrand evaluated on a pole")]
    PoleHit,
    #[error("contour is not admissible: {0}")]
    ContourInvalid(String),
    #[error("quadrature did not converge (last relative change {change:e} at {nodes} nodes)")]
    NoConvergence { nodes: usize, change: f64 },
    #[error("no polynomial fit up to degree {max_degree}")]
    NoPolynomialFit { max_degree: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl SosError {
    /// Stable identifier used in machine-readable error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            SosError::EmptyLattice => "EmptyLattice",
            SosError::SingularTheta { .. } => "SingularTheta",
            SosError::DegenerateCrossing { .. } => "DegenerateCrossing",
            SosError::CoincidentSpectral { .. } => "CoincidentSpectral",
            SosError::CoincidentInhomogeneity { .. } => "CoincidentInhomogeneity",
            SosError::BadLength { .. } => "BadLength",
            SosError::TooLarge { .. } => "TooLarge",
            SosError::InvalidQuartet(_) => "InvalidQuartet",
            SosError::InvalidBoundary(_) => "InvalidBoundary",
            SosError::SingularKFactor => "SingularKFactor",
            SosError::PoleHit => "PoleHit",
            SosError::ContourInvalid(_) => "ContourInvalid",
            SosError::NoConvergence { .. } => "NoConvergence",
            SosError::NoPolynomialFit { .. } => "NoPolynomialFit",
            SosError::InvalidArgument(_) => "InvalidArgument",
        }
    }

    /// True for errors caused by the inputs rather than by a numerical
    /// breakdown during evaluation.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            SosError::NoConvergence { .. }
                | SosError::NoPolynomialFit { .. }
                | SosError::PoleHit
                | SosError::SingularKFactor
        )
    }
}
