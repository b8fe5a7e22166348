use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("matrix has negative eigenvalue {min_eigenvalue:.3e}")]
    NegativeEigenvalue { min_eigenvalue: f64 },
    #[error("matrix is numerically singular (smallest singular value {sigma_min:.3e})")]
    Singular { sigma_min: f64 },
    #[error("Fourier index {index} aliases on a grid of {nodes} nodes")]
    AliasedIndex { index: i64, nodes: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid boundary sampling: {0}")]
    InvalidSampling(String),
    #[error("evaluation point within {distance:.3e} of a singularity")]
    PoleProximity { distance: f64 },
    #[error("point mass at E = {energy} lies on [-2, 2]")]
    MassOnSupport { energy: f64 },
    #[error("{0}")]
    Validation(String),
    #[error("Stieltjes procedure lost positivity at degree {degree} (min eigenvalue {min_eigenvalue:.3e})")]
    LostPositivity { degree: usize, min_eigenvalue: f64 },
    #[error("weight is not positive definite at node {node} (det {det:.3e})")]
    NotPD { node: usize, det: f64 },
    #[error("iteration did not converge (best residual {best_residual:.3e})")]
    NoConvergence { best_residual: f64 },
    #[error("|z| = {modulus} exceeds the admissible radius {limit}")]
    RadiusExceeded { modulus: f64, limit: f64 },
    #[error("boundary value is singular at node {node}")]
    SingularBoundary { node: usize },
    #[error("evaluation point hits the reflected pole of a factor")]
    PoleAtReflection,
    #[error("poles {first} and {second} coincide")]
    DuplicatePole { first: usize, second: usize },
    #[error("subspace frame is rank deficient")]
    DegenerateFrame,
    #[error("pole is not simple (pole-subtracted remainder grows by factor {growth:.2})")]
    NotSimplePole { growth: f64 },
    #[error("kernel condition violated at bound state {index}: angle {angle:.3e}")]
    KernelMismatch { index: usize, angle: f64 },
    #[error("requested degree {requested} exceeds available depth {available}")]
    DepthExceeded { requested: usize, available: usize },
}

impl Error {
    /// Numerical failures, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::LostPositivity { .. }
                | Error::NotPD { .. }
                | Error::Singular { .. }
                | Error::SingularBoundary { .. }
                | Error::NotSimplePole { .. }
                | Error::KernelMismatch { .. }
                | Error::PoleAtReflection
        )
    }
}
