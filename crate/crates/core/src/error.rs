use thiserror::Error;

/// Failures raised by the numerical routines.
///
/// Every variant except [`Error::Parse`] signals that the input violates a
/// precondition of the requested operation. Messages start with the variant name.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("DimensionError: {0}")]
    DimensionError(String),

    #[error("NonFinite: entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("InvalidTolerance: {0}")]
    InvalidTolerance(String),

    #[error("SingularInput: {0}")]
    SingularInput(String),

    #[error("NotSymmetric: asymmetry {asymmetry:e} exceeds {bound:e}")]
    NotSymmetric { asymmetry: f64, bound: f64 },

    #[error("NotPositiveDefinite: minimal eigenvalue {min_eig:e}")]
    NotPositiveDefinite { min_eig: f64 },

    #[error("NotSkewHamiltonian: residual {residual:e} exceeds {bound:e}")]
    NotSkewHamiltonian { residual: f64, bound: f64 },

    #[error("DegenerateSpectrum: {0}")]
    DegenerateSpectrum(String),

    #[error("ClusteringAmbiguous: {0}")]
    ClusteringAmbiguous(String),

    #[error("IsotropicEigenspace: symplectic form degenerates on the eigenspace of {eigenvalue}")]
    IsotropicEigenspace { eigenvalue: String },

    #[error("EigenFailure: {0}")]
    EigenFailure(String),

    #[error(
        "NoNonsingularFactor: none after {draws} draws (best reciprocal condition {best_rcond:e})"
    )]
    NoNonsingularFactor { draws: usize, best_rcond: f64 },

    #[error("NotPure: {0}")]
    NotPure(String),

    #[error("ResidualContract: {what} residual {value:e} exceeds {bound:e}")]
    ResidualContract {
        what: &'static str,
        value: f64,
        bound: f64,
    },

    #[error("Parse: {0}")]
    Parse(String),
}

impl Error {
    /// True for malformed documents, false for well-formed input that
    /// breaks a numerical precondition.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
