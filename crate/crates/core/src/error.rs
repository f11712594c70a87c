use thiserror::Error;

/// Errors raised by state construction, entropy evaluation, and measurement.
#[derive(Debug, Error)]
pub enum QError {
    #[error("operator is not Hermitian: max |M - M\u{2020}| entry = {defect:.3e}")]
    NotHermitian { defect: f64 },

    #[error("operator does not have unit trace: |Tr - 1| = {defect:.3e}")]
    NotUnitTrace { defect: f64 },

    #[error("operator is not positive semidefinite: min eigenvalue = {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),

    #[error("duplicate subsystem label `{0}`")]
    DuplicateLabel(String),

    #[error("label sets overlap on `{0}`")]
    OverlappingLabels(String),

    #[error("cannot discard every subsystem")]
    EmptyKeepSet,

    #[error("subsystem subset must be nonempty")]
    EmptySubset,

    #[error("layout dimensions multiply to {product}, state dimension is {dim}")]
    LayoutMismatch { product: usize, dim: usize },

    #[error("ensemble probabilities sum to {sum}, expected 1")]
    ProbabilitiesNotNormalized { sum: f64 },

    #[error("ensemble has {probs} probabilities but {states} states")]
    EnsembleLengthMismatch { probs: usize, states: usize },

    #[error("ensemble is empty")]
    EmptyEnsemble,

    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("ancilla dimension {ancilla} is smaller than outcome count {outcomes}")]
    AncillaTooSmall { ancilla: usize, outcomes: usize },

    #[error("invalid optimizer config: {0}")]
    InvalidConfig(String),

    #[error("invalid rank {rank} for dimension {dim}")]
    InvalidRank { rank: usize, dim: usize },
}

pub type Result<T> = std::result::Result<T, QError>;
