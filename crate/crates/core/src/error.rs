//! Error type shared by all state-construction and analysis routines.

use thiserror::Error;

/// Errors produced by state construction, measurement, and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QmError {
    /// Two values that must share a dimension do not.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A basis or outcome index beyond the state's dimension.
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    /// States are restricted to one spin (dimension 2) or two spins (dimension 4).
    #[error("unsupported dimension {0}: only 2 and 4 are available")]
    UnsupportedDimension(usize),

    /// An all-zero amplitude vector cannot represent a state.
    #[error("zero vector cannot be normalized into a state")]
    ZeroVector,

    /// Amplitudes whose squared magnitudes do not sum to 1.
    #[error("state is not normalized: squared norm = {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },

    /// Mixture weights must be nonnegative and sum to 1.
    #[error("invalid mixture weights (sum = {sum})")]
    InvalidWeights { sum: f64 },

    /// A density matrix that is not equal to its conjugate transpose.
    #[error("matrix is not Hermitian within tolerance")]
    NotHermitian,

    /// A density matrix whose trace differs from 1.
    #[error("matrix trace {trace} is not 1 within tolerance")]
    BadTrace { trace: f64 },

    /// A density matrix with an eigenvalue below the positivity floor.
    #[error("matrix has an eigenvalue below the positivity floor")]
    NotPositive,

    /// A measurement basis that is not orthonormal and complete.
    #[error("measurement basis is not orthonormal within tolerance")]
    NonOrthonormalBasis,

    /// An angle outside its documented range.
    #[error("angle {name} = {value} is outside its valid range")]
    AngleOutOfRange { name: &'static str, value: f64 },

    /// A direction vector of near-zero length.
    #[error("direction vector has near-zero length")]
    ZeroDirection,

    /// The pure state and the mixture do not share diagonal probabilities.
    #[error("diagonal probabilities of the state and the mixture differ beyond tolerance")]
    DiagonalMismatch,

    /// A precondition violation not covered by a more specific variant.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two independent evaluations of the same quantity disagree.
    #[error("internal cross-check failed: {what} disagree by {delta:e}")]
    CrossCheck { what: &'static str, delta: f64 },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, QmError>;
