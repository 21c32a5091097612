//! Error type shared by every module in the crate.

use thiserror::Error;

/// Unified error type for the toolkit.
///
/// Numerical routines distinguish between contract violations
/// ([`Error::InvalidParameter`], [`Error::SizeExceeded`], [`Error::ShapeMismatch`])
/// and honest numerical failures ([`Error::NoConvergence`],
/// [`Error::DegenerateSpectrum`], …). Callers that can continue past a
/// failure (e.g. per-index reports) embed the condition in their result type
/// instead of returning an error.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside the domain where the requested family or
    /// operation is defined (e.g. a classical family past its validity index,
    /// or a zero off-diagonal coefficient where the recurrence divides by it).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A size cap was exceeded (dense solves are capped at 512, closed-form
    /// coefficient expansion at 64).
    #[error("size exceeded: {0}")]
    SizeExceeded(String),

    /// Dimensions of two inputs do not match.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A (value, vector) pair failed re-validation against its matrix.
    #[error("not an eigenpair: {0}")]
    NotAnEigenpair(String),

    /// An iteration hit its sweep cap before reaching its tolerance; the
    /// payload is the number of iterations performed.
    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),

    /// Two spectrum points coincide to within the node separation tolerance,
    /// so a simple-node quadrature measure cannot be built.
    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    /// An eigenvector is quasi-null in the bilinear form (vᵀv ≈ 0), so it
    /// cannot be normalized bilinearly.
    #[error("quasi-null vector: {0}")]
    QuasiNullVector(String),

    /// The moment system for quadrature weights is numerically singular.
    #[error("singular moment system: {0}")]
    SingularMomentSystem(String),

    /// The parameters violate the hypothesis a statement needs
    /// (e.g. |λ| ≥ μ/(2√2) where the smallest-zero bound requires less).
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    /// No real zero was found in the search interval.
    #[error("no real zero: {0}")]
    NoRealZero(String),

    /// Eigenvalue continuation lost its target between consecutive sizes.
    #[error("tracking lost: {0}")]
    TrackingLost(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
