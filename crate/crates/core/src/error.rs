//! Crate-wide error type.
//!
//! Numerical routines never return silent garbage: every failure mode
//! (non-convergence, violated precondition, ill-conditioning) maps to an
//! explicit variant so callers can distinguish bad input from a numerical
//! breakdown.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes surfaced by the library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A matrix constructor was handed data whose length does not form a square.
    #[error("matrix data of length {len} does not fill a {dim}x{dim} square")]
    NotSquare { dim: usize, len: usize },

    /// A matrix or vector entry is NaN or infinite.
    #[error("non-finite entry encountered at position ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    /// Two operands have incompatible dimensions.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// Dense routines are capped at desk scale.
    #[error("dimension {dim} exceeds the supported maximum {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    /// The QR eigenvalue iteration failed to deflate within its budget.
    #[error("eigenvalue iteration did not converge within {sweeps} sweeps")]
    EigNoConvergence { sweeps: usize },

    /// A Jacobi-type iteration (Hermitian eigensolver / SVD) stalled.
    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    JacobiNoConvergence { sweeps: usize },

    /// Input expected to be Hermitian was not, within tolerance.
    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    /// Input expected to be Hermitian positive definite was not.
    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    /// Input expected to be unitary was not, within tolerance.
    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    /// Input expected to be complex symmetric (U = U^T) was not.
    #[error("matrix is not complex symmetric (residual {residual:.3e})")]
    NotComplexSymmetric { residual: f64 },

    /// Takagi factorization could not reach the requested accuracy.
    #[error("Takagi factorization stalled (best residual {residual:.3e})")]
    TakagiNoConvergence { residual: f64 },

    /// A linear solve encountered an (numerically) singular matrix.
    #[error("matrix is singular to working precision (pivot {pivot:.3e})")]
    Singular { pivot: f64 },

    /// An operation requiring an antiunitary involution received something else.
    #[error("operator is not an antiunitary involution (unitarity residual {unitarity:.3e}, involution residual {involution:.3e})")]
    NotAntiunitaryInvolution { unitarity: f64, involution: f64 },

    /// An operation requiring an eta-antiunitary operator received something else.
    #[error("operator is not eta-antiunitary (residual {residual:.3e})")]
    NotEtaAntiunitary { residual: f64 },

    /// A phase-gated operation was called outside the unbroken phase.
    #[error("operator is not in the unbroken phase (classified as {phase})")]
    PhaseNotUnbroken { phase: String },

    /// No K-invariant basis spans a degenerate eigenspace.
    #[error("eigenspace of {eigenvalue} admits only {found} of {needed} K-invariant directions")]
    KInvariantBasisDeficient {
        eigenvalue: f64,
        found: usize,
        needed: usize,
    },

    /// Distinct eigenvalue clusters are too close for stable Lagrange interpolation.
    #[error("eigenvalue clusters separated by {gap:.3e} are too close for stable projector interpolation")]
    ProjectorConditioning { gap: f64 },

    /// The 2x2 family parameter alpha is undefined (broken or exceptional regime).
    #[error("alpha undefined: |(r/s) sin(theta)| = {value:.6} is not < 1")]
    AlphaUndefined { value: f64 },

    /// The 2x2 family requires s != 0 for its eigenvector formulas.
    #[error("the 2x2 family requires a nonzero coupling s")]
    ZeroCoupling,

    /// A matrix expected to be eta-Hermitian was not.
    #[error("matrix is not eta-Hermitian (residual {residual:.3e})")]
    NotEtaHermitian { residual: f64 },

    /// A matrix expected to be an eta-effect (0 <= E <= 1 in the eta order) was not.
    #[error("matrix is not an effect: {reason}")]
    NotEffect { reason: String },

    /// A matrix expected to be a density matrix was not.
    #[error("matrix is not a density matrix: {reason}")]
    NotDensityMatrix { reason: String },

    /// A trace expected to be real carried a significant imaginary part.
    #[error("trace has imaginary part {imag:.3e}, above tolerance {tol:.3e}")]
    ComplexTrace { imag: f64, tol: f64 },

    /// The LP engine exhausted its pivot budget.
    #[error("simplex iteration budget of {budget} pivots exhausted")]
    LpBudgetExhausted { budget: usize },

    /// The LP was detected to be infeasible where feasibility was expected.
    #[error("linear program infeasible (phase-one objective {phase_one:.3e})")]
    LpInfeasible { phase_one: f64 },

    /// The LP is unbounded along the probe objective.
    #[error("linear program unbounded along the probe objective")]
    LpUnbounded,

    /// Generic invalid argument with context.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
