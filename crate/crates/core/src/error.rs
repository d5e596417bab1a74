use crate::fockspace::HilbertSpace;
use crate::lindblad::MeTrajectory;

/// Crate-wide error type. Variants that carry partial results (for example
/// a completed trajectory whose truncation tail grew past threshold) box
/// them so the enum stays cheap to move.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("Hilbert space dimension must be at least 1, got {0}")]
    InvalidDimension(usize),

    #[error("operands act on different spaces: {left} vs {right}")]
    SpaceMismatch { left: HilbertSpace, right: HilbertSpace },

    #[error("matrix is {rows}x{cols} but the space has dimension {dim}")]
    ShapeMismatch { rows: usize, cols: usize, dim: usize },

    #[error("operator is not Hermitian: max |A - A^dag| = {residual:.3e}")]
    NotHermitian { residual: f64 },

    #[error("dissipator rate must be nonnegative, got {0}")]
    NegativeRate(f64),

    #[error("invalid density matrix: {reason}")]
    InvalidState { reason: String },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("trace drifted by {drift:.3e} at t = {t:.6} (tolerance {tol:.1e})")]
    TraceDrift { t: f64, drift: f64, tol: f64 },

    /// Warning-class: the evolution finished, but the top-level population
    /// exceeded the configured threshold at some recorded time. The full
    /// trajectory is retained for inspection.
    #[error(
        "truncation tail population reached {max_tail:.3e} (threshold {threshold:.1e}); \
         enlarge the basis. Completed trajectory attached"
    )]
    TruncationTail {
        max_tail: f64,
        threshold: f64,
        trajectory: Box<MeTrajectory>,
    },

    #[error("truncated basis too small: {reason}")]
    TruncationInadequate { reason: String },

    #[error("steady state is not unique: the generator null space has dimension >= 2")]
    NoUniqueSteadyState,

    #[error("steady-state solve failed: {reason}")]
    SteadyStateSolve { reason: String },

    #[error("trajectory diverged: |state| exceeded {guard:.1e} at t = {t:.6}")]
    Divergence { t: f64, guard: f64 },

    #[error("limit-cycle extraction failed: {reason}")]
    NoLimitCycle { reason: String },

    #[error("no finite limit cycle for Re(lambda1) = {re_l1}, Re(lambda2) = {re_l2}")]
    NoFiniteCycle { re_l1: f64, re_l2: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
