use thiserror::Error;

/// Unified error type for the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mode count {0} outside supported range 1..=12")]
    ModeCountOutOfRange(usize),

    #[error("index {index} out of range for {what} (limit {limit})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("invalid exchange: Majorana indices {0} and {1} must be distinct")]
    InvalidExchange(usize, usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("cannot project onto outcome with probability {prob:.3e}")]
    ZeroProbabilityBranch { prob: f64 },

    #[error("register assignment overlaps: Majorana index {0} claimed twice")]
    OverlappingAssignment(usize),

    #[error("state not normalized: |psi|^2 = {0}")]
    NotNormalized(f64),

    #[error("state leaks out of the computational subspace: leakage {0:.3e}")]
    Leakage(f64),

    #[error("no braid word of length <= {max_len} realizes the target")]
    SynthesisNotFound { max_len: usize },

    #[error("quadrature failed to converge: estimated error {err:.3e} after {evals} evaluations")]
    QuadratureNonConvergence { err: f64, evals: usize },

    #[error("root finding failed: no sign change on the bracket [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),

    #[error("ancilla pair not restored to its reference state (residual {0:.3e})")]
    AncillaNotReset(f64),

    #[error("mode occupancy is not definite (mean {0:.6})")]
    IndefiniteOccupancy(f64),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
