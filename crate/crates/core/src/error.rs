use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = KernelError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("point outside the domain: {0}")]
    Domain(String),

    /// The base of a power or logarithm left the right half-plane.
    #[error("principal branch violated: base value {value} has non-positive real part")]
    Branch { value: Complex64 },

    #[error("kernel value vanishes at the evaluation pair")]
    ZeroKernelValue,

    #[error("derivative order {order} exceeds the configured cap {cap}")]
    OrderCap { order: usize, cap: usize },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("evaluation failed at pair ({p}, {q}): {source}")]
    AtPair {
        p: usize,
        q: usize,
        #[source]
        source: Box<KernelError>,
    },

    #[error("no sign change of the psd verdict on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("no finite multiplier bound found below c = {limit}")]
    NoBracket { limit: f64 },

    #[error("RKHS elements reference different kernels")]
    KernelMismatch,

    #[error("squared norm {0} is negative beyond tolerance; kernel is not non-negative definite")]
    NegativeNorm(f64),
}

impl KernelError {
    /// True for failures of a bisection to find a bracket, as opposed to
    /// configuration or evaluation failures.
    pub fn is_bracket_failure(&self) -> bool {
        matches!(self, KernelError::NoSignChange { .. } | KernelError::NoBracket { .. })
    }

    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            KernelError::Syntax { .. }
                | KernelError::Shape(_)
                | KernelError::InvalidParameter(_)
                | KernelError::DimensionMismatch { .. }
        )
    }
}
