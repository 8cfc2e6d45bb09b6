use alloc::string::String;
use core::fmt;

/// Errors reported by the passivity library.
#[derive(Debug, Clone, PartialEq)]
pub enum SlpError {
    /// An operator expected to be Hermitian was not, within [`crate::tol::HERMITICITY`].
    NotHermitian { max_dev: f64 },
    /// A supplied eigendecomposition does not reproduce its operator.
    BadDecomposition { max_dev: f64 },
    /// Matrix or vector dimensions are inconsistent with the model.
    DimensionMismatch { expected: usize, got: usize },
    /// A Kraus set or Stiefel point fails its completeness/isometry identity.
    NotCompletenessPreserving { max_dev: f64 },
    /// A population vector is not a probability distribution.
    BadPopulations { reason: &'static str },
    /// A scalar parameter is outside its admissible range.
    BadParameter { name: &'static str, reason: String },
    /// The requested quantity is not defined for this model or state.
    NotApplicable { reason: String },
    /// An iterative method failed to reach its target accuracy.
    NumericsFailed { reason: String },
}

impl fmt::Display for SlpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlpError::NotHermitian { max_dev } => {
                write!(f, "operator is not Hermitian (max |H - H†| = {max_dev:.3e})")
            }
            SlpError::BadDecomposition { max_dev } => {
                write!(f, "eigendecomposition does not reproduce the operator (max dev = {max_dev:.3e})")
            }
            SlpError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            SlpError::NotCompletenessPreserving { max_dev } => {
                write!(f, "Kraus set violates Σ K†K = 1 (max dev = {max_dev:.3e})")
            }
            SlpError::BadPopulations { reason } => {
                write!(f, "invalid populations: {reason}")
            }
            SlpError::BadParameter { name, reason } => {
                write!(f, "invalid parameter `{name}`: {reason}")
            }
            SlpError::NotApplicable { reason } => {
                write!(f, "not applicable: {reason}")
            }
            SlpError::NumericsFailed { reason } => {
                write!(f, "numerical method failed: {reason}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SlpError {}
