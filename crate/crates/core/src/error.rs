use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("coefficient of z^{exponent} requested beyond truncation order {order}")]
    BeyondTruncation { exponent: i64, order: i64 },

    #[error("exp requires zero constant term")]
    ExpConstantTerm,

    #[error("series must have leading term exactly 1")]
    LeadingNotOne,

    #[error("logarithmic term: residue is nonzero")]
    LogarithmicTerm,

    #[error("series is not invertible: leading coefficient is not a nonzero constant")]
    NotInvertible,

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("weight cutoff {cutoff} is below the required minimum {required}")]
    CutoffTooSmall { cutoff: i64, required: i64 },

    #[error("cutoff mismatch: {0}")]
    CutoffMismatch(String),

    #[error("no symmetric fundamental form in ansatz: {0}")]
    InconsistentSystem(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("internal error: {0}")]
    Internal(String),
}
