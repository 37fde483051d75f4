use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite evaluation of {what} at x={x:?}, u={u:?}")]
    NonFinite {
        what: &'static str,
        x: Vec<f64>,
        u: Vec<f64>,
    },

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("explicit scheme unstable: n_t = {given} but at least {required} time steps are required")]
    StabilityBound { given: usize, required: usize },

    #[error("HJB update diverged at time index {t_index}, x = {x}")]
    HjbDiverged { t_index: usize, x: f64 },

    #[error("control constraint infeasible: {0}")]
    Infeasible(String),

    #[error("exponent overflow in exact GBM path at step {step}")]
    Overflow { step: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("config parse error: {0}")]
    Config(String),
}

impl Error {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
