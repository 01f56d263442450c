use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("cat preparation failed verification {attempts} times in a row")]
    CatPreparation { attempts: u32 },

    #[error("fit needs at least 3 points with distinct positive x, got {0}")]
    InsufficientPoints(usize),

    #[error("no break-even in sweep range")]
    NoBreakEven,

    #[error("no equilibrium: amplification * reduction = {0} >= 1")]
    Divergent(f64),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }
}
