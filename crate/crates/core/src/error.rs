use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to parse scenario: {0}")]
    Parse(String),

    #[error("invalid value for `{key}`: {reason}")]
    Validation { key: String, reason: String },

    #[error("{quantity} = {value} is outside the supported range {range}")]
    Domain { quantity: &'static str, value: f64, range: &'static str },

    #[error("flight distance {d_fly} m is shorter than the {required} m needed to accelerate and decelerate")]
    Geometry { d_fly: f64, required: f64 },

    #[error("charging coefficient too small: C*T_p2 + b = {available} must exceed {required} (increase T_p2)")]
    InfeasibleEnergy { available: f64, required: f64 },

    #[error("power budget exhausted for {scheme} with Q = {antennas}: transmit power would be {power} W")]
    BudgetExhausted { scheme: String, antennas: usize, power: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("time allocation is infeasible: {0}")]
    Infeasible(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn validation(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation { key: key.into(), reason: reason.into() }
    }
}
