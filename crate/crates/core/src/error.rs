use std::fmt;

use thiserror::Error;

/// A single violated configuration invariant.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("J must be nonzero")]
    ZeroHopping,
    #[error("{name} must be finite (got {value})")]
    NonFinite { name: &'static str, value: f64 },
    #[error("{name} must be at least 1")]
    EmptyBath { name: &'static str },
    #[error("temperature must be positive (got {0} K)")]
    NonPositiveTemperature(f64),
    #[error("beta must be positive (got {0} ps)")]
    NonPositiveBeta(f64),
    #[error("zero temperature requires {name} > 0 so that the bath ground state is fully polarized down")]
    ZeroTemperatureNeedsPositiveSplitting { name: &'static str },
    #[error("exactly one of temperature_kelvin, beta, zero_temperature must be set")]
    AmbiguousThermal,
}

/// Exhaustive list of everything wrong with a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationErrors(pub Vec<ConfigError>);

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationErrors {}

#[derive(Debug, Error)]
pub enum DimerError {
    #[error("invalid configuration: {0}")]
    Validation(#[from] ValidationErrors),
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("invalid spin pairing: N = {n}, 2j = {twice_j}")]
    InvalidSpin { n: u32, twice_j: i64 },
    #[error("magnetization {value} out of range for a bath of {n} spins")]
    InvalidMagnetization { n: u32, value: f64 },
    #[error("bath size {0} exceeds the exact integer range (max {max})", max = crate::combinatorics::MAX_BATH_SIZE)]
    BathTooLarge(u32),
    #[error("partition function forms disagree: sinh form log Z = {closed}, direct sum log Z = {direct}")]
    PartitionMismatch { closed: f64, direct: f64 },
    #[error("{0}")]
    WrongRegime(&'static str),
    #[error("oracle refuses N1 + N2 = {requested}: limit is {limit}")]
    OracleTooLarge { requested: u32, limit: u32 },
    #[error("unknown sweep parameter '{0}'")]
    UnknownParameter(String),
    #[error("invalid time window: {0}")]
    InvalidWindow(String),
    #[error("coarse time step {dt} ps cannot resolve angular frequency {omega} ps^-1")]
    UnderResolved { dt: f64, omega: f64 },
    #[error("invalid sweep axis: {0}")]
    InvalidAxis(String),
    #[error("config parse error: {0}")]
    ConfigParse(String),
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, DimerError>;
