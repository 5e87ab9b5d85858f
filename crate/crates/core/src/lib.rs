//! Exact transfer dynamics of a two-level dimer whose levels are dephased by
//! two spin-star baths, with an independent dense-diagonalization oracle and
//! time/parameter maximization of the transfer probability.

pub mod analysis;
pub mod combinatorics;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod oracle;

pub use config::{BathParams, CorrelationParams, DimerParams, SystemConfig, ThermalSpec};
pub use error::{ConfigError, DimerError, Result, ValidationErrors};
