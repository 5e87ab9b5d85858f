//! Exact transfer probability P₁→₂(t) for the dimer in every bath regime.
//!
//! Every bath operator commutes with H, so each bath magnetization sector
//! (m₁, m₂) evolves as an isolated two-level problem with detuning
//! Δ_{m₁,m₂} = (ε₂ − ε₁)/2 + (γ₂m₂ − γ₁m₁)/2. The sector-diagonal identity
//! part of H only contributes a phase and is never formed.

mod ground_state;
mod profile;

pub use ground_state::{
    assistance_condition, correlated_ground_state, delta0_correlated, delta0_for_branch,
    p12_correlated_zero_temp, q_threshold, resonance_gamma, resonance_gamma_in, Assistance, Corner, FreeCoupling,
    GroundStateBranch, ResonanceSolution, Superposition, CLASSIFICATION_TOLERANCE,
};
pub use profile::{SectorTerm, TransitionProfile};

use crate::combinatorics::{magnetizations, HalfInt, MultiplicityTable};
use crate::config::SystemConfig;
use crate::error::{DimerError, Result};

/// Where a detuning value came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DetuningSource {
    /// Free dimer, (ε₂ − ε₁)/2.
    Bare,
    /// Independent baths fully polarized down.
    ZeroTemperature,
    Sector { m1: HalfInt, m2: HalfInt },
    CorrelatedGroundState,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detuning {
    pub value: f64,
    pub source: DetuningSource,
}

/// J²/(J² + Δ²) · sin²(t√(J² + Δ²)).
pub fn rabi_probability(hopping: f64, detuning: f64, t: f64) -> f64 {
    let j2 = hopping * hopping;
    let w2 = j2 + detuning * detuning;
    let s = (t * w2.sqrt()).sin();
    j2 / w2 * s * s
}

/// First maximum of the Rabi formula: (t*, P*) = (π/(2Ω), J²/Ω²).
pub fn rabi_peak(hopping: f64, detuning: f64) -> (f64, f64) {
    let j2 = hopping * hopping;
    let w2 = j2 + detuning * detuning;
    (std::f64::consts::FRAC_PI_2 / w2.sqrt(), j2 / w2)
}

pub fn bare_detuning(config: &SystemConfig) -> Detuning {
    Detuning {
        value: config.half_gap(),
        source: DetuningSource::Bare,
    }
}

/// Δ = (ε₂ − ε₁)/2 + (γ₁N₁ − γ₂N₂)/4.
pub fn detuning_zero_temp(config: &SystemConfig) -> Detuning {
    let shift = (config.bath1.coupling * f64::from(config.bath1.size)
        - config.bath2.coupling * f64::from(config.bath2.size))
        / 4.0;
    Detuning {
        value: config.half_gap() + shift,
        source: DetuningSource::ZeroTemperature,
    }
}

fn sector_value(config: &SystemConfig, m1: f64, m2: f64) -> f64 {
    config.half_gap() + (config.bath2.coupling * m2 - config.bath1.coupling * m1) / 2.0
}

/// Δ_{m₁,m₂} for one bath magnetization sector.
pub fn detuning_sector(config: &SystemConfig, m1: HalfInt, m2: HalfInt) -> Result<Detuning> {
    for (n, m) in [(config.bath1.size, m1), (config.bath2.size, m2)] {
        let n_i = i64::from(n);
        if m.twice().abs() > n_i || (n_i - m.twice()) % 2 != 0 {
            return Err(DimerError::InvalidMagnetization { n, value: m.value() });
        }
    }
    Ok(Detuning {
        value: sector_value(config, m1.value(), m2.value()),
        source: DetuningSource::Sector { m1, m2 },
    })
}

/// Zero-temperature probability for independent baths.
pub fn p12_zero_temp(config: &SystemConfig, t: f64) -> Result<f64> {
    if !config.thermal.is_zero_temperature() {
        return Err(DimerError::WrongRegime(
            "p12_zero_temp needs a zero-temperature configuration",
        ));
    }
    if config.is_correlated() {
        return Err(DimerError::WrongRegime(
            "correlated baths at zero temperature go through p12_correlated_zero_temp",
        ));
    }
    Ok(rabi_probability(
        config.hopping(),
        detuning_zero_temp(config).value,
        t,
    ))
}

fn finite_beta(config: &SystemConfig) -> Result<f64> {
    config.beta().ok_or(DimerError::WrongRegime(
        "thermal probability needs a finite temperature",
    ))
}

/// Finite-temperature probability, summed over magnetization sectors with
/// weights g₁(m₁)g₂(m₂)e^{−β(α₁m₁ + α₂m₂ + q m₁m₂)}/Z. Covers both
/// independent (q = 0) and Ising-correlated baths.
pub fn p12_thermal(config: &SystemConfig, t: f64) -> Result<f64> {
    finite_beta(config)?;
    let weights = crate::combinatorics::thermal_weights(config)?;
    let hopping = config.hopping();
    Ok(weights
        .iter()
        .map(|(m1, m2, p)| p * rabi_probability(hopping, sector_value(config, m1.value(), m2.value()), t))
        .sum())
}

/// The same sum written over total-spin labels (j₁, m₁, j₂, m₂) with
/// multiplicities ν(N, j). O(N₁²N₂²) terms; kept to check the marginal form.
pub fn p12_thermal_spin_resolved(config: &SystemConfig, t: f64) -> Result<f64> {
    let beta = finite_beta(config)?;
    let t1 = MultiplicityTable::new(config.bath1.size)?;
    let t2 = MultiplicityTable::new(config.bath2.size)?;
    let (a1, a2, q) = (
        config.bath1.splitting,
        config.bath2.splitting,
        config.correlation.ising,
    );

    let mut terms: Vec<(f64, f64)> = Vec::new();
    for &(j1, nu1) in t1.multiplicities() {
        for &(j2, nu2) in t2.multiplicities() {
            let log_nu = (nu1 as f64).ln() + (nu2 as f64).ln();
            for m1 in magnetizations(config.bath1.size).filter(|m| m.twice().abs() <= j1.twice()) {
                for m2 in magnetizations(config.bath2.size).filter(|m| m.twice().abs() <= j2.twice()) {
                    let (x1, x2) = (m1.value(), m2.value());
                    let log_w = log_nu - beta * (a1 * x1 + a2 * x2 + q * x1 * x2);
                    let p = rabi_probability(config.hopping(), sector_value(config, x1, x2), t);
                    terms.push((log_w, p));
                }
            }
        }
    }
    let max = terms.iter().map(|&(w, _)| w).fold(f64::NEG_INFINITY, f64::max);
    let (num, den) = terms.iter().fold((0.0, 0.0), |(num, den), &(w, p)| {
        let e = (w - max).exp();
        (num + e * p, den + e)
    });
    Ok(num / den)
}

/// Probability for whichever regime `config` describes.
pub fn p12(config: &SystemConfig, t: f64) -> Result<f64> {
    match (config.thermal.is_zero_temperature(), config.is_correlated()) {
        (true, false) => p12_zero_temp(config, t),
        (true, true) => p12_correlated_zero_temp(config, t),
        (false, _) => p12_thermal(config, t),
    }
}
