use super::{delta0_for_branch, detuning_zero_temp, sector_value};
use crate::combinatorics::thermal_weights;
use crate::config::SystemConfig;
use crate::error::Result;

/// One Rabi component: `weight · amplitude · sin²(frequency · t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorTerm {
    pub weight: f64,
    /// J²/Ω²
    pub amplitude: f64,
    /// Ω = √(J² + Δ²)
    pub frequency: f64,
}

impl SectorTerm {
    fn new(weight: f64, hopping: f64, detuning: f64) -> Self {
        let j2 = hopping * hopping;
        let w2 = j2 + detuning * detuning;
        SectorTerm {
            weight,
            amplitude: j2 / w2,
            frequency: w2.sqrt(),
        }
    }
}

/// P₁→₂(t) as a fixed mixture of Rabi components, prepared once per
/// configuration so it can be evaluated at many times.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionProfile {
    terms: Vec<SectorTerm>,
}

impl TransitionProfile {
    /// Every magnetization sector, in grid order. Zero-temperature
    /// configurations give a single component.
    pub fn new(config: &SystemConfig) -> Result<Self> {
        let hopping = config.hopping();
        if config.thermal.is_zero_temperature() {
            let delta = if config.is_correlated() {
                delta0_for_branch(config)?.1
            } else {
                detuning_zero_temp(config)
            };
            return Ok(TransitionProfile {
                terms: vec![SectorTerm::new(1.0, hopping, delta.value)],
            });
        }
        let weights = thermal_weights(config)?;
        let terms = weights
            .iter()
            .map(|(m1, m2, p)| SectorTerm::new(p, hopping, sector_value(config, m1.value(), m2.value())))
            .collect();
        Ok(TransitionProfile { terms })
    }

    /// Drops components with weight below `cutoff` and merges components
    /// whose frequencies agree to 1e−12 relative. The result differs from the
    /// exact profile by at most the discarded weight plus O(1e−12·Ωt).
    pub fn compact(config: &SystemConfig, cutoff: f64) -> Result<Self> {
        let mut terms: Vec<SectorTerm> = Self::new(config)?
            .terms
            .into_iter()
            .filter(|s| s.weight >= cutoff)
            .collect();
        terms.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
        let mut merged: Vec<SectorTerm> = Vec::with_capacity(terms.len());
        for term in terms {
            match merged.last_mut() {
                Some(last) if (term.frequency - last.frequency).abs() <= 1e-12 * term.frequency => {
                    last.weight += term.weight;
                }
                _ => merged.push(term),
            }
        }
        Ok(TransitionProfile { terms: merged })
    }

    pub fn terms(&self) -> &[SectorTerm] {
        &self.terms
    }

    pub fn probability(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|s| {
                let x = (s.frequency * t).sin();
                s.weight * s.amplitude * x * x
            })
            .sum()
    }

    pub fn max_frequency(&self) -> f64 {
        self.terms.iter().map(|s| s.frequency).fold(0.0, f64::max)
    }

    /// max J²/Ω² over components; no time can exceed it.
    pub fn peak_bound(&self) -> f64 {
        self.terms.iter().map(|s| s.amplitude).fold(0.0, f64::max)
    }

    /// The only component, when the profile is a pure Rabi oscillation.
    pub fn single(&self) -> Option<&SectorTerm> {
        match self.terms.as_slice() {
            [only] => Some(only),
            _ => None,
        }
    }
}
