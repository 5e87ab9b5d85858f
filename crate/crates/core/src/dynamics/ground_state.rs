//! Zero-temperature correlated baths: the ground state of
//! H_B = α₁S₁ᶻ + α₂S₂ᶻ + qS₁ᶻS₂ᶻ, the effective detuning it produces, and
//! when that detuning vanishes.
//!
//! H_B is bilinear in (m₁, m₂), so its minimum over the magnetization
//! rectangle sits on a corner. With α₁, α₂ > 0 the candidates are both baths
//! down, or exactly one bath flipped up. Flipping bath 2 costs α₂N₂ against a
//! gain qN₁N₂/2, flipping bath 1 costs α₁N₁; hence the threshold
//! q₀ = 2·min(α₁/N₂, α₂/N₁) and, above it, the cheaper flip wins.

use super::{rabi_probability, sector_value, Detuning, DetuningSource};
use crate::combinatorics::HalfInt;
use crate::config::SystemConfig;
use crate::error::{DimerError, Result};

/// Relative width of the band inside which two energies count as equal.
pub const CLASSIFICATION_TOLERANCE: f64 = 1e-12;

/// Fully polarized product states of the two baths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Corner {
    /// |N₁/2, −N₁/2⟩ ⊗ |N₂/2, −N₂/2⟩
    BothDown,
    /// |N₁/2, −N₁/2⟩ ⊗ |N₂/2, +N₂/2⟩
    Bath2Up,
    /// |N₁/2, +N₁/2⟩ ⊗ |N₂/2, −N₂/2⟩
    Bath1Up,
}

impl Corner {
    pub fn magnetizations(self, n1: u32, n2: u32) -> (HalfInt, HalfInt) {
        let (n1, n2) = (i64::from(n1), i64::from(n2));
        let (s1, s2) = match self {
            Corner::BothDown => (-1, -1),
            Corner::Bath2Up => (-1, 1),
            Corner::Bath1Up => (1, -1),
        };
        (HalfInt::from_twice(s1 * n1), HalfInt::from_twice(s2 * n2))
    }
}

/// cos θ |first⟩ + sin θ e^{iφ} |second⟩ over a degenerate ground manifold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Superposition {
    pub first: Corner,
    pub second: Corner,
    /// Mixing angle in [0, π].
    pub theta: f64,
    /// Relative phase in [0, 2π).
    pub phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GroundStateBranch {
    BothDown,
    Bath2Up,
    Bath1Up,
    Degenerate(Superposition),
}

impl GroundStateBranch {
    /// Sets θ, φ of a degenerate branch; other branches are returned as is.
    pub fn with_mixing(self, theta: f64, phi: f64) -> Self {
        match self {
            GroundStateBranch::Degenerate(s) => {
                GroundStateBranch::Degenerate(Superposition { theta, phi, ..s })
            }
            other => other,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self, GroundStateBranch::Degenerate(_))
    }

    /// The corners this state has support on.
    pub fn corners(&self) -> Vec<Corner> {
        match *self {
            GroundStateBranch::BothDown => vec![Corner::BothDown],
            GroundStateBranch::Bath2Up => vec![Corner::Bath2Up],
            GroundStateBranch::Bath1Up => vec![Corner::Bath1Up],
            GroundStateBranch::Degenerate(s) => vec![s.first, s.second],
        }
    }

    /// ⟨S₁ᶻ⟩ and ⟨S₂ᶻ⟩ in this state. Both operators are diagonal in the
    /// corner basis, so φ drops out.
    pub fn mean_magnetizations(&self, n1: u32, n2: u32) -> (f64, f64) {
        let pure = |c: Corner| {
            let (m1, m2) = c.magnetizations(n1, n2);
            (m1.value(), m2.value())
        };
        match *self {
            GroundStateBranch::BothDown => pure(Corner::BothDown),
            GroundStateBranch::Bath2Up => pure(Corner::Bath2Up),
            GroundStateBranch::Bath1Up => pure(Corner::Bath1Up),
            GroundStateBranch::Degenerate(s) => {
                let (c2, s2) = (s.theta.cos().powi(2), s.theta.sin().powi(2));
                let (a1, a2) = pure(s.first);
                let (b1, b2) = pure(s.second);
                (c2 * a1 + s2 * b1, c2 * a2 + s2 * b2)
            }
        }
    }
}

/// q₀ = 2·min(α₁/N₂, α₂/N₁).
pub fn q_threshold(alpha1: f64, alpha2: f64, n1: u32, n2: u32) -> f64 {
    2.0 * (alpha1 / f64::from(n2)).min(alpha2 / f64::from(n1))
}

fn compare(a: f64, b: f64) -> std::cmp::Ordering {
    if (a - b).abs() <= CLASSIFICATION_TOLERANCE * a.abs().max(b.abs()) {
        std::cmp::Ordering::Equal
    } else {
        a.partial_cmp(&b).unwrap_or(std::cmp::Ordering::Equal)
    }
}

/// Ground state of the correlated bath Hamiltonian (α₁, α₂ > 0).
///
/// Degenerate manifolds default to θ = 0, φ = 0; use
/// [`GroundStateBranch::with_mixing`] to choose another combination.
pub fn correlated_ground_state(
    alpha1: f64,
    alpha2: f64,
    ising: f64,
    n1: u32,
    n2: u32,
) -> GroundStateBranch {
    use std::cmp::Ordering::*;
    let q0 = q_threshold(alpha1, alpha2, n1, n2);
    // Cost of flipping bath 1 versus bath 2 once the Ising term pays for it.
    let flip = compare(alpha1 * f64::from(n1), alpha2 * f64::from(n2));
    let degenerate = |first, second| {
        GroundStateBranch::Degenerate(Superposition {
            first,
            second,
            theta: 0.0,
            phi: 0.0,
        })
    };
    match (compare(ising, q0), flip) {
        (Less, _) => GroundStateBranch::BothDown,
        (Greater, Greater) => GroundStateBranch::Bath2Up,
        (Greater, Less) => GroundStateBranch::Bath1Up,
        (Greater, Equal) | (Equal, Equal) => degenerate(Corner::Bath2Up, Corner::Bath1Up),
        (Equal, Greater) => degenerate(Corner::BothDown, Corner::Bath2Up),
        (Equal, Less) => degenerate(Corner::BothDown, Corner::Bath1Up),
    }
}

/// Δ₀ = (ε₂ − ε₁)/2 + ⟨(γ₂S₂ᶻ − γ₁S₁ᶻ)/2⟩ in the given bath state.
pub fn delta0_correlated(config: &SystemConfig, branch: &GroundStateBranch) -> Detuning {
    let (m1, m2) = branch.mean_magnetizations(config.bath1.size, config.bath2.size);
    Detuning {
        value: sector_value(config, m1, m2),
        source: DetuningSource::CorrelatedGroundState,
    }
}

fn default_branch(config: &SystemConfig) -> GroundStateBranch {
    correlated_ground_state(
        config.bath1.splitting,
        config.bath2.splitting,
        config.correlation.ising,
        config.bath1.size,
        config.bath2.size,
    )
}

fn require_zero_temperature(config: &SystemConfig) -> Result<()> {
    if config.thermal.is_zero_temperature() {
        Ok(())
    } else {
        Err(DimerError::WrongRegime(
            "correlated ground-state formulas need a zero-temperature configuration",
        ))
    }
}

/// Δ₀ for the configuration's own ground state (default mixing).
pub fn delta0_for_branch(config: &SystemConfig) -> Result<(GroundStateBranch, Detuning)> {
    require_zero_temperature(config)?;
    let branch = default_branch(config);
    Ok((branch, delta0_correlated(config, &branch)))
}

/// J²/(J² + Δ₀²) sin²(t√(J² + Δ₀²)) for correlated baths at zero temperature.
pub fn p12_correlated_zero_temp(config: &SystemConfig, t: f64) -> Result<f64> {
    let (_, delta) = delta0_for_branch(config)?;
    Ok(rabi_probability(config.hopping(), delta.value, t))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Assistance {
    pub branch: GroundStateBranch,
    pub satisfied: bool,
    /// Δ₀ itself; zero when the bath exactly compensates the level offset.
    pub residual: f64,
}

fn energy_scale(config: &SystemConfig) -> f64 {
    [
        config.dimer.epsilon1.abs(),
        config.dimer.epsilon2.abs(),
        config.dimer.hopping.abs(),
        config.bath1.coupling.abs() * f64::from(config.bath1.size),
        config.bath2.coupling.abs() * f64::from(config.bath2.size),
    ]
    .into_iter()
    .fold(f64::MIN_POSITIVE, f64::max)
}

/// Whether the bath ground state compensates the level offset (Δ₀ = 0).
pub fn assistance_condition(config: &SystemConfig) -> Result<Assistance> {
    let (branch, delta) = delta0_for_branch(config)?;
    Ok(Assistance {
        branch,
        satisfied: delta.value.abs() <= CLASSIFICATION_TOLERANCE * energy_scale(config),
        residual: delta.value,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreeCoupling {
    Gamma1,
    Gamma2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceSolution {
    pub gamma: f64,
    /// Δ₀ does not depend on the free coupling and already vanishes, so every
    /// value works; `gamma` is then the configured value.
    pub degenerate: bool,
}

/// Solves Δ₀ = 0 for one coupling with the other held fixed. `None` when the
/// active branch has no solution with a non-negative coupling.
pub fn resonance_gamma(config: &SystemConfig, free: FreeCoupling) -> Result<Option<ResonanceSolution>> {
    let (branch, _) = delta0_for_branch(config)?;
    Ok(resonance_gamma_in(config, &branch, free))
}

/// [`resonance_gamma`] for an explicitly chosen bath state.
pub fn resonance_gamma_in(
    config: &SystemConfig,
    branch: &GroundStateBranch,
    free: FreeCoupling,
) -> Option<ResonanceSolution> {
    let (m1, m2) = branch.mean_magnetizations(config.bath1.size, config.bath2.size);
    let half_gap = config.half_gap();
    // Δ₀ = constant + slope · γ_free
    let (constant, slope, current) = match free {
        FreeCoupling::Gamma1 => (
            half_gap + config.bath2.coupling * m2 / 2.0,
            -m1 / 2.0,
            config.bath1.coupling,
        ),
        FreeCoupling::Gamma2 => (
            half_gap - config.bath1.coupling * m1 / 2.0,
            m2 / 2.0,
            config.bath2.coupling,
        ),
    };
    let scale = energy_scale(config);
    if slope.abs() <= CLASSIFICATION_TOLERANCE {
        return (constant.abs() <= CLASSIFICATION_TOLERANCE * scale).then_some(
            ResonanceSolution {
                gamma: current,
                degenerate: true,
            },
        );
    }
    let gamma = -constant / slope + 0.0;
    (gamma >= 0.0).then_some(ResonanceSolution {
        gamma,
        degenerate: false,
    })
}
