use serde::{Deserialize, Serialize};

use crate::config::SystemConfig;
use crate::dynamics::{SectorTerm, TransitionProfile};
use crate::error::{DimerError, Result};

/// Weight below which thermal sectors are dropped before time searches.
pub const SECTOR_CUTOFF: f64 = 1e-18;

/// Refined maxima closer than this count as ties; the earliest wins.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Coarse samples must satisfy Ω_max·dt ≤ π/8, i.e. at least eight samples
/// per period of the fastest sin² component.
const MAX_PHASE_STEP: f64 = std::f64::consts::PI / 8.0;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeWindow {
    pub t_min: f64,
    pub t_max: f64,
    /// Number of coarse samples, endpoints included.
    pub coarse_steps: usize,
    /// Golden-section iterations around each promising coarse peak.
    pub refine_iterations: usize,
}

impl Default for TimeWindow {
    fn default() -> Self {
        TimeWindow {
            t_min: 0.0,
            t_max: 2.0,
            coarse_steps: 2000,
            refine_iterations: 60,
        }
    }
}

impl TimeWindow {
    pub fn check(&self) -> Result<()> {
        if !(self.t_min.is_finite() && self.t_max.is_finite()) {
            return Err(DimerError::InvalidWindow("bounds must be finite".into()));
        }
        if !(0.0 <= self.t_min && self.t_min < self.t_max) {
            return Err(DimerError::InvalidWindow(format!(
                "need 0 <= t_min < t_max, got [{}, {}]",
                self.t_min, self.t_max
            )));
        }
        if self.coarse_steps < 2 {
            return Err(DimerError::InvalidWindow("coarse_steps must be at least 2".into()));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.t_max - self.t_min) / (self.coarse_steps - 1) as f64
    }

    pub fn sample(&self, i: usize) -> f64 {
        if i + 1 == self.coarse_steps {
            self.t_max
        } else {
            self.t_min + i as f64 * self.step()
        }
    }

    /// True if `t` lies within `fraction` of the window length from either end.
    pub fn near_edge(&self, t: f64, fraction: f64) -> bool {
        let margin = fraction * (self.t_max - self.t_min);
        t - self.t_min <= margin || self.t_max - t <= margin
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeMax {
    /// t* in ps
    pub t: f64,
    /// P₁→₂(t*)
    pub p: f64,
}

/// Closed-form maximum of a single Rabi component inside the window, if any
/// of its peaks falls there.
fn single_peak(term: &SectorTerm, window: &TimeWindow) -> Option<TimeMax> {
    let period = std::f64::consts::PI / term.frequency;
    let first = 0.5 * period;
    let k = ((window.t_min - first) / period).ceil().max(0.0);
    let t = first + k * period;
    (t <= window.t_max).then_some(TimeMax {
        t,
        p: term.weight * term.amplitude,
    })
}

fn golden_section(
    f: impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    iterations: usize,
    start: TimeMax,
) -> TimeMax {
    let mut best = start;
    let consider = |t: f64, p: f64, best: &mut TimeMax| {
        if p > best.p {
            *best = TimeMax { t, p };
        }
    };
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    consider(x1, f1, &mut best);
    consider(x2, f2, &mut best);
    for _ in 0..iterations {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
            consider(x1, f1, &mut best);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
            consider(x2, f2, &mut best);
        }
    }
    best
}

/// Numerical maximum of a profile over the window: coarse scan, then
/// golden-section refinement around every coarse local maximum that could
/// still hold the global one.
pub fn maximize_profile(profile: &TransitionProfile, window: &TimeWindow) -> Result<TimeMax> {
    window.check()?;
    let dt = window.step();
    let omega = profile.max_frequency();
    if omega * dt > MAX_PHASE_STEP {
        return Err(DimerError::UnderResolved { dt, omega });
    }
    let samples: Vec<f64> = (0..window.coarse_steps)
        .map(|i| profile.probability(window.sample(i)))
        .collect();
    let best_coarse = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // |P''| ≤ 2Ω², so the sample nearest the true peak is within Ω²dt²/4 of it.
    let margin = 0.25 * omega * omega * dt * dt + TIE_TOLERANCE;
    let n = samples.len();

    let mut best: Option<TimeMax> = None;
    for i in 0..n {
        let left = if i > 0 { samples[i - 1] } else { f64::NEG_INFINITY };
        let right = if i + 1 < n { samples[i + 1] } else { f64::NEG_INFINITY };
        if samples[i] < left || samples[i] < right || samples[i] < best_coarse - margin {
            continue;
        }
        let a = window.sample(i.saturating_sub(1));
        let b = window.sample((i + 1).min(n - 1));
        let start = TimeMax {
            t: window.sample(i),
            p: samples[i],
        };
        let refined = golden_section(|t| profile.probability(t), a, b, window.refine_iterations, start);
        match best {
            Some(b) if refined.p <= b.p + TIE_TOLERANCE => {}
            _ => best = Some(refined),
        }
    }
    // at least the global coarse maximum qualifies
    Ok(best.expect("coarse maximum is always a candidate"))
}

/// max over t ∈ window of P₁→₂(t). Zero-temperature configurations use the
/// closed form t* = π/(2Ω), P* = J²/Ω² whenever a peak lies in the window.
pub fn max_over_time(config: &SystemConfig, window: &TimeWindow) -> Result<TimeMax> {
    window.check()?;
    let profile = TransitionProfile::compact(config, SECTOR_CUTOFF)?;
    if let Some(term) = profile.single() {
        if let Some(peak) = single_peak(term, window) {
            return Ok(peak);
        }
    }
    maximize_profile(&profile, window)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssistanceGain {
    /// P*_coupled − P*_decoupled
    pub gain: f64,
    pub coupled: TimeMax,
    pub decoupled: TimeMax,
}

/// How much the bath coupling raises the best transfer probability.
pub fn assistance_gain(config: &SystemConfig, window: &TimeWindow) -> Result<AssistanceGain> {
    let coupled = max_over_time(config, window)?;
    let decoupled = max_over_time(&config.decoupled(), window)?;
    Ok(AssistanceGain {
        gain: coupled.p - decoupled.p,
        coupled,
        decoupled,
    })
}
