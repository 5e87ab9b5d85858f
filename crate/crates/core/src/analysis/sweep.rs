use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::time_max::{max_over_time, TimeMax, TimeWindow, TIE_TOLERANCE};
use crate::config::{SystemConfig, ThermalSpec};
use crate::dynamics::TransitionProfile;
use crate::error::{DimerError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Gamma1,
    Gamma2,
    /// γ₁ = γ₂ = value
    GammaBoth,
    #[serde(rename = "q")]
    Ising,
    /// Kelvin
    Temperature,
    #[serde(rename = "J")]
    Hopping,
    /// Raw P(t) instead of the time maximum.
    #[serde(rename = "t")]
    Time,
}

impl SweepParameter {
    pub const ALL: [SweepParameter; 7] = [
        SweepParameter::Gamma1,
        SweepParameter::Gamma2,
        SweepParameter::GammaBoth,
        SweepParameter::Ising,
        SweepParameter::Temperature,
        SweepParameter::Hopping,
        SweepParameter::Time,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::Gamma1 => "gamma1",
            SweepParameter::Gamma2 => "gamma2",
            SweepParameter::GammaBoth => "gamma_both",
            SweepParameter::Ising => "q",
            SweepParameter::Temperature => "temperature",
            SweepParameter::Hopping => "J",
            SweepParameter::Time => "t",
        }
    }

    fn apply(self, config: &mut SystemConfig, value: f64) {
        match self {
            SweepParameter::Gamma1 => config.bath1.coupling = value,
            SweepParameter::Gamma2 => config.bath2.coupling = value,
            SweepParameter::GammaBoth => {
                config.bath1.coupling = value;
                config.bath2.coupling = value;
            }
            SweepParameter::Ising => config.correlation.ising = value,
            SweepParameter::Temperature => config.thermal = ThermalSpec::Kelvin(value),
            SweepParameter::Hopping => config.dimer.hopping = value,
            SweepParameter::Time => {}
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParameter {
    type Err = DimerError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| DimerError::UnknownParameter(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

impl Axis {
    /// `count` evenly spaced values with both endpoints included.
    pub fn linspace(parameter: SweepParameter, min: f64, max: f64, count: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) {
            return Err(DimerError::InvalidAxis(format!("{parameter}: bounds must be finite")));
        }
        if count == 0 {
            return Err(DimerError::InvalidAxis(format!("{parameter}: count must be positive")));
        }
        if count == 1 && min != max {
            return Err(DimerError::InvalidAxis(format!("{parameter}: a single point needs min == max")));
        }
        let values = (0..count)
            .map(|i| {
                if i + 1 == count {
                    max
                } else {
                    min + (max - min) * i as f64 / (count - 1) as f64
                }
            })
            .collect();
        Ok(Axis { parameter, values })
    }

    pub fn single(parameter: SweepParameter, value: f64) -> Result<Self> {
        Self::linspace(parameter, value, value, 1)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `name=min:max:count`
impl FromStr for Axis {
    type Err = DimerError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || DimerError::InvalidAxis(format!("expected name=min:max:count, got {s:?}"));
        let (name, range) = s.split_once('=').ok_or_else(bad)?;
        let parameter: SweepParameter = name.trim().parse()?;
        let parts: Vec<&str> = range.split(':').collect();
        let [min, max, count] = parts.as_slice() else {
            return Err(bad());
        };
        let min: f64 = min.trim().parse().map_err(|_| bad())?;
        let max: f64 = max.trim().parse().map_err(|_| bad())?;
        let count: usize = count.trim().parse().map_err(|_| bad())?;
        Self::linspace(parameter, min, max, count)
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let first = self.values.first().copied().unwrap_or(f64::NAN);
        let last = self.values.last().copied().unwrap_or(f64::NAN);
        write!(f, "{}={}:{}:{}", self.parameter, first, last, self.values.len())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Argmax {
    pub index1: usize,
    pub index2: Option<usize>,
    pub value1: f64,
    pub value2: Option<f64>,
    pub t: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub axis1: Axis,
    pub axis2: Option<Axis>,
    /// Row-major: row = axis2 index, column = axis1 index.
    pub values: Vec<f64>,
    /// t* per cell (the sampled time itself on a time axis).
    pub times: Vec<f64>,
    pub argmax: Argmax,
}

impl SweepGrid {
    pub fn rows(&self) -> usize {
        self.axis2.as_ref().map_or(1, Axis::len)
    }

    pub fn columns(&self) -> usize {
        self.axis1.len()
    }

    pub fn value(&self, i1: usize, i2: usize) -> f64 {
        self.values[i2 * self.columns() + i1]
    }

    pub fn time(&self, i1: usize, i2: usize) -> f64 {
        self.times[i2 * self.columns() + i1]
    }

    pub fn row(&self, i2: usize) -> &[f64] {
        let n = self.columns();
        &self.values[i2 * n..(i2 + 1) * n]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SweepOptions {
    pub window: TimeWindow,
    /// Worker threads; `None` uses the machine parallelism.
    pub threads: Option<usize>,
}

fn evaluate_cell(
    base: &SystemConfig,
    window: &TimeWindow,
    settings: &[(SweepParameter, f64)],
) -> Result<TimeMax> {
    let mut config = *base;
    let mut time = None;
    for &(parameter, value) in settings {
        match parameter {
            SweepParameter::Time => time = Some(value),
            _ => parameter.apply(&mut config, value),
        }
    }
    let config = config.validated()?;
    match time {
        Some(t) => {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(DimerError::InvalidAxis(format!("time must be finite and non-negative, got {t}")));
            }
            let p = TransitionProfile::new(&config)?.probability(t);
            Ok(TimeMax { t, p })
        }
        None => max_over_time(&config, window),
    }
}

/// max_over_time (or P(t) along a time axis) on every cell of a 1D or 2D
/// parameter grid. Cells run in parallel; results land in fixed slots so the
/// output does not depend on scheduling.
pub fn sweep(
    config: &SystemConfig,
    axis1: Axis,
    axis2: Option<Axis>,
    options: &SweepOptions,
) -> Result<SweepGrid> {
    if axis1.is_empty() || axis2.as_ref().is_some_and(Axis::is_empty) {
        return Err(DimerError::InvalidAxis("axes must be non-empty".into()));
    }
    if let Some(a2) = &axis2 {
        if a2.parameter == axis1.parameter {
            return Err(DimerError::InvalidAxis(format!("{} given twice", a2.parameter)));
        }
    }
    let uses_window = axis1.parameter != SweepParameter::Time
        && axis2.as_ref().is_none_or(|a| a.parameter != SweepParameter::Time);
    if uses_window {
        options.window.check()?;
    }

    let n1 = axis1.len();
    let rows = axis2.as_ref().map_or(1, Axis::len);
    let cell = |k: usize| {
        let (i1, i2) = (k % n1, k / n1);
        let mut settings = vec![(axis1.parameter, axis1.values[i1])];
        if let Some(a2) = &axis2 {
            settings.push((a2.parameter, a2.values[i2]));
        }
        evaluate_cell(config, &options.window, &settings)
    };
    let run = || (0..n1 * rows).into_par_iter().map(cell).collect::<Result<Vec<TimeMax>>>();
    let cells = match options.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| DimerError::InvalidAxis(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };

    let mut best = 0;
    for (k, c) in cells.iter().enumerate() {
        if c.p > cells[best].p + TIE_TOLERANCE {
            best = k;
        }
    }
    let (i1, i2) = (best % n1, best / n1);
    let argmax = Argmax {
        index1: i1,
        index2: axis2.as_ref().map(|_| i2),
        value1: axis1.values[i1],
        value2: axis2.as_ref().map(|a| a.values[i2]),
        t: cells[best].t,
        p: cells[best].p,
    };
    Ok(SweepGrid {
        values: cells.iter().map(|c| c.p).collect(),
        times: cells.iter().map(|c| c.t).collect(),
        axis1,
        axis2,
        argmax,
    })
}
