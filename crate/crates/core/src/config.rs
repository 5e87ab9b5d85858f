//! Physical parameters of the dimer, its two spin-star baths, the bath-bath
//! Ising coupling and the bath temperature.
//!
//! Energies are angular frequencies in ps⁻¹ with ħ = 1; inverse temperatures
//! are in ps. The JSON form is a flat object (see [`ConfigFile`]).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, DimerError, Result, ValidationErrors};

/// Reduced Planck constant, J·s (CODATA 2018, exact in SI).
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (exact in SI).
pub const BOLTZMANN_SI: f64 = 1.380_649e-23;
/// ħ/k_B in ps·K.
pub const HBAR_OVER_KB_PS_K: f64 = HBAR_SI / BOLTZMANN_SI * 1e12;

/// Inverse temperature (ps) for a bath at `kelvin`.
pub fn beta_from_kelvin(kelvin: f64) -> Result<f64> {
    if !(kelvin.is_finite() && kelvin > 0.0) {
        return Err(ConfigError::NonPositiveTemperature(kelvin).into());
    }
    Ok(HBAR_OVER_KB_PS_K / kelvin)
}

pub fn kelvin_from_beta(beta: f64) -> Result<f64> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(ConfigError::NonPositiveBeta(beta).into());
    }
    Ok(HBAR_OVER_KB_PS_K / beta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimerParams {
    pub epsilon1: f64,
    pub epsilon2: f64,
    /// Tunneling amplitude J between the two levels.
    pub hopping: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathParams {
    /// Number of spin-1/2 particles.
    pub size: u32,
    /// Level splitting α of each bath spin.
    pub splitting: f64,
    /// Dimer-bath coupling γ; zero decouples the bath.
    pub coupling: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThermalSpec {
    Kelvin(f64),
    Beta(f64),
    /// β → ∞, evaluated with the exact ground-state formulas.
    ZeroTemperature,
}

impl ThermalSpec {
    /// Inverse temperature in ps, or `None` at zero temperature.
    pub fn beta(&self) -> Result<Option<f64>> {
        match *self {
            ThermalSpec::Kelvin(t) => beta_from_kelvin(t).map(Some),
            ThermalSpec::Beta(b) if b.is_finite() && b > 0.0 => Ok(Some(b)),
            ThermalSpec::Beta(b) => Err(ConfigError::NonPositiveBeta(b).into()),
            ThermalSpec::ZeroTemperature => Ok(None),
        }
    }

    pub fn is_zero_temperature(&self) -> bool {
        matches!(self, ThermalSpec::ZeroTemperature)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationParams {
    /// Ising coupling q multiplying S₁ᶻS₂ᶻ.
    pub ising: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    pub dimer: DimerParams,
    pub bath1: BathParams,
    pub bath2: BathParams,
    pub correlation: CorrelationParams,
    pub thermal: ThermalSpec,
}

impl SystemConfig {
    /// Half the level splitting, (ε₂ − ε₁)/2.
    pub fn half_gap(&self) -> f64 {
        0.5 * (self.dimer.epsilon2 - self.dimer.epsilon1)
    }

    pub fn hopping(&self) -> f64 {
        self.dimer.hopping
    }

    pub fn is_correlated(&self) -> bool {
        self.correlation.ising != 0.0
    }

    /// Finite inverse temperature, or `None` at zero temperature.
    pub fn beta(&self) -> Option<f64> {
        match self.thermal {
            ThermalSpec::Kelvin(t) => beta_from_kelvin(t).ok(),
            ThermalSpec::Beta(b) => Some(b),
            ThermalSpec::ZeroTemperature => None,
        }
    }

    /// Same configuration with both dimer-bath couplings switched off.
    pub fn decoupled(&self) -> Self {
        let mut c = *self;
        c.bath1.coupling = 0.0;
        c.bath2.coupling = 0.0;
        c
    }

    /// Collects every violated invariant rather than stopping at the first.
    pub fn check(&self) -> std::result::Result<(), ValidationErrors> {
        let mut errors = Vec::new();
        let mut finite = |name: &'static str, value: f64| {
            if !value.is_finite() {
                errors.push(ConfigError::NonFinite { name, value });
            }
        };
        finite("epsilon1", self.dimer.epsilon1);
        finite("epsilon2", self.dimer.epsilon2);
        finite("J", self.dimer.hopping);
        finite("alpha1", self.bath1.splitting);
        finite("gamma1", self.bath1.coupling);
        finite("alpha2", self.bath2.splitting);
        finite("gamma2", self.bath2.coupling);
        finite("q", self.correlation.ising);

        if self.dimer.hopping == 0.0 {
            errors.push(ConfigError::ZeroHopping);
        }
        if self.bath1.size == 0 {
            errors.push(ConfigError::EmptyBath { name: "N1" });
        }
        if self.bath2.size == 0 {
            errors.push(ConfigError::EmptyBath { name: "N2" });
        }
        match self.thermal {
            ThermalSpec::Kelvin(t) if !(t.is_finite() && t > 0.0) => {
                errors.push(ConfigError::NonPositiveTemperature(t))
            }
            ThermalSpec::Beta(b) if !(b.is_finite() && b > 0.0) => {
                errors.push(ConfigError::NonPositiveBeta(b))
            }
            ThermalSpec::ZeroTemperature => {
                if !(self.bath1.splitting > 0.0) {
                    errors.push(ConfigError::ZeroTemperatureNeedsPositiveSplitting { name: "alpha1" });
                }
                if !(self.bath2.splitting > 0.0) {
                    errors.push(ConfigError::ZeroTemperatureNeedsPositiveSplitting { name: "alpha2" });
                }
            }
            _ => {}
        }

        if errors.is_empty() {
            Ok(())
        } else {
            Err(ValidationErrors(errors))
        }
    }

    /// Returns the configuration unchanged if it is valid.
    pub fn validated(self) -> std::result::Result<Self, ValidationErrors> {
        self.check().map(|_| self)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: ConfigFile = serde_json::from_str(s)
            .map_err(|e| DimerError::ConfigParse(e.to_string()))?;
        Ok(file.into_config()?)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| {
            DimerError::Io(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::from_json_str(&text)
    }
}

/// Flat on-disk form of [`SystemConfig`]. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub epsilon1: f64,
    pub epsilon2: f64,
    #[serde(rename = "J")]
    pub hopping: f64,
    #[serde(rename = "N1")]
    pub n1: u32,
    pub alpha1: f64,
    pub gamma1: f64,
    #[serde(rename = "N2")]
    pub n2: u32,
    pub alpha2: f64,
    pub gamma2: f64,
    #[serde(default)]
    pub q: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature_kelvin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_temperature: Option<bool>,
}

impl ConfigFile {
    /// Converts to a [`SystemConfig`] and validates it.
    pub fn into_config(self) -> std::result::Result<SystemConfig, ValidationErrors> {
        let thermal = match (self.temperature_kelvin, self.beta, self.zero_temperature) {
            (Some(t), None, None | Some(false)) => ThermalSpec::Kelvin(t),
            (None, Some(b), None | Some(false)) => ThermalSpec::Beta(b),
            (None, None, Some(true)) => ThermalSpec::ZeroTemperature,
            _ => return Err(ValidationErrors(vec![ConfigError::AmbiguousThermal])),
        };
        SystemConfig {
            dimer: DimerParams {
                epsilon1: self.epsilon1,
                epsilon2: self.epsilon2,
                hopping: self.hopping,
            },
            bath1: BathParams {
                size: self.n1,
                splitting: self.alpha1,
                coupling: self.gamma1,
            },
            bath2: BathParams {
                size: self.n2,
                splitting: self.alpha2,
                coupling: self.gamma2,
            },
            correlation: CorrelationParams { ising: self.q },
            thermal,
        }
        .validated()
    }
}

impl From<&SystemConfig> for ConfigFile {
    fn from(c: &SystemConfig) -> Self {
        let (temperature_kelvin, beta, zero_temperature) = match c.thermal {
            ThermalSpec::Kelvin(t) => (Some(t), None, None),
            ThermalSpec::Beta(b) => (None, Some(b), None),
            ThermalSpec::ZeroTemperature => (None, None, Some(true)),
        };
        ConfigFile {
            epsilon1: c.dimer.epsilon1,
            epsilon2: c.dimer.epsilon2,
            hopping: c.dimer.hopping,
            n1: c.bath1.size,
            alpha1: c.bath1.splitting,
            gamma1: c.bath1.coupling,
            n2: c.bath2.size,
            alpha2: c.bath2.splitting,
            gamma2: c.bath2.coupling,
            q: c.correlation.ising,
            temperature_kelvin,
            beta,
            zero_temperature,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SystemConfig {
        SystemConfig {
            dimer: DimerParams {
                epsilon1: 0.0,
                epsilon2: 20.0,
                hopping: 10.0,
            },
            bath1: BathParams {
                size: 22,
                splitting: 250.0,
                coupling: 0.0,
            },
            bath2: BathParams {
                size: 20,
                splitting: 250.0,
                coupling: 2.0,
            },
            correlation: CorrelationParams { ising: 0.0 },
            thermal: ThermalSpec::Kelvin(77.0),
        }
    }

    #[test]
    fn hbar_over_kb_matches_codata() {
        // 1.054571817e-34 / 1.380649e-23 = 7.638232577...e-12 s·K
        assert!((HBAR_OVER_KB_PS_K - 7.638_232_577).abs() < 1e-8);
    }

    #[test]
    fn beta_at_figure_temperatures() {
        let b77 = beta_from_kelvin(77.0).unwrap();
        let b300 = beta_from_kelvin(300.0).unwrap();
        assert!((b77 - 0.099_197_8).abs() < 1e-6);
        assert!((b77 * 250.0 - 24.80).abs() < 0.01);
        assert!((b300 - 0.025_460_8).abs() < 1e-6);
        assert!(beta_from_kelvin(1e12).unwrap() < 1e-11);
        assert_eq!(b77 / b300, 300.0 / 77.0);
    }

    #[test]
    fn kelvin_round_trip() {
        for t in [0.01, 1.0, 77.0, 300.0, 12345.678] {
            let back = kelvin_from_beta(beta_from_kelvin(t).unwrap()).unwrap();
            assert!(((back - t) / t).abs() < 1e-12);
        }
    }

    #[test]
    fn bad_temperatures_rejected() {
        assert!(beta_from_kelvin(0.0).is_err());
        assert!(beta_from_kelvin(-5.0).is_err());
        assert!(beta_from_kelvin(f64::NAN).is_err());
        assert!(beta_from_kelvin(f64::INFINITY).is_err());
    }

    #[test]
    fn valid_config_passes() {
        assert_eq!(sample().validated().unwrap(), sample());
    }

    #[test]
    fn zero_hopping_rejected() {
        let mut c = sample();
        c.dimer.hopping = 0.0;
        let errs = c.validated().unwrap_err();
        assert_eq!(errs.0, vec![ConfigError::ZeroHopping]);
        assert_eq!(errs.to_string(), "J must be nonzero");
    }

    #[test]
    fn negative_temperature_rejected() {
        let mut c = sample();
        c.thermal = ThermalSpec::Kelvin(-5.0);
        let errs = c.validated().unwrap_err();
        assert!(errs.to_string().contains("temperature must be positive"));
    }

    #[test]
    fn all_violations_reported() {
        let mut c = sample();
        c.dimer.hopping = 0.0;
        c.bath1.size = 0;
        c.bath2.coupling = f64::NAN;
        c.thermal = ThermalSpec::Beta(-1.0);
        assert_eq!(c.validated().unwrap_err().0.len(), 4);
    }

    #[test]
    fn json_round_trip_and_unknown_keys() {
        let json = r#"{"epsilon1":0,"epsilon2":20,"J":10,"N1":22,"alpha1":250,"gamma1":0,
            "N2":20,"alpha2":250,"gamma2":2,"q":0,"temperature_kelvin":77}"#;
        let c = SystemConfig::from_json_str(json).unwrap();
        assert_eq!(c, sample());
        let echoed = serde_json::to_string(&ConfigFile::from(&c)).unwrap();
        assert_eq!(SystemConfig::from_json_str(&echoed).unwrap(), c);

        let typo = json.replace("\"gamma2\"", "\"gama2\"");
        assert!(SystemConfig::from_json_str(&typo).is_err());
    }

    #[test]
    fn thermal_representation_must_be_unique() {
        let json = r#"{"epsilon1":0,"epsilon2":20,"J":10,"N1":1,"alpha1":250,"gamma1":0,
            "N2":1,"alpha2":250,"gamma2":2,"beta":0.1,"temperature_kelvin":77}"#;
        assert!(SystemConfig::from_json_str(json).is_err());
        let none = r#"{"epsilon1":0,"epsilon2":20,"J":10,"N1":1,"alpha1":250,"gamma1":0,
            "N2":1,"alpha2":250,"gamma2":2}"#;
        assert!(SystemConfig::from_json_str(none).is_err());
        let zt = r#"{"epsilon1":0,"epsilon2":20,"J":10,"N1":1,"alpha1":250,"gamma1":0,
            "N2":1,"alpha2":250,"gamma2":2,"zero_temperature":true}"#;
        assert_eq!(
            SystemConfig::from_json_str(zt).unwrap().thermal,
            ThermalSpec::ZeroTemperature
        );
    }
}
