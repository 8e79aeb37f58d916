use std::path::{Path, PathBuf};

use rci_core::filter::Mixing;
use rci_core::rci::{augment_disturbance, LinearSystem, SynthesisConfig, SystemData};
use rci_quadsim::{attitude_linear_system, ControllerGains, LoopConventions, QuadrotorParams, Scenario};
use serde::{Deserialize, Serialize};

use crate::fsio::read_to_string;
use crate::CliError;

/// Overrides `output_dir` from the config file.
pub const OUTPUT_DIR_ENV: &str = "RCI_OUTPUT_DIR";

pub const ARTIFACT_FILE: &str = "rci.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SystemSource {
    /// Hover linearization of the attitude dynamics built from `params`.
    QuadrotorAttitude,
    Inline(SystemData),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterSettings {
    pub h_min: f64,
    pub h_max: f64,
    pub mixing: Mixing,
}

impl Default for FilterSettings {
    fn default() -> Self {
        Self {
            h_min: 0.1,
            h_max: 0.9,
            mixing: Mixing::Ramp,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectConfig {
    pub system: SystemSource,
    #[serde(default)]
    pub params: QuadrotorParams,
    #[serde(default)]
    pub gains: ControllerGains,
    #[serde(default)]
    pub conventions: LoopConventions,
    #[serde(default)]
    pub synthesis: SynthesisConfig<f64>,
    /// Linearization residual budget folded into the disturbance matrix.
    #[serde(default)]
    pub delta_max: Option<f64>,
    #[serde(default)]
    pub filter: FilterSettings,
    #[serde(default)]
    pub scenarios: Vec<Scenario>,
    /// Relative paths resolve against the directory holding the config file.
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

impl ProjectConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Parses the file and resolves `output_dir`, honouring [`OUTPUT_DIR_ENV`].
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = read_to_string(path).map_err(|e| CliError::Config(e.to_string()))?;
        let mut cfg = Self::from_json(&text)?;
        cfg.output_dir = match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ if cfg.output_dir.is_relative() => path.parent().unwrap_or(Path::new(".")).join(&cfg.output_dir),
            _ => cfg.output_dir,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.params.validate().map_err(|e| CliError::Config(e.to_string()))?;
        self.synthesis.validate().map_err(|e| CliError::Config(e.to_string()))?;
        let f = &self.filter;
        if !(f.h_min >= 0.0 && f.h_min < f.h_max && f.h_max <= 1.0) {
            return Err(CliError::Config(format!(
                "filter thresholds need 0 ≤ h_min < h_max ≤ 1, got {} and {}",
                f.h_min, f.h_max
            )));
        }
        if let Some(d) = self.delta_max {
            if !(d.is_finite() && d >= 0.0) {
                return Err(CliError::Config(format!("delta_max must be non-negative, got {d}")));
            }
        }
        for (i, s) in self.scenarios.iter().enumerate() {
            s.validate().map_err(|e| CliError::Config(e.to_string()))?;
            if self.scenarios[..i].iter().any(|o| o.name == s.name) {
                return Err(CliError::Config(format!("duplicate scenario name '{}'", s.name)));
            }
        }
        Ok(())
    }

    /// System handed to synthesis, with the residual budget applied.
    pub fn linear_system(&self) -> Result<LinearSystem<f64>, CliError> {
        let base = match &self.system {
            SystemSource::QuadrotorAttitude => attitude_linear_system(&self.params),
            SystemSource::Inline(data) => LinearSystem::from_data(data),
        }
        .map_err(|e| CliError::Config(e.to_string()))?;
        match self.delta_max {
            Some(d) if d > 0.0 => {
                let e = augment_disturbance(base.e(), d).map_err(|e| CliError::Config(e.to_string()))?;
                base.with_disturbance(e).map_err(|e| CliError::Config(e.to_string()))
            }
            _ => Ok(base),
        }
    }

    pub fn artifact_path(&self) -> PathBuf {
        self.output_dir.join(ARTIFACT_FILE)
    }

    pub fn scenario(&self, name: &str) -> Result<&Scenario, CliError> {
        self.scenarios.iter().find(|s| s.name == name).ok_or_else(|| {
            let known: Vec<&str> = self.scenarios.iter().map(|s| s.name.as_str()).collect();
            CliError::Config(format!("unknown scenario '{name}' (known: {})", known.join(", ")))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(delta: &str) -> ProjectConfig {
        ProjectConfig::from_json(&format!(
            r#"{{"system": {{"kind": "quadrotor-attitude"}}, "output_dir": "x"{delta}}}"#
        ))
        .unwrap()
    }

    #[test]
    fn preset_expands_to_hover_linearization() {
        let cfg = quad("");
        let sys = cfg.linear_system().unwrap();
        let j = cfg.params.inertia;
        assert_eq!((sys.n(), sys.m(), sys.q()), (6, 3, 2));
        for i in 0..3 {
            assert_eq!(sys.a()[(i, i + 3)], 1.0);
            assert_eq!(sys.b()[(i + 3, i)], 1.0 / j[i]);
            assert_eq!(sys.e()[(i + 3, i)], cfg.params.d_max / j[i]);
        }
        assert_eq!(sys.a().as_slice().iter().filter(|&&v| v != 0.0).count(), 3);
        assert_eq!(sys.c().row(0), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(sys.c().row(1), &[0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(sys.y_max(), &[0.698, 0.698]);
        assert_eq!(sys.u_max(), &[1e-4; 3]);
    }

    #[test]
    fn residual_budget_augments_disturbance() {
        let sys = quad(r#", "delta_max": 0.65"#).linear_system().unwrap();
        assert_eq!(sys.e().shape(), (6, 9));
    }

    #[test]
    fn unknown_fields_and_bad_thresholds_rejected() {
        assert!(ProjectConfig::from_json(r#"{"system": {"kind": "quadrotor-attitude"}, "output_dir": "x", "sed": 1}"#).is_err());
        let mut cfg = quad("");
        cfg.filter.h_min = 0.95;
        assert!(matches!(cfg.validate(), Err(CliError::Config(_))));
    }
}
