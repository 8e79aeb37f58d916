use std::path::PathBuf;

use rci_core::filter::FilterConfig;
use rci_quadsim::{read_csv, run_scenario, write_csv, TrajectoryMetrics};
use serde::{Deserialize, Serialize};

use super::{json, load_artifact};
use crate::config::{ProjectConfig, SystemSource};
use crate::fsio::write_atomic;
use crate::CliError;

/// Contents of a `*.metrics.json` file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationRecord {
    pub scenario: String,
    /// `"on"` or `"off"`.
    pub filter: String,
    #[serde(flatten)]
    pub metrics: TrajectoryMetrics,
}

impl SimulationRecord {
    pub fn to_json(&self) -> String {
        json(self)
    }
}

#[derive(Clone, Debug)]
pub struct SimulationOutput {
    pub csv_path: PathBuf,
    pub metrics_path: PathBuf,
    pub record: SimulationRecord,
}

pub fn run_stem(scenario: &str, filter_on: bool) -> String {
    format!("{scenario}_filter-{}", if filter_on { "on" } else { "off" })
}

/// Runs one scenario and writes `<name>_filter-<on|off>.csv` plus its metrics.
///
/// `filter` overrides the scenario's own `filter_on`. With the filter off an
/// existing artifact is still used to log `h`.
pub fn simulate(cfg: &ProjectConfig, scenario: &str, filter: Option<bool>) -> Result<SimulationOutput, CliError> {
    if cfg.system != SystemSource::QuadrotorAttitude {
        return Err(CliError::Config("simulate needs the quadrotor-attitude system".into()));
    }
    let mut scn = cfg.scenario(scenario)?.clone();
    if let Some(on) = filter {
        scn.filter_on = on;
    }
    let artifact_path = cfg.artifact_path();
    let filter_cfg = if scn.filter_on || artifact_path.exists() {
        let artifact = load_artifact(&artifact_path)?;
        let set = artifact.set::<f64>()?;
        let u_max = artifact.system.u_max.clone();
        let f = &cfg.filter;
        Some(FilterConfig::from_set(&set, f.h_min, f.h_max, u_max, f.mixing)?)
    } else {
        None
    };

    let log = run_scenario(&scn, filter_cfg.as_ref(), &cfg.params, &cfg.gains, &cfg.conventions)?;
    let stem = run_stem(&scn.name, scn.filter_on);
    let csv_path = cfg.output_dir.join(format!("{stem}.csv"));
    let mut buf = Vec::new();
    write_csv(&log.rows, &mut buf)?;
    write_atomic(&csv_path, &buf)?;

    // metrics come from the file as written, not from the in-memory log
    let written = std::fs::read(&csv_path).map_err(|e| CliError::io(format!("reading {}", csv_path.display()), e))?;
    let rows = read_csv(written.as_slice())?;
    let record = SimulationRecord {
        scenario: scn.name.clone(),
        filter: if scn.filter_on { "on" } else { "off" }.into(),
        metrics: TrajectoryMetrics::from_rows(&rows, &scn),
    };
    let metrics_path = cfg.output_dir.join(format!("{stem}.metrics.json"));
    write_atomic(&metrics_path, record.to_json().as_bytes())?;
    Ok(SimulationOutput {
        csv_path,
        metrics_path,
        record,
    })
}
