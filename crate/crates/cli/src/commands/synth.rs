use std::path::PathBuf;

use rci_core::rci::{max_gain_over_ellipsoid, synthesize, RciArtifact, RciError};
use serde::Serialize;

use super::json;
use crate::config::ProjectConfig;
use crate::fsio::write_atomic;
use crate::CliError;

/// One bound and how close the set comes to it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Slack {
    pub index: usize,
    pub value: f64,
    pub bound: f64,
    pub slack: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SynthOutput {
    pub artifact_path: PathBuf,
    pub lambda: f64,
    pub trace_q: f64,
    pub input_slacks: Vec<Slack>,
    pub output_slacks: Vec<Slack>,
    #[serde(skip)]
    pub artifact: RciArtifact,
}

impl SynthOutput {
    pub fn to_json(&self) -> String {
        json(self)
    }
}

/// Runs the λ-grid synthesis and writes `rci.json` into the output directory.
pub fn synth(cfg: &ProjectConfig) -> Result<SynthOutput, CliError> {
    let sys = cfg.linear_system()?;
    let synthesis = match synthesize(&sys, &cfg.synthesis) {
        Ok(s) => s,
        Err(RciError::InfeasibleForAllLambda { diagnostics }) => return Err(CliError::Infeasible { diagnostics }),
        Err(e @ (RciError::InvalidConfig(_) | RciError::InvalidSystem(_))) => return Err(CliError::Config(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let artifact = RciArtifact::from_synthesis(&sys, &synthesis, &cfg.synthesis, cfg.delta_max);
    let path = cfg.artifact_path();
    write_atomic(&path, artifact.to_json().as_bytes())?;

    let set = &synthesis.set;
    let mut input_slacks = Vec::with_capacity(sys.m());
    for (i, &bound) in sys.u_max().iter().enumerate() {
        let value = max_gain_over_ellipsoid(set.k.row(i), &set.q)?;
        input_slacks.push(Slack {
            index: i,
            value,
            bound,
            slack: bound - value,
        });
    }
    let mut output_slacks = Vec::with_capacity(sys.q());
    for (i, &bound) in sys.y_max().iter().enumerate() {
        let value = max_gain_over_ellipsoid(sys.c().row(i), &set.q)?;
        output_slacks.push(Slack {
            index: i,
            value,
            bound,
            slack: bound - value,
        });
    }
    Ok(SynthOutput {
        artifact_path: path,
        lambda: set.lambda,
        trace_q: set.trace_q,
        input_slacks,
        output_slacks,
        artifact,
    })
}
