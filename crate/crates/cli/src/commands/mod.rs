pub mod report;
pub mod simulate;
pub mod synth;
pub mod verify;

use rci_core::rci::{to_json_17, RciArtifact};
use serde::Serialize;

use crate::fsio::read_to_string;
use crate::CliError;

pub(crate) fn json<V: Serialize>(v: &V) -> String {
    let mut s = to_json_17(v).expect("report types serialize");
    s.push('\n');
    s
}

pub(crate) fn load_artifact(path: &std::path::Path) -> Result<RciArtifact, CliError> {
    if !path.exists() {
        return Err(CliError::MissingArtifact(path.to_path_buf()));
    }
    Ok(RciArtifact::from_json(&read_to_string(path)?)?)
}
