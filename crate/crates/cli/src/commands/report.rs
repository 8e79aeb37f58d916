use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::simulate::SimulationRecord;
use super::load_artifact;
use crate::config::ARTIFACT_FILE;
use crate::fsio::{read_to_string, write_atomic};
use crate::CliError;

pub const REPORT_COLUMNS: [&str; 10] = [
    "scenario",
    "filter",
    "steps",
    "diverged",
    "max_abs_phi",
    "max_abs_theta",
    "max_h",
    "rms_pos_err",
    "final_pos_err",
    "alpha_zero_fraction",
];

#[derive(Clone, Debug)]
pub struct ReportOutput {
    pub markdown_path: PathBuf,
    pub csv_path: PathBuf,
    pub records: Vec<SimulationRecord>,
}

fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        String::new()
    }
}

fn cells(r: &SimulationRecord) -> Vec<String> {
    let m = &r.metrics;
    vec![
        r.scenario.clone(),
        r.filter.clone(),
        m.steps.to_string(),
        m.diverged.to_string(),
        num(m.max_abs_phi),
        num(m.max_abs_theta),
        m.max_h.map(num).unwrap_or_default(),
        num(m.rms_pos_err),
        num(m.final_pos_err),
        num(m.alpha_zero_fraction),
    ]
}

fn collect(dir: &Path) -> Result<Vec<SimulationRecord>, CliError> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::io(format!("listing {}", dir.display()), e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::io(format!("listing {}", dir.display()), e))?.path();
        if path.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.ends_with(".metrics.json")) {
            paths.push(path);
        }
    }
    let mut records = Vec::with_capacity(paths.len());
    for path in paths {
        let rec: SimulationRecord = serde_json::from_str(&read_to_string(&path)?)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        records.push(rec);
    }
    records.sort_by(|a, b| (&a.scenario, &a.filter).cmp(&(&b.scenario, &b.filter)));
    Ok(records)
}

/// Collects every `*.metrics.json` in `dir` into `report.md` and `report.csv`.
pub fn report(dir: &Path) -> Result<ReportOutput, CliError> {
    if !dir.is_dir() {
        return Err(CliError::EmptyRunDir(dir.to_path_buf()));
    }
    let records = collect(dir)?;
    if records.is_empty() {
        return Err(CliError::EmptyRunDir(dir.to_path_buf()));
    }

    let mut csv = REPORT_COLUMNS.join(",");
    csv.push('\n');
    for r in &records {
        csv.push_str(&cells(r).join(","));
        csv.push('\n');
    }

    let mut md = String::from("# Run report\n\n");
    let artifact_path = dir.join(ARTIFACT_FILE);
    if artifact_path.exists() {
        let a = load_artifact(&artifact_path)?;
        md.push_str("## Synthesis\n\n");
        let _ = writeln!(md, "- state dimension: {}, inputs: {}", a.n, a.m);
        let _ = writeln!(md, "- λ*: {}", num(a.lambda));
        let _ = writeln!(md, "- trace Q: {}", num(a.trace_q));
        match a.delta_max {
            Some(d) => {
                let _ = writeln!(md, "- residual budget Δ_max: {}", num(d));
            }
            None => md.push_str("- residual budget Δ_max: none\n"),
        }
        let feasible = a.provenance.grid.iter().filter(|g| g.trace_q.is_some()).count();
        let _ = writeln!(md, "- feasible grid points: {feasible} of {}\n", a.provenance.grid.len());
    }
    md.push_str("## Scenarios\n\n| ");
    md.push_str(&REPORT_COLUMNS.join(" | "));
    md.push_str(" |\n|");
    md.push_str(&"---|".repeat(REPORT_COLUMNS.len()));
    md.push('\n');
    for r in &records {
        let _ = writeln!(md, "| {} |", cells(r).join(" | "));
    }

    let markdown_path = dir.join("report.md");
    let csv_path = dir.join("report.csv");
    write_atomic(&markdown_path, md.as_bytes())?;
    write_atomic(&csv_path, csv.as_bytes())?;
    Ok(ReportOutput {
        markdown_path,
        csv_path,
        records,
    })
}
