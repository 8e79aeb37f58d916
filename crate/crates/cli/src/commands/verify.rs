use std::path::Path;

use rci_core::linalg::{cholesky, Matrix};
use rci_core::rci::{certificate_residual, max_gain_over_ellipsoid, verify_nagumo, EllipsoidalRciSet};
use serde::Serialize;

use super::synth::Slack;
use super::{json, load_artifact};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VerifyTolerances {
    /// Largest admissible Nagumo margin on the boundary.
    pub nagumo: f64,
    /// Relative excess allowed on input and output bounds.
    pub bound_rel: f64,
    pub lmi_residual: f64,
    /// `‖PQ − I‖_F`.
    pub inverse_residual: f64,
}

impl Default for VerifyTolerances {
    fn default() -> Self {
        Self {
            nagumo: 1e-6,
            bound_rel: 1e-6,
            lmi_residual: 1e-8,
            inverse_residual: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub samples: usize,
    pub seed: u64,
    pub worst_nagumo_margin: f64,
    pub input_slacks: Vec<Slack>,
    pub output_slacks: Vec<Slack>,
    pub lmi_residual: f64,
    pub inverse_residual: f64,
    pub tolerances: VerifyTolerances,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        json(self)
    }

    pub fn offenders(&self) -> Vec<String> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.name.clone()).collect()
    }

    /// `Err(VerificationFailed)` when any check failed.
    pub fn into_result(self) -> Result<Self, CliError> {
        if self.pass {
            Ok(self)
        } else {
            let offenders = self.offenders();
            Err(CliError::VerificationFailed {
                report: Box::new(self),
                offenders,
            })
        }
    }
}

fn slacks(rows: &Matrix<f64>, bounds: &[f64], q: &rci_core::linalg::SymMatrix<f64>) -> Result<Vec<Slack>, CliError> {
    bounds
        .iter()
        .enumerate()
        .map(|(i, &bound)| {
            let value = max_gain_over_ellipsoid(rows.row(i), q)?;
            Ok(Slack {
                index: i,
                value,
                bound,
                slack: bound - value,
            })
        })
        .collect()
}

/// Independent checks of an artifact against the system stored with it.
///
/// The set under test is `{x : xᵀPx ≤ 1}` with the stored `P`, which is what
/// the runtime filter uses; sampling and bounds use `P⁻¹`. The stored `Q` and
/// `Y = KQ` are checked separately as an LMI certificate.
pub fn verify(path: &Path, samples: usize, seed: u64, tol: &VerifyTolerances) -> Result<VerifyReport, CliError> {
    if samples == 0 {
        return Err(CliError::Config("verify needs at least one sample".into()));
    }
    let artifact = load_artifact(path)?;
    let sys = artifact.system::<f64>()?;
    let stored = artifact.set::<f64>()?;
    let p_inv = cholesky(&stored.p)
        .map_err(|_| CliError::Config("stored P is not positive definite".into()))?
        .inverse();
    let probe = EllipsoidalRciSet {
        q: p_inv.clone(),
        p: stored.p.clone(),
        k: stored.k.clone(),
        y: stored.y.clone(),
        lambda: stored.lambda,
        trace_q: p_inv.trace(),
    };

    let worst = verify_nagumo(&probe, &sys, samples, seed)?;
    let input_slacks = slacks(&stored.k, sys.u_max(), &p_inv)?;
    let output_slacks = slacks(sys.c(), sys.y_max(), &p_inv)?;
    let lmi_residual = certificate_residual(&sys, &stored, artifact.provenance.epsilon)?;
    let inverse_residual = stored.inverse_residual();

    let mut checks = vec![Check {
        name: "nagumo".into(),
        value: worst,
        limit: tol.nagumo,
        pass: worst <= tol.nagumo,
    }];
    for (kind, list) in [("input", &input_slacks), ("output", &output_slacks)] {
        for s in list {
            let limit = s.bound * (1.0 + tol.bound_rel);
            checks.push(Check {
                name: format!("{kind}[{}]", s.index),
                value: s.value,
                limit,
                pass: s.value <= limit,
            });
        }
    }
    checks.push(Check {
        name: "lmi_residual".into(),
        value: lmi_residual,
        limit: tol.lmi_residual,
        pass: lmi_residual <= tol.lmi_residual,
    });
    checks.push(Check {
        name: "inverse_residual".into(),
        value: inverse_residual,
        limit: tol.inverse_residual,
        pass: inverse_residual <= tol.inverse_residual,
    });
    let pass = checks.iter().all(|c| c.pass);
    Ok(VerifyReport {
        samples,
        seed,
        worst_nagumo_margin: worst,
        input_slacks,
        output_slacks,
        lmi_residual,
        inverse_residual,
        tolerances: *tol,
        checks,
        pass,
    })
}
