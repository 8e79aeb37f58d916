//! Ellipsoidal robust controlled invariant sets.
//!
//! For `ẋ = Ax + Bu + Ed` with `‖d‖ ≤ 1`, a set `{x : xᵀPx ≤ 1}` together with
//! a gain `K` is robustly invariant when the closed-loop field points inward on
//! the boundary for every admissible `d`. With `Q = P⁻¹` and `Y = KQ` this is a
//! set of linear matrix inequalities for each fixed decay rate `λ`;
//! [`synthesize`] solves them over a grid of `λ` values.

mod artifact;
mod linearization;
mod lmi;
mod oracle;
mod synth;
mod system;

pub use artifact::{to_json_17, Provenance, RciArtifact};
pub use linearization::{
    augment_disturbance, calibrate_delta_max, estimate_linearization_error, linear_field, Calibration,
    CalibrationStep, MIN_LINEARIZATION_SAMPLES,
};
pub use lmi::{build_input_constraint_lmis, build_invariance_lmi, build_output_constraint_lmis, build_positivity_lmi};
pub use oracle::{max_gain_over_ellipsoid, nagumo_margin, verify_nagumo, EllipsoidSampler};
pub use synth::{build_problem, certificate_residual, log_grid, positivity_margin, synthesize, Synthesis, SynthesisConfig};
pub use system::{LinearSystem, SystemData};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{cholesky, LinalgError, Matrix, SymMatrix};
use crate::sdp::{SdpError, SolveStatus};
use crate::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RciError {
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{what}: dimension mismatch (expected {expected}, found {found})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("no lambda in the grid admits a feasible invariant ellipsoid ({} points tried)", diagnostics.len())]
    InfeasibleForAllLambda { diagnostics: Vec<GridDiagnostic> },
    #[error("linearization budget did not settle after {} iterations", history.len())]
    CalibrationFailed { history: Vec<CalibrationStep> },
    #[error("at least {minimum} samples required, got {requested}")]
    TooFewSamples { requested: usize, minimum: usize },
    #[error("invalid artifact: {0}")]
    InvalidArtifact(String),
    #[error(transparent)]
    Sdp(#[from] SdpError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Outcome of one grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridDiagnostic {
    pub lambda: f64,
    pub status: SolveStatus,
    /// Present only when the point was solved to optimality.
    pub trace_q: Option<f64>,
    /// Phase-1 uniform shift at exit; positive values certify infeasibility.
    pub phase1_shift: f64,
    pub max_block_violation: f64,
    pub duality_gap_estimate: f64,
    pub newton_steps: usize,
}

/// `E(P) = {x : xᵀPx ≤ 1}` with backup gain `K`.
#[derive(Clone, Debug, PartialEq)]
pub struct EllipsoidalRciSet<T> {
    pub q: SymMatrix<T>,
    pub p: SymMatrix<T>,
    pub k: Matrix<T>,
    /// `Y = KQ` as returned by the solver.
    pub y: Matrix<T>,
    pub lambda: T,
    pub trace_q: T,
}

impl<T: Scalar> EllipsoidalRciSet<T> {
    /// Builds a set from `Q` and `K`, recovering `P = Q⁻¹` and `Y = KQ`.
    pub fn from_q_and_gain(q: SymMatrix<T>, k: Matrix<T>, lambda: T) -> Result<Self, RciError> {
        if k.cols() != q.dim() {
            return Err(RciError::DimensionMismatch {
                what: "gain columns",
                expected: q.dim(),
                found: k.cols(),
            });
        }
        let p = cholesky(&q)?.inverse();
        let y = k.try_mul(q.as_matrix())?;
        let trace_q = q.trace();
        Ok(Self {
            q,
            p,
            k,
            y,
            lambda,
            trace_q,
        })
    }

    pub fn n(&self) -> usize {
        self.q.dim()
    }

    pub fn m(&self) -> usize {
        self.k.rows()
    }

    /// `‖PQ − I‖_F`.
    pub fn inverse_residual(&self) -> T {
        let pq = self.p.as_matrix() * self.q.as_matrix();
        (&pq - &Matrix::identity(self.n())).frobenius_norm()
    }

    /// `‖KQ − Y‖_F`.
    pub fn gain_residual(&self) -> T {
        let kq = &self.k * self.q.as_matrix();
        (&kq - &self.y).frobenius_norm()
    }

    /// `xᵀPx`.
    pub fn level(&self, x: &[T]) -> T {
        self.p.quad_form(x)
    }

    /// Same gain on the ellipsoid scaled by `factor` in the `P` metric: `P ← factor·P`.
    pub fn with_scaled_metric(&self, factor: T) -> Result<Self, RciError> {
        Self::from_q_and_gain(self.q.scale(T::one() / factor), self.k.clone(), self.lambda)
    }
}
