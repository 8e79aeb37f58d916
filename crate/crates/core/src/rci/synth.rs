use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lmi::{build_input_constraint_lmis, build_invariance_lmi, build_output_constraint_lmis, build_positivity_lmi};
use super::{EllipsoidalRciSet, GridDiagnostic, LinearSystem, RciError};
use crate::linalg::{cholesky, Matrix};
use crate::sdp::{feasibility_report, solve, SdpProblem, SolveStatus, SolverSettings, VarLayout};
use crate::Scalar;

/// `count` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn log_grid<T: Scalar>(lo: T, hi: T, count: usize) -> Vec<T> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (l0, l1) = (lo.ln(), hi.ln());
            let steps = T::from_usize(count - 1).expect("small integer");
            (0..count)
                .map(|k| {
                    if k == 0 {
                        lo
                    } else if k == count - 1 {
                        hi
                    } else {
                        (l0 + (l1 - l0) * T::from_usize(k).expect("small integer") / steps).exp()
                    }
                })
                .collect()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, bound(serialize = "T: Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct SynthesisConfig<T> {
    /// Ascending, strictly positive decay rates tried for the invariance block.
    pub lambda_grid: Vec<T>,
    pub solver: SolverSettings<T>,
}

impl<T: Scalar> Default for SynthesisConfig<T> {
    fn default() -> Self {
        Self {
            lambda_grid: log_grid(T::lit(0.05), T::lit(20.0), 25),
            solver: SolverSettings::default(),
        }
    }
}

impl<T: Scalar> SynthesisConfig<T> {
    pub fn validate(&self) -> Result<(), RciError> {
        if self.lambda_grid.is_empty() {
            return Err(RciError::InvalidConfig("lambda grid is empty".into()));
        }
        if self.lambda_grid.iter().any(|l| !(*l > T::zero() && l.is_finite())) {
            return Err(RciError::InvalidConfig("lambda grid must be strictly positive".into()));
        }
        if self.lambda_grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(RciError::InvalidConfig("lambda grid must be strictly ascending".into()));
        }
        Ok(())
    }
}

/// Lower bound `ε` in `Q ⪰ εI`, relative to the size of `A`.
pub fn positivity_margin<T: Scalar>(sys: &LinearSystem<T>) -> T {
    T::lit(1e-9) * T::one().max(sys.a().frobenius_norm())
}

/// Result of a grid search: the selected set plus one diagnostic per grid point.
#[derive(Clone, Debug)]
pub struct Synthesis<T> {
    pub set: EllipsoidalRciSet<T>,
    pub grid: Vec<GridDiagnostic>,
    pub epsilon: T,
}

/// Input channels rescaled to unit bounds and outputs rescaled to unit bounds.
fn normalized<T: Scalar>(sys: &LinearSystem<T>) -> Result<LinearSystem<T>, RciError> {
    let b = Matrix::from_fn(sys.n(), sys.m(), |i, j| sys.b()[(i, j)] * sys.u_max()[j]);
    let c = Matrix::from_fn(sys.q(), sys.n(), |i, j| sys.c()[(i, j)] / sys.y_max()[i]);
    LinearSystem::new(
        sys.a().clone(),
        b,
        sys.e().clone(),
        c,
        vec![T::one(); sys.m()],
        vec![T::one(); sys.q()],
    )
}

/// Builds the full problem `max trace(Q)` at one `λ`, on the normalized system.
pub fn build_problem<T: Scalar>(sys: &LinearSystem<T>, lambda: T, epsilon: T) -> Result<SdpProblem<T>, RciError> {
    let layout = VarLayout::new(sys.n(), sys.m());
    let mut blocks = vec![build_invariance_lmi(sys, lambda, &layout)?];
    blocks.extend(build_input_constraint_lmis(&layout, sys.u_max())?);
    blocks.extend(build_output_constraint_lmis(&layout, sys.c(), sys.y_max())?);
    blocks.push(build_positivity_lmi(&layout, epsilon)?);
    Ok(SdpProblem::new(layout, layout.trace_objective(), blocks)?)
}

/// Largest block violation of the stored certificate `(Q, Y)` on the unscaled problem.
pub fn certificate_residual<T: Scalar>(
    sys: &LinearSystem<T>,
    set: &EllipsoidalRciSet<T>,
    epsilon: T,
) -> Result<T, RciError> {
    let problem = build_problem(sys, set.lambda, epsilon)?;
    let z = problem.layout().pack(&set.q, &set.y)?;
    Ok(feasibility_report(&problem, &z)?.max_violation())
}

struct Candidate<T> {
    diag: GridDiagnostic,
    set: Option<EllipsoidalRciSet<T>>,
}

fn solve_point<T: Scalar>(
    sys: &LinearSystem<T>,
    scaled: &LinearSystem<T>,
    lambda: T,
    epsilon: T,
    settings: &SolverSettings<T>,
) -> Result<Candidate<T>, RciError> {
    let problem = build_problem(scaled, lambda, epsilon)?;
    let sol = solve(&problem, settings)?;
    let mut diag = GridDiagnostic {
        lambda: lambda.as_f64(),
        status: sol.status,
        trace_q: None,
        phase1_shift: sol.phase1_shift.as_f64(),
        max_block_violation: sol.max_block_violation.as_f64(),
        duality_gap_estimate: sol.duality_gap_estimate.as_f64(),
        newton_steps: sol.phase1_steps + sol.phase2_steps,
    };
    if sol.status != SolveStatus::Optimal {
        return Ok(Candidate { diag, set: None });
    }
    let layout = problem.layout();
    let q = layout.unpack_q(&sol.z);
    let y_scaled = layout.unpack_y(&sol.z);
    let y = Matrix::from_fn(sys.m(), sys.n(), |i, j| y_scaled[(i, j)] * sys.u_max()[i]);
    let p = cholesky(&q)?.inverse();
    let k = y.try_mul(p.as_matrix())?;
    let trace_q = q.trace();
    diag.trace_q = Some(trace_q.as_f64());
    Ok(Candidate {
        diag,
        set: Some(EllipsoidalRciSet {
            q,
            p,
            k,
            y,
            lambda,
            trace_q,
        }),
    })
}

/// Solves the trace-maximization problem on every grid point and keeps the
/// largest feasible ellipsoid; ties go to the smaller `λ`.
pub fn synthesize<T: Scalar>(sys: &LinearSystem<T>, cfg: &SynthesisConfig<T>) -> Result<Synthesis<T>, RciError> {
    cfg.validate()?;
    let scaled = normalized(sys)?;
    let epsilon = positivity_margin(sys);
    let candidates = cfg
        .lambda_grid
        .par_iter()
        .map(|&lambda| solve_point(sys, &scaled, lambda, epsilon, &cfg.solver))
        .collect::<Result<Vec<_>, RciError>>()?;

    let mut best: Option<EllipsoidalRciSet<T>> = None;
    let mut grid = Vec::with_capacity(candidates.len());
    for c in candidates {
        if let Some(set) = c.set {
            if best.as_ref().is_none_or(|b| set.trace_q > b.trace_q) {
                best = Some(set);
            }
        }
        grid.push(c.diag);
    }
    match best {
        Some(set) => Ok(Synthesis { set, grid, epsilon }),
        None => Err(RciError::InfeasibleForAllLambda { diagnostics: grid }),
    }
}
