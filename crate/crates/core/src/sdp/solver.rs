use serde::{Deserialize, Serialize};

use super::{feasibility_report, SdpError, SdpProblem};
use crate::linalg::{cholesky, dot, min_eigenvalue, Matrix, SymMatrix};
use crate::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, bound(serialize = "T: Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct SolverSettings<T> {
    /// Largest accepted wrong-signed eigenvalue on any block.
    pub feas_tol: T,
    /// Stop once the barrier duality gap bound falls below this.
    pub gap_tol: T,
    /// Newton-step budget, applied to each phase separately.
    pub max_iter: usize,
    /// Starting point: `Q = initial_scale · I`, `Y = 0`, free scalars zero.
    pub initial_scale: T,
    /// Barrier parameter reduction `μ ← mu_factor · μ` between centering rounds.
    pub mu_factor: T,
    /// Box `|z_k| < variable_bound` that keeps both phases bounded; an
    /// iterate reaching half of it is reported as unbounded.
    pub variable_bound: T,
}

impl<T: Scalar> Default for SolverSettings<T> {
    fn default() -> Self {
        Self {
            feas_tol: T::lit(1e-8),
            gap_tol: T::lit(1e-7),
            max_iter: 200,
            initial_scale: T::one(),
            mu_factor: T::lit(0.2),
            variable_bound: T::lit(1e8),
        }
    }
}

impl<T: Scalar> SolverSettings<T> {
    fn validate(&self) -> Result<(), SdpError> {
        if !(self.feas_tol >= T::zero()) {
            return Err(SdpError::InvalidSettings("feas_tol must be nonnegative"));
        }
        if !(self.gap_tol > T::zero()) {
            return Err(SdpError::InvalidSettings("gap_tol must be positive"));
        }
        if !(self.mu_factor > T::zero() && self.mu_factor < T::one()) {
            return Err(SdpError::InvalidSettings("mu_factor must lie in (0, 1)"));
        }
        if self.max_iter == 0 {
            return Err(SdpError::InvalidSettings("max_iter must be positive"));
        }
        if !(self.variable_bound > T::zero()) {
            return Err(SdpError::InvalidSettings("variable_bound must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    MaxIter,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct SdpSolution<T> {
    pub z: Vec<T>,
    pub objective_value: T,
    pub status: SolveStatus,
    /// Largest wrong-signed eigenvalue across blocks at `z`.
    pub max_block_violation: T,
    /// Barrier bound `(Σ block dims + box terms) / t` at the last centered point.
    pub duality_gap_estimate: T,
    /// Phase-1 shift `s` at exit; negative means strictly feasible.
    pub phase1_shift: T,
    pub phase1_steps: usize,
    pub phase2_steps: usize,
}

/// Block in `G(w) ⪰ 0` form.
struct PsdBlock<T> {
    constant: SymMatrix<T>,
    coeffs: Vec<(usize, SymMatrix<T>)>,
}

impl<T: Scalar> PsdBlock<T> {
    fn eval(&self, w: &[T]) -> SymMatrix<T> {
        let mut g = self.constant.clone();
        for (k, c) in &self.coeffs {
            if w[*k] != T::zero() {
                g.add_scaled(w[*k], c);
            }
        }
        g
    }
}

/// `t · costᵀw − Σ log det G_j(w) − Σ log(R² − w_k²)`.
struct Barrier<T> {
    blocks: Vec<PsdBlock<T>>,
    cost: Vec<T>,
    bound: T,
}

struct NewtonStep<T> {
    dir: Vec<T>,
    decrement_sq: T,
}

enum CenterExit {
    Centered,
    Stopped,
    Budget,
}

impl<T: Scalar> Barrier<T> {
    fn nvar(&self) -> usize {
        self.cost.len()
    }

    /// Barrier degree: sum of block sizes plus two per boxed variable.
    fn degree(&self) -> T {
        let d: usize = self.blocks.iter().map(|b| b.constant.dim()).sum::<usize>() + 2 * self.nvar();
        T::from_usize(d).expect("small integer")
    }

    /// Barrier terms without the linear cost; `None` outside the domain.
    fn barrier_part(&self, w: &[T]) -> Option<T> {
        let mut v = T::zero();
        for b in &self.blocks {
            let c = cholesky(&b.eval(w)).ok()?;
            v -= c.log_det();
        }
        for &wk in w {
            let r2 = self.bound * self.bound - wk * wk;
            if !(r2 > T::zero()) {
                return None;
            }
            v -= r2.ln();
        }
        v.is_finite().then_some(v)
    }

    fn newton(&self, t: T, w: &[T]) -> Result<NewtonStep<T>, SdpError> {
        let n = self.nvar();
        let mut g: Vec<T> = self.cost.iter().map(|&c| t * c).collect();
        let mut h = Matrix::zeros(n, n);
        for b in &self.blocks {
            let chol = cholesky(&b.eval(w))?;
            let whitened: Vec<(usize, SymMatrix<T>)> =
                b.coeffs.iter().map(|(k, c)| (*k, chol.whiten(c))).collect();
            for (a, (k, wk)) in whitened.iter().enumerate() {
                g[*k] -= wk.trace();
                for (l, wl) in &whitened[a..] {
                    let v = dot(wk.as_matrix().as_slice(), wl.as_matrix().as_slice());
                    h[(*k, *l)] += v;
                    if k != l {
                        h[(*l, *k)] += v;
                    }
                }
            }
        }
        let r = self.bound;
        for (k, &wk) in w.iter().enumerate() {
            let (a, b) = (r - wk, r + wk);
            g[k] += T::one() / a - T::one() / b;
            h[(k, k)] += T::one() / (a * a) + T::one() / (b * b);
        }

        let neg_g: Vec<T> = g.iter().map(|&v| -v).collect();
        let dir = solve_regularized(h, &neg_g)?;
        let decrement_sq = -dot(&g, &dir);
        Ok(NewtonStep { dir, decrement_sq })
    }

    /// Damped Newton on the barrier at fixed `t`.
    fn center(
        &self,
        t: T,
        w: &mut Vec<T>,
        steps: &mut usize,
        budget: usize,
        stop: &dyn Fn(&[T]) -> bool,
    ) -> Result<CenterExit, SdpError> {
        let center_tol = T::lit(1e-8).max(T::epsilon() * T::lit(1e3));
        loop {
            if stop(w) {
                return Ok(CenterExit::Stopped);
            }
            if *steps >= budget {
                return Ok(CenterExit::Budget);
            }
            let step = self.newton(t, w)?;
            *steps += 1;
            if !(step.decrement_sq > T::zero()) || step.decrement_sq * T::lit(0.5) <= center_tol {
                return Ok(CenterExit::Centered);
            }
            let f0 = self.barrier_part(w).expect("iterate inside barrier domain");
            let cost_dir = dot(&self.cost, &step.dir);
            let mut alpha = T::one();
            let mut accepted = false;
            for _ in 0..80 {
                let cand: Vec<T> = w.iter().zip(&step.dir).map(|(&a, &d)| a + alpha * d).collect();
                if let Some(f1) = self.barrier_part(&cand) {
                    // difference form avoids cancellation in t·costᵀw at large t
                    let change = t * alpha * cost_dir + (f1 - f0);
                    if change <= -T::lit(0.25) * alpha * step.decrement_sq {
                        let moved = cand
                            .iter()
                            .zip(w.iter())
                            .any(|(&c, &a)| (c - a).abs() > T::epsilon() * T::lit(4.0) * (T::one() + a.abs()));
                        *w = cand;
                        accepted = moved;
                        break;
                    }
                }
                alpha *= T::lit(0.5);
            }
            if !accepted {
                // round-off floor: no descent representable
                return Ok(CenterExit::Centered);
            }
        }
    }
}

fn solve_regularized<T: Scalar>(h: Matrix<T>, rhs: &[T]) -> Result<Vec<T>, SdpError> {
    let n = h.rows();
    let max_diag = (0..n).fold(T::zero(), |m, i| m.max(h[(i, i)].abs()));
    let mut shift = T::zero();
    for attempt in 0..12 {
        let mut hs = h.clone();
        for i in 0..n {
            hs[(i, i)] += shift;
        }
        if let Ok(c) = cholesky(&SymMatrix::new(hs)?) {
            return Ok(c.solve_vec(rhs));
        }
        shift = max_diag.max(T::one()) * T::epsilon() * T::lit(10f64.powi(attempt + 1));
    }
    Err(SdpError::Linalg(crate::linalg::LinalgError::NotPositiveDefinite { pivot: 0 }))
}

fn initial_point<T: Scalar>(problem: &SdpProblem<T>, scale: T) -> Vec<T> {
    let layout = problem.layout();
    let mut z = vec![T::zero(); layout.total()];
    for i in 0..layout.n() {
        z[layout.q_index(i, i)] = scale;
    }
    z
}

fn psd_blocks<T: Scalar>(problem: &SdpProblem<T>) -> Vec<PsdBlock<T>> {
    problem
        .blocks()
        .iter()
        .map(|b| {
            let (constant, coeffs) = b.to_psd_form();
            PsdBlock { constant, coeffs }
        })
        .collect()
}

fn strictly_feasible<T: Scalar>(blocks: &[PsdBlock<T>], z: &[T]) -> bool {
    blocks.iter().all(|b| cholesky(&b.eval(z)).is_ok())
}

/// Solves `maximize cᵀz s.t. every block holds`.
///
/// Only malformed input is an `Err`; infeasibility, unboundedness and an
/// exhausted budget are reported through [`SdpSolution::status`].
pub fn solve<T: Scalar>(problem: &SdpProblem<T>, settings: &SolverSettings<T>) -> Result<SdpSolution<T>, SdpError> {
    settings.validate()?;
    let nz = problem.layout().total();
    let blocks = psd_blocks(problem);
    let mut z = initial_point(problem, settings.initial_scale);
    let bound = settings.variable_bound;
    let inv_mu = T::one() / settings.mu_factor;

    // Phase 1: minimize s subject to G_j(z) + s·I ⪰ 0.
    let mut phase1_steps = 0;
    let mut phase1_shift = T::zero();
    if !strictly_feasible(&blocks, &z) {
        let mut s0 = T::zero();
        for b in &blocks {
            s0 = s0.max(-min_eigenvalue(&b.eval(&z))?);
        }
        let s0 = s0 + T::one();
        if !(s0 < bound) {
            return Err(SdpError::InvalidSettings("variable_bound smaller than phase-1 start shift"));
        }
        let shifted: Vec<PsdBlock<T>> = blocks
            .iter()
            .map(|b| {
                let mut coeffs = b.coeffs.clone();
                coeffs.push((nz, SymMatrix::identity(b.constant.dim())));
                PsdBlock {
                    constant: b.constant.clone(),
                    coeffs,
                }
            })
            .collect();
        let mut cost = vec![T::zero(); nz + 1];
        cost[nz] = T::one();
        let bar1 = Barrier {
            blocks: shifted,
            cost,
            bound,
        };
        let mut w = z.clone();
        w.push(s0);
        let stop = |w: &[T]| w[nz] < T::zero() && strictly_feasible(&blocks, &w[..nz]);
        let mut t = T::one();
        loop {
            let exit = bar1.center(t, &mut w, &mut phase1_steps, settings.max_iter, &stop)?;
            phase1_shift = w[nz];
            match exit {
                CenterExit::Stopped => break,
                CenterExit::Budget => {
                    w.truncate(nz);
                    return finish(problem, w, SolveStatus::MaxIter, T::infinity(), phase1_shift, phase1_steps, 0);
                }
                CenterExit::Centered => {}
            }
            let gap = bar1.degree() / t;
            if w[nz] - gap > T::zero() || gap <= settings.feas_tol {
                w.truncate(nz);
                return finish(problem, w, SolveStatus::Infeasible, gap, phase1_shift, phase1_steps, 0);
            }
            t *= inv_mu;
        }
        w.truncate(nz);
        z = w;
    }

    // Phase 2: barrier path following on −cᵀz.
    let bar2 = Barrier {
        blocks,
        cost: problem.objective().iter().map(|&c| -c).collect(),
        bound,
    };
    let mut phase2_steps = 0;
    let mut t = T::one();
    let never = |_: &[T]| false;
    loop {
        let exit = bar2.center(t, &mut z, &mut phase2_steps, settings.max_iter, &never)?;
        let gap = bar2.degree() / t;
        if matches!(exit, CenterExit::Budget) {
            return finish(problem, z, SolveStatus::MaxIter, gap, phase1_shift, phase1_steps, phase2_steps);
        }
        let half_bound = bound * T::lit(0.5);
        if z.iter().any(|v| v.abs() >= half_bound) {
            return finish(problem, z, SolveStatus::Unbounded, gap, phase1_shift, phase1_steps, phase2_steps);
        }
        if gap <= settings.gap_tol {
            return finish(problem, z, SolveStatus::Optimal, gap, phase1_shift, phase1_steps, phase2_steps);
        }
        t *= inv_mu;
    }
}

fn finish<T: Scalar>(
    problem: &SdpProblem<T>,
    z: Vec<T>,
    status: SolveStatus,
    gap: T,
    phase1_shift: T,
    phase1_steps: usize,
    phase2_steps: usize,
) -> Result<SdpSolution<T>, SdpError> {
    let max_block_violation = feasibility_report(problem, &z)?.max_violation();
    Ok(SdpSolution {
        objective_value: problem.objective_value(&z),
        z,
        status,
        max_block_violation,
        duality_gap_estimate: gap,
        phase1_shift,
        phase1_steps,
        phase2_steps,
    })
}
