//! Treating the mismatch between a nonlinear model and its linearization as
//! extra bounded disturbance.

use serde::{Deserialize, Serialize};

use super::oracle::EllipsoidSampler;
use super::synth::{synthesize, Synthesis, SynthesisConfig};
use super::{EllipsoidalRciSet, LinearSystem, RciError};
use crate::linalg::{norm2, Matrix};
use crate::Scalar;

pub const MIN_LINEARIZATION_SAMPLES: usize = 1000;

/// `√2 · [E_d | Δ_max·I_n]`.
///
/// A disturbance `d` with `‖d‖ ≤ 1` and a residual `r` with `‖r‖ ≤ Δ_max` stack
/// into `(1/√2)[d; r/Δ_max]`, which has norm at most one, so the augmented
/// matrix reproduces `E_d d + r` from a unit-bounded input.
pub fn augment_disturbance<T: Scalar>(e_d: &Matrix<T>, delta_max: T) -> Result<Matrix<T>, RciError> {
    if !(delta_max > T::zero() && delta_max.is_finite()) {
        return Err(RciError::InvalidConfig(format!("delta_max must be positive, got {delta_max}")));
    }
    let n = e_d.rows();
    let s = T::lit(2.0).sqrt();
    let residual = Matrix::identity(n).scale(delta_max);
    Ok(e_d.hstack(&residual)?.scale(s))
}

/// `(x, u) ↦ Ax + Bu`.
pub fn linear_field<T: Scalar>(sys: &LinearSystem<T>) -> impl Fn(&[T], &[T]) -> Vec<T> + '_ {
    move |x, u| {
        let ax = sys.a().mul_vec(x);
        let bu = sys.b().mul_vec(u);
        ax.into_iter().zip(bu).map(|(a, b)| a + b).collect()
    }
}

/// Largest `‖f_nl(x, Kx) − (Ax + BKx)‖` over seeded samples of the ellipsoid,
/// half on the boundary and half in the interior.
pub fn estimate_linearization_error<T, F>(
    f_nl: F,
    sys: &LinearSystem<T>,
    rci: &EllipsoidalRciSet<T>,
    samples: usize,
    seed: u64,
) -> Result<T, RciError>
where
    T: Scalar,
    F: Fn(&[T], &[T]) -> Vec<T>,
{
    if samples < MIN_LINEARIZATION_SAMPLES {
        return Err(RciError::TooFewSamples {
            requested: samples,
            minimum: MIN_LINEARIZATION_SAMPLES,
        });
    }
    if rci.n() != sys.n() || rci.m() != sys.m() {
        return Err(RciError::DimensionMismatch {
            what: "set and system",
            expected: sys.n(),
            found: rci.n(),
        });
    }
    let lin = linear_field(sys);
    let mut sampler = EllipsoidSampler::new(&rci.q, seed)?;
    let mut worst = T::zero();
    for i in 0..samples {
        let x = if i % 2 == 0 { sampler.boundary() } else { sampler.interior() };
        let u = rci.k.mul_vec(&x);
        let nl = f_nl(&x, &u);
        if nl.len() != x.len() {
            return Err(RciError::DimensionMismatch {
                what: "nonlinear field output",
                expected: x.len(),
                found: nl.len(),
            });
        }
        let diff: Vec<T> = nl.iter().zip(lin(&x, &u)).map(|(&a, b)| a - b).collect();
        let e = norm2(&diff);
        if !e.is_finite() {
            return Ok(T::infinity());
        }
        worst = worst.max(e);
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationStep {
    /// Residual budget used for this synthesis.
    pub delta_max: f64,
    /// Measured residual over the resulting set; absent when synthesis failed.
    pub delta_hat: Option<f64>,
    pub trace_q: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct Calibration<T> {
    pub delta_max: T,
    pub delta_hat: T,
    pub synthesis: Synthesis<T>,
    pub history: Vec<CalibrationStep>,
}

/// Fixed-point search for a self-consistent residual budget.
///
/// Starts without a budget, synthesizes, measures the residual `δ̂` over the
/// result and retries with `Δ = 1.05·δ̂` until the budget covers the measured
/// residual. `sys` carries the physical disturbance matrix `E_d`.
pub fn calibrate_delta_max<T, F>(
    sys: &LinearSystem<T>,
    f_nl: F,
    cfg: &SynthesisConfig<T>,
    samples: usize,
    seed: u64,
    max_iterations: usize,
) -> Result<Calibration<T>, RciError>
where
    T: Scalar,
    F: Fn(&[T], &[T]) -> Vec<T>,
{
    let mut delta = T::zero();
    let mut history = Vec::new();
    for _ in 0..max_iterations {
        let augmented = if delta > T::zero() {
            sys.with_disturbance(augment_disturbance(sys.e(), delta)?)?
        } else {
            sys.clone()
        };
        let synthesis = match synthesize(&augmented, cfg) {
            Ok(s) => s,
            Err(RciError::InfeasibleForAllLambda { .. }) => {
                history.push(CalibrationStep {
                    delta_max: delta.as_f64(),
                    delta_hat: None,
                    trace_q: None,
                });
                return Err(RciError::CalibrationFailed { history });
            }
            Err(e) => return Err(e),
        };
        let delta_hat = estimate_linearization_error(&f_nl, sys, &synthesis.set, samples, seed)?;
        history.push(CalibrationStep {
            delta_max: delta.as_f64(),
            delta_hat: Some(delta_hat.as_f64()),
            trace_q: Some(synthesis.set.trace_q.as_f64()),
        });
        if delta >= delta_hat {
            return Ok(Calibration {
                delta_max: delta,
                delta_hat,
                synthesis,
                history,
            });
        }
        delta = T::lit(1.05) * delta_hat;
    }
    Err(RciError::CalibrationFailed { history })
}
