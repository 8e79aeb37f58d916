//! Runtime blend of a nominal command with the certified backup law.
//!
//! `u_s = clamp((1 − α(h))·u_nom + α(h)·Kx)` with `h = xᵀPx`, where `α` rises
//! from 0 at `h_min` to 1 at `h_max`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{cholesky, LinalgError, Matrix, SymMatrix};
use crate::rci::EllipsoidalRciSet;
use crate::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FilterError {
    #[error("{what}: dimension mismatch (expected {expected}, found {found})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid filter configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mixing {
    /// Piecewise linear between the thresholds.
    #[default]
    Ramp,
    /// Logistic curve with midpoint slope `1/(h_max − h_min)` before
    /// renormalization to hit exactly 0 and 1 at the thresholds.
    Sigmoid,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FilterConfig<T> {
    p: SymMatrix<T>,
    k: Matrix<T>,
    h_min: T,
    h_max: T,
    u_max: Vec<T>,
    mixing: Mixing,
}

impl<T: Scalar> FilterConfig<T> {
    pub fn new(p: SymMatrix<T>, k: Matrix<T>, h_min: T, h_max: T, u_max: Vec<T>, mixing: Mixing) -> Result<Self, FilterError> {
        if !(T::zero() < h_min && h_min < h_max && h_max <= T::one()) {
            return Err(FilterError::InvalidConfig(format!(
                "thresholds must satisfy 0 < h_min < h_max <= 1, got ({h_min}, {h_max})"
            )));
        }
        if k.cols() != p.dim() {
            return Err(FilterError::DimensionMismatch {
                what: "gain columns",
                expected: p.dim(),
                found: k.cols(),
            });
        }
        if u_max.len() != k.rows() {
            return Err(FilterError::DimensionMismatch {
                what: "input bounds",
                expected: k.rows(),
                found: u_max.len(),
            });
        }
        if u_max.iter().any(|u| !(*u > T::zero())) {
            return Err(FilterError::InvalidConfig("input bounds must be positive".into()));
        }
        cholesky(&p)?;
        Ok(Self {
            p,
            k,
            h_min,
            h_max,
            u_max,
            mixing,
        })
    }

    pub fn from_set(set: &EllipsoidalRciSet<T>, h_min: T, h_max: T, u_max: Vec<T>, mixing: Mixing) -> Result<Self, FilterError> {
        Self::new(set.p.clone(), set.k.clone(), h_min, h_max, u_max, mixing)
    }

    pub fn p(&self) -> &SymMatrix<T> {
        &self.p
    }

    pub fn k(&self) -> &Matrix<T> {
        &self.k
    }

    pub fn h_min(&self) -> T {
        self.h_min
    }

    pub fn h_max(&self) -> T {
        self.h_max
    }

    pub fn u_max(&self) -> &[T] {
        &self.u_max
    }

    pub fn mixing(&self) -> Mixing {
        self.mixing
    }

    pub fn n(&self) -> usize {
        self.p.dim()
    }

    pub fn m(&self) -> usize {
        self.k.rows()
    }
}

/// `xᵀPx`.
pub fn safety_metric<T: Scalar>(x: &[T], p: &SymMatrix<T>) -> Result<T, FilterError> {
    if x.len() != p.dim() {
        return Err(FilterError::DimensionMismatch {
            what: "state",
            expected: p.dim(),
            found: x.len(),
        });
    }
    Ok(quad(p, x))
}

fn quad<T: Scalar>(p: &SymMatrix<T>, x: &[T]) -> T {
    let n = x.len();
    let mut acc = T::zero();
    for i in 0..n {
        let mut row = T::zero();
        for j in 0..n {
            row += p[(i, j)] * x[j];
        }
        acc += x[i] * row;
    }
    acc
}

fn logistic<T: Scalar>(v: T) -> T {
    T::one() / (T::one() + (-v).exp())
}

pub fn mixing_alpha<T: Scalar>(h: T, cfg: &FilterConfig<T>) -> T {
    let (lo, hi) = (cfg.h_min, cfg.h_max);
    if h <= lo {
        return T::zero();
    }
    if h >= hi {
        return T::one();
    }
    match cfg.mixing {
        Mixing::Ramp => (h - lo) / (hi - lo),
        Mixing::Sigmoid => {
            let width = hi - lo;
            let k = T::lit(4.0) / width;
            let mid = (lo + hi) * T::lit(0.5);
            let s0 = logistic(-k * width * T::lit(0.5));
            let s1 = logistic(k * width * T::lit(0.5));
            ((logistic(k * (h - mid)) - s0) / (s1 - s0)).max(T::zero()).min(T::one())
        }
    }
}

/// `Kx`.
pub fn backup_control<T: Scalar>(x: &[T], k: &Matrix<T>) -> Result<Vec<T>, FilterError> {
    if x.len() != k.cols() {
        return Err(FilterError::DimensionMismatch {
            what: "state",
            expected: k.cols(),
            found: x.len(),
        });
    }
    Ok(k.mul_vec(x))
}

/// `(1 − α)·u_nom + α·u_b` without clamping.
pub fn blend<T: Scalar>(u_nom: T, u_b: T, alpha: T) -> T {
    if alpha == T::zero() {
        u_nom
    } else if alpha == T::one() {
        u_b
    } else {
        (T::one() - alpha) * u_nom + alpha * u_b
    }
}

/// Safety metric and mixing coefficient used for one filter evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FilterStep<T> {
    pub h: T,
    pub alpha: T,
}

/// Writes the filtered command into `out` without allocating.
pub fn filter_into<T: Scalar>(x: &[T], u_nom: &[T], cfg: &FilterConfig<T>, out: &mut [T]) -> Result<FilterStep<T>, FilterError> {
    let (n, m) = (cfg.n(), cfg.m());
    if x.len() != n {
        return Err(FilterError::DimensionMismatch {
            what: "state",
            expected: n,
            found: x.len(),
        });
    }
    if u_nom.len() != m || out.len() != m {
        return Err(FilterError::DimensionMismatch {
            what: "input",
            expected: m,
            found: if u_nom.len() != m { u_nom.len() } else { out.len() },
        });
    }
    let h = quad(&cfg.p, x);
    let alpha = mixing_alpha(h, cfg);
    for (i, o) in out.iter_mut().enumerate() {
        let ub: T = cfg.k.row(i).iter().zip(x).map(|(&k, &xi)| k * xi).sum();
        let lim = cfg.u_max[i];
        *o = blend(u_nom[i], ub, alpha).max(-lim).min(lim);
    }
    Ok(FilterStep { h, alpha })
}

pub fn filter<T: Scalar>(x: &[T], u_nom: &[T], cfg: &FilterConfig<T>) -> Result<Vec<T>, FilterError> {
    let mut out = vec![T::zero(); cfg.m()];
    filter_into(x, u_nom, cfg, &mut out)?;
    Ok(out)
}
