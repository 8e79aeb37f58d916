//! Sampling checks on a synthesized set.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{EllipsoidalRciSet, LinearSystem, RciError};
use crate::linalg::{cholesky, norm2, sqrt_psd, Matrix, SymMatrix};
use crate::Scalar;

/// Seeded points on and inside `{x : xᵀQ⁻¹x ≤ 1}`.
///
/// Boundary points are `Q^{1/2} g / ‖g‖` with `g` standard normal; interior
/// points additionally scale by `U^{1/n}`, `U` uniform on `[0, 1)`, which is
/// uniform in volume.
pub struct EllipsoidSampler<T> {
    root: SymMatrix<T>,
    rng: ChaCha8Rng,
}

impl<T: Scalar> EllipsoidSampler<T> {
    pub fn new(q: &SymMatrix<T>, seed: u64) -> Result<Self, RciError> {
        Ok(Self {
            root: sqrt_psd(q)?,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn dim(&self) -> usize {
        self.root.dim()
    }

    fn direction(&mut self) -> Vec<T> {
        loop {
            let g: Vec<f64> = (0..self.dim()).map(|_| self.rng.sample(StandardNormal)).collect();
            let norm = norm2(&g);
            if norm > 0.0 {
                return g.iter().map(|v| T::lit(v / norm)).collect();
            }
        }
    }

    pub fn boundary(&mut self) -> Vec<T> {
        let u = self.direction();
        self.root.mul_vec(&u)
    }

    pub fn interior(&mut self) -> Vec<T> {
        let u = self.direction();
        let r: f64 = self.rng.random::<f64>().powf(1.0 / self.dim() as f64);
        self.root.mul_vec(&u).into_iter().map(|v| v * T::lit(r)).collect()
    }

    /// Uniformly distributed unit vector in `dim` dimensions from the same stream.
    pub fn unit_vector(&mut self, dim: usize) -> Vec<T> {
        loop {
            let g: Vec<f64> = (0..dim).map(|_| self.rng.sample(StandardNormal)).collect();
            let norm = norm2(&g);
            if norm > 0.0 {
                return g.iter().map(|v| T::lit(v / norm)).collect();
            }
        }
    }
}

/// `sup_{‖d‖≤1} xᵀP(A_cl x + Ed) = xᵀP A_cl x + ‖EᵀPx‖`.
pub fn nagumo_margin<T: Scalar>(x: &[T], p: &SymMatrix<T>, a_cl: &Matrix<T>, e: &Matrix<T>) -> T {
    let px = p.mul_vec(x);
    let drift: T = px.iter().zip(a_cl.mul_vec(x)).map(|(&a, b)| a * b).sum();
    if e.cols() == 0 {
        return drift;
    }
    let push = norm2(&e.tr_mul_vec(&px));
    if push == T::zero() {
        drift
    } else {
        drift + push
    }
}

/// Largest [`nagumo_margin`] over `n_samples` seeded boundary points.
///
/// Non-positive values mean the closed-loop field never points outward at the
/// sampled points for any admissible disturbance.
pub fn verify_nagumo<T: Scalar>(
    rci: &EllipsoidalRciSet<T>,
    sys: &LinearSystem<T>,
    n_samples: usize,
    seed: u64,
) -> Result<T, RciError> {
    if rci.n() != sys.n() || rci.m() != sys.m() {
        return Err(RciError::DimensionMismatch {
            what: "set and system",
            expected: sys.n(),
            found: rci.n(),
        });
    }
    let a_cl = sys.closed_loop(&rci.k)?;
    let mut sampler = EllipsoidSampler::new(&rci.q, seed)?;
    let mut worst = T::neg_infinity();
    for _ in 0..n_samples {
        let x = sampler.boundary();
        worst = worst.max(nagumo_margin(&x, &rci.p, &a_cl, sys.e()));
    }
    Ok(worst)
}

/// `max_{xᵀQ⁻¹x ≤ 1} |rᵀx| = √(rᵀQr)`.
pub fn max_gain_over_ellipsoid<T: Scalar>(row: &[T], q: &SymMatrix<T>) -> Result<T, RciError> {
    if row.len() != q.dim() {
        return Err(RciError::DimensionMismatch {
            what: "gain row",
            expected: q.dim(),
            found: row.len(),
        });
    }
    cholesky(q)?;
    Ok(q.quad_form(row).max(T::zero()).sqrt())
}
