use super::{LinalgError, Matrix, SymMatrix};
use crate::Scalar;

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a symmetric matrix.
#[derive(Clone, Debug)]
pub struct SymEigen<T> {
    /// Eigenvalues in ascending order.
    pub values: Vec<T>,
    /// Orthonormal eigenvectors stored as columns, ordered like `values`.
    pub vectors: Matrix<T>,
}

/// Cyclic Jacobi eigen-solver.
pub fn sym_eig<T: Scalar>(s: &SymMatrix<T>) -> Result<SymEigen<T>, LinalgError> {
    let n = s.dim();
    let mut a = s.as_matrix().clone();
    let mut v = Matrix::identity(n);
    let scale = s.frobenius_norm();
    if scale == T::zero() {
        return Ok(SymEigen {
            values: vec![T::zero(); n],
            vectors: v,
        });
    }
    if !scale.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let tol = T::epsilon() * scale;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off: T = {
            let mut acc = T::zero();
            for i in 0..n {
                for j in (i + 1)..n {
                    acc += a[(i, j)] * a[(i, j)];
                }
            }
            acc.sqrt()
        };
        if off <= tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= T::min_positive_value() {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let theta = (aqq - app) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                a[(p, q)] = T::zero();
                a[(q, p)] = T::zero();
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(LinalgError::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymEigen { values, vectors })
}

pub fn min_eigenvalue<T: Scalar>(s: &SymMatrix<T>) -> Result<T, LinalgError> {
    Ok(sym_eig(s)?.values[0])
}

pub fn max_eigenvalue<T: Scalar>(s: &SymMatrix<T>) -> Result<T, LinalgError> {
    let e = sym_eig(s)?;
    Ok(e.values[e.values.len() - 1])
}

impl<T: Scalar> SymEigen<T> {
    /// `V f(Λ) Vᵀ`.
    pub fn reconstruct_with(&self, f: impl Fn(T) -> T) -> SymMatrix<T> {
        let n = self.values.len();
        let mapped: Vec<T> = self.values.iter().map(|&l| f(l)).collect();
        SymMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| self.vectors[(i, k)] * mapped[k] * self.vectors[(j, k)])
                .sum()
        })
    }
}

/// Symmetric square root of a positive semidefinite matrix; negative round-off is clamped to zero.
pub fn sqrt_psd<T: Scalar>(s: &SymMatrix<T>) -> Result<SymMatrix<T>, LinalgError> {
    Ok(sym_eig(s)?.reconstruct_with(|l| l.max(T::zero()).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_sorted() {
        let e = sym_eig(&SymMatrix::from_diagonal(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        assert_eq!(e.vectors.col(0), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn swap_matrix() {
        let e = sym_eig(&SymMatrix::from_rows(&[vec![0.0f64, 1.0], vec![1.0, 0.0]]).unwrap()).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_and_zero() {
        let e = sym_eig(&SymMatrix::<f64>::identity(4)).unwrap();
        assert_eq!(e.values, vec![1.0; 4]);
        let z = sym_eig(&SymMatrix::<f64>::zeros(3)).unwrap();
        assert_eq!(z.values, vec![0.0; 3]);
    }

    #[test]
    fn min_eigenvalue_closed_form() {
        assert_eq!(min_eigenvalue(&SymMatrix::<f64>::identity(3)).unwrap(), 1.0);
        assert_eq!(min_eigenvalue(&SymMatrix::from_diagonal(&[-2.0, 5.0])).unwrap(), -2.0);
        let s = SymMatrix::from_rows(&[vec![4.0, 2.0], vec![2.0, 3.0]]).unwrap();
        let expected = (7.0 - 17f64.sqrt()) / 2.0;
        assert!((min_eigenvalue(&s).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn square_root_squares_back() {
        let s = SymMatrix::from_rows(&[vec![4.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let r = sqrt_psd(&s).unwrap();
        let rr = r.as_matrix() * r.as_matrix();
        assert!((&rr - s.as_matrix()).frobenius_norm() < 1e-13);
    }

    #[test]
    fn single_precision() {
        let s = SymMatrix::from_rows(&[vec![2.0f32, 1.0], vec![1.0, 2.0]]).unwrap();
        let e = sym_eig(&s).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-6);
        assert!((e.values[1] - 3.0).abs() < 1e-6);
    }
}
