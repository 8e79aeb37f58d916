use super::{LinalgError, Matrix, SymMatrix};
use crate::Scalar;

/// Lower-triangular factor `L` with `S = L Lᵀ`.
#[derive(Clone, Debug)]
pub struct Cholesky<T> {
    l: Matrix<T>,
}

/// Factors a symmetric matrix; fails with the index of the first non-positive pivot.
pub fn cholesky<T: Scalar>(s: &SymMatrix<T>) -> Result<Cholesky<T>, LinalgError> {
    let n = s.dim();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = s[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > T::zero()) || !d.is_finite() {
            return Err(LinalgError::NotPositiveDefinite { pivot: j });
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in (j + 1)..n {
            let mut v = s[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / djj;
        }
    }
    Ok(Cholesky { l })
}

impl<T: Scalar> Cholesky<T> {
    pub fn l(&self) -> &Matrix<T> {
        &self.l
    }

    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    /// Solves `L y = b` in place.
    pub fn forward_in_place(&self, b: &mut [T]) {
        let n = self.dim();
        for i in 0..n {
            let mut v = b[i];
            for k in 0..i {
                v -= self.l[(i, k)] * b[k];
            }
            b[i] = v / self.l[(i, i)];
        }
    }

    /// Solves `Lᵀ x = y` in place.
    pub fn backward_in_place(&self, y: &mut [T]) {
        let n = self.dim();
        for i in (0..n).rev() {
            let mut v = y[i];
            for k in (i + 1)..n {
                v -= self.l[(k, i)] * y[k];
            }
            y[i] = v / self.l[(i, i)];
        }
    }

    pub fn solve_vec(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        self.forward_in_place(&mut x);
        self.backward_in_place(&mut x);
        x
    }

    pub fn solve(&self, rhs: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
        if rhs.rows() != self.dim() {
            return Err(LinalgError::DimensionMismatch {
                expected: self.dim(),
                found: rhs.rows(),
            });
        }
        let mut out = Matrix::zeros(rhs.rows(), rhs.cols());
        for j in 0..rhs.cols() {
            let x = self.solve_vec(&rhs.col(j));
            for (i, v) in x.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        Ok(out)
    }

    /// `L⁻¹ M L⁻ᵀ` for symmetric `M`: whitening used by the barrier Hessian.
    pub fn whiten(&self, m: &SymMatrix<T>) -> SymMatrix<T> {
        let n = self.dim();
        // X = L⁻¹ M, column by column.
        let mut x = Matrix::zeros(n, n);
        let mut col = vec![T::zero(); n];
        for j in 0..n {
            for i in 0..n {
                col[i] = m[(i, j)];
            }
            self.forward_in_place(&mut col);
            for i in 0..n {
                x[(i, j)] = col[i];
            }
        }
        // W = L⁻¹ Xᵀ = L⁻¹ M L⁻ᵀ since M is symmetric.
        let mut w = Matrix::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                col[i] = x[(j, i)];
            }
            self.forward_in_place(&mut col);
            for i in 0..n {
                w[(i, j)] = col[i];
            }
        }
        SymMatrix::new(w).expect("square by construction")
    }

    pub fn log_det(&self) -> T {
        let two = T::lit(2.0);
        (0..self.dim()).map(|i| two * self.l[(i, i)].ln()).sum()
    }

    pub fn det(&self) -> T {
        let p: T = (0..self.dim()).fold(T::one(), |acc, i| acc * self.l[(i, i)]);
        p * p
    }

    pub fn inverse(&self) -> SymMatrix<T> {
        let inv = self
            .solve(&Matrix::identity(self.dim()))
            .expect("identity has matching rows");
        SymMatrix::new(inv).expect("square by construction")
    }
}

/// Solves `S X = rhs` for symmetric positive-definite `S`.
pub fn solve_spd<T: Scalar>(s: &SymMatrix<T>, rhs: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
    cholesky(s)?.solve(rhs)
}
