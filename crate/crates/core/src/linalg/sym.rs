use std::ops::Index;

use super::{LinalgError, Matrix};
use crate::Scalar;

/// Dense symmetric matrix.
///
/// Stored in full; every constructor symmetrizes with `(S + Sᵀ)/2`, so
/// `s[(i, j)] == s[(j, i)]` holds bitwise.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix<T>(Matrix<T>);

impl<T: Scalar> SymMatrix<T> {
    pub fn new(m: Matrix<T>) -> Result<Self, LinalgError> {
        if !m.is_square() {
            return Err(LinalgError::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        if m.rows() == 0 {
            return Err(LinalgError::Empty);
        }
        let n = m.rows();
        let half = T::lit(0.5);
        let mut m = m;
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = (m[(i, j)] + m[(j, i)]) * half;
                m[(i, j)] = avg;
                m[(j, i)] = avg;
            }
        }
        Ok(Self(m))
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self, LinalgError> {
        Self::new(Matrix::from_rows(rows)?)
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> T) -> Self {
        Self::new(Matrix::from_fn(n, n, f)).expect("square by construction")
    }

    pub fn zeros(n: usize) -> Self {
        Self(Matrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self(Matrix::identity(n))
    }

    pub fn from_diagonal(d: &[T]) -> Self {
        Self(Matrix::from_diagonal(d))
    }

    /// `E_ij + E_ji` for `i != j`, `E_ii` on the diagonal.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        m[(i, j)] = T::one();
        m[(j, i)] = T::one();
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn as_matrix(&self) -> &Matrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.0
    }

    pub fn trace(&self) -> T {
        self.0.trace()
    }

    pub fn frobenius_norm(&self) -> T {
        self.0.frobenius_norm()
    }

    pub fn scale(&self, s: T) -> Self {
        Self(self.0.scale(s))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self(&self.0 + &rhs.0)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self(&self.0 - &rhs.0)
    }

    /// `self += s · rhs`, keeping exact symmetry.
    pub fn add_scaled(&mut self, s: T, rhs: &Self) {
        let n = self.dim();
        assert_eq!(n, rhs.dim());
        for i in 0..n {
            for j in 0..n {
                self.0[(i, j)] += s * rhs.0[(i, j)];
            }
        }
    }

    /// `xᵀ S x`.
    pub fn quad_form(&self, x: &[T]) -> T {
        assert_eq!(x.len(), self.dim());
        let mut acc = T::zero();
        for (i, &xi) in x.iter().enumerate() {
            let row: T = self.0.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum();
            acc += xi * row;
        }
        acc
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        self.0.mul_vec(x)
    }

    /// Congruence `M S Mᵀ`.
    pub fn congruence(&self, m: &Matrix<T>) -> Self {
        let ms = m * &self.0;
        Self::new(&ms * &m.transpose()).expect("square by construction")
    }

    /// Largest absolute difference between `S[i][j]` and `S[j][i]`; zero by construction.
    pub fn asymmetry(&self) -> T {
        let n = self.dim();
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)]).abs());
            }
        }
        worst
    }
}

impl<T> Index<(usize, usize)> for SymMatrix<T> {
    type Output = T;

    fn index(&self, idx: (usize, usize)) -> &T {
        &self.0[idx]
    }
}

impl<T: Scalar> From<SymMatrix<T>> for Matrix<T> {
    fn from(s: SymMatrix<T>) -> Self {
        s.0
    }
}
