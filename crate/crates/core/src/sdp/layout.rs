use super::SdpError;
use crate::linalg::{Matrix, SymMatrix};
use crate::Scalar;

/// Packing of the decision variables into one vector.
///
/// Order: the upper triangle of the symmetric `n×n` matrix `Q` row by row,
/// then the dense `m×n` matrix `Y` row-major, then `free` unstructured scalars.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VarLayout {
    n: usize,
    m: usize,
    free: usize,
}

impl VarLayout {
    pub fn new(n: usize, m: usize) -> Self {
        Self { n, m, free: 0 }
    }

    /// Layout with no matrix structure, only `count` scalars.
    pub fn scalars(count: usize) -> Self {
        Self { n: 0, m: 0, free: count }
    }

    pub fn with_free(n: usize, m: usize, free: usize) -> Self {
        Self { n, m, free }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn q_count(&self) -> usize {
        self.n * (self.n + 1) / 2
    }

    pub fn y_count(&self) -> usize {
        self.m * self.n
    }

    pub fn total(&self) -> usize {
        self.q_count() + self.y_count() + self.free
    }

    /// Index of `Q[i][j]` (either order).
    pub fn q_index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        assert!(j < self.n, "Q index out of range");
        // rows 0..i of the upper triangle hold n + (n-1) + ... + (n-i+1) entries
        i * self.n - i * i.saturating_sub(1) / 2 + (j - i)
    }

    pub fn y_index(&self, row: usize, col: usize) -> usize {
        assert!(row < self.m && col < self.n, "Y index out of range");
        self.q_count() + row * self.n + col
    }

    pub fn free_index(&self, k: usize) -> usize {
        assert!(k < self.free, "free index out of range");
        self.q_count() + self.y_count() + k
    }

    /// Iterates `(i, j)` over the upper triangle in packing order.
    pub fn q_entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| (i..self.n).map(move |j| (i, j)))
    }

    pub fn pack<T: Scalar>(&self, q: &SymMatrix<T>, y: &Matrix<T>) -> Result<Vec<T>, SdpError> {
        if q.dim() != self.n || y.shape() != (self.m, self.n) {
            return Err(SdpError::DimensionMismatch {
                what: "pack",
                expected: self.n,
                found: q.dim(),
            });
        }
        let mut z = vec![T::zero(); self.total()];
        for (i, j) in self.q_entries() {
            z[self.q_index(i, j)] = q[(i, j)];
        }
        for r in 0..self.m {
            for c in 0..self.n {
                z[self.y_index(r, c)] = y[(r, c)];
            }
        }
        Ok(z)
    }

    pub fn unpack_q<T: Scalar>(&self, z: &[T]) -> SymMatrix<T> {
        SymMatrix::from_fn(self.n, |i, j| z[self.q_index(i, j)])
    }

    pub fn unpack_y<T: Scalar>(&self, z: &[T]) -> Matrix<T> {
        Matrix::from_fn(self.m, self.n, |r, c| z[self.y_index(r, c)])
    }

    /// Objective vector for `trace(Q)`: weight one on packed diagonal entries.
    pub fn trace_objective<T: Scalar>(&self) -> Vec<T> {
        let mut c = vec![T::zero(); self.total()];
        for i in 0..self.n {
            c[self.q_index(i, i)] = T::one();
        }
        c
    }
}
