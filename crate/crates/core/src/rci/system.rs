use serde::{Deserialize, Serialize};

use super::RciError;
use crate::linalg::Matrix;
use crate::Scalar;

/// `ẋ = Ax + Bu + Ed` with `‖d‖₂ ≤ 1`, `|u_i| ≤ u_max[i]` and `|(Cx)_j| ≤ y_max[j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSystem<T> {
    a: Matrix<T>,
    b: Matrix<T>,
    e: Matrix<T>,
    c: Matrix<T>,
    u_max: Vec<T>,
    y_max: Vec<T>,
}

impl<T: Scalar> LinearSystem<T> {
    pub fn new(
        a: Matrix<T>,
        b: Matrix<T>,
        e: Matrix<T>,
        c: Matrix<T>,
        u_max: Vec<T>,
        y_max: Vec<T>,
    ) -> Result<Self, RciError> {
        let n = a.rows();
        if n == 0 || !a.is_square() {
            return Err(RciError::InvalidSystem(format!(
                "A must be square and non-empty, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let check = |what: &str, rows: usize, cols: usize, m: &Matrix<T>| {
            if m.rows() != rows || (cols != usize::MAX && m.cols() != cols) {
                return Err(RciError::InvalidSystem(format!(
                    "{what} has shape {}x{}, expected {rows}x{}",
                    m.rows(),
                    m.cols(),
                    if cols == usize::MAX { "_".to_string() } else { cols.to_string() }
                )));
            }
            Ok(())
        };
        check("B", n, usize::MAX, &b)?;
        check("E", n, usize::MAX, &e)?;
        if c.cols() != n {
            return Err(RciError::InvalidSystem(format!("C has {} columns, expected {n}", c.cols())));
        }
        if b.cols() == 0 {
            return Err(RciError::InvalidSystem("B has no input columns".into()));
        }
        if u_max.len() != b.cols() {
            return Err(RciError::InvalidSystem(format!(
                "u_max has {} entries, expected {}",
                u_max.len(),
                b.cols()
            )));
        }
        if y_max.len() != c.rows() {
            return Err(RciError::InvalidSystem(format!(
                "y_max has {} entries, expected {}",
                y_max.len(),
                c.rows()
            )));
        }
        if let Some(v) = u_max.iter().find(|v| !(**v > T::zero() && v.is_finite())) {
            return Err(RciError::InvalidSystem(format!("input bounds must be positive and finite, got {v}")));
        }
        if let Some(v) = y_max.iter().find(|v| !(**v > T::zero() && v.is_finite())) {
            return Err(RciError::InvalidSystem(format!("output bounds must be positive and finite, got {v}")));
        }
        if ![&a, &b, &e, &c].iter().all(|m| m.is_finite()) {
            return Err(RciError::InvalidSystem("system matrices contain non-finite entries".into()));
        }
        Ok(Self { a, b, e, c, u_max, y_max })
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn m(&self) -> usize {
        self.b.cols()
    }

    /// Disturbance channels.
    pub fn p(&self) -> usize {
        self.e.cols()
    }

    /// Output rows.
    pub fn q(&self) -> usize {
        self.c.rows()
    }

    pub fn a(&self) -> &Matrix<T> {
        &self.a
    }

    pub fn b(&self) -> &Matrix<T> {
        &self.b
    }

    pub fn e(&self) -> &Matrix<T> {
        &self.e
    }

    pub fn c(&self) -> &Matrix<T> {
        &self.c
    }

    pub fn u_max(&self) -> &[T] {
        &self.u_max
    }

    pub fn y_max(&self) -> &[T] {
        &self.y_max
    }

    /// Same system with a different disturbance matrix.
    pub fn with_disturbance(&self, e: Matrix<T>) -> Result<Self, RciError> {
        Self::new(
            self.a.clone(),
            self.b.clone(),
            e,
            self.c.clone(),
            self.u_max.clone(),
            self.y_max.clone(),
        )
    }

    /// Same system with different input bounds.
    pub fn with_input_bounds(&self, u_max: Vec<T>) -> Result<Self, RciError> {
        Self::new(
            self.a.clone(),
            self.b.clone(),
            self.e.clone(),
            self.c.clone(),
            u_max,
            self.y_max.clone(),
        )
    }

    /// `(A + BK)`.
    pub fn closed_loop(&self, k: &Matrix<T>) -> Result<Matrix<T>, RciError> {
        let bk = self.b.try_mul(k)?;
        if bk.shape() != self.a.shape() {
            return Err(RciError::DimensionMismatch {
                what: "feedback gain",
                expected: self.n(),
                found: k.cols(),
            });
        }
        Ok(&self.a + &bk)
    }

    pub fn to_data(&self) -> SystemData {
        let rows = |m: &Matrix<T>| -> Vec<Vec<f64>> {
            (0..m.rows()).map(|i| m.row(i).iter().map(|v| v.as_f64()).collect()).collect()
        };
        SystemData {
            a: rows(&self.a),
            b: rows(&self.b),
            e: rows(&self.e),
            c: rows(&self.c),
            u_max: self.u_max.iter().map(|v| v.as_f64()).collect(),
            y_max: self.y_max.iter().map(|v| v.as_f64()).collect(),
        }
    }

    pub fn from_data(d: &SystemData) -> Result<Self, RciError> {
        let n = d.a.len();
        let mat = |what: &str, rows: &[Vec<f64>], cols_if_empty: usize| -> Result<Matrix<T>, RciError> {
            if rows.is_empty() {
                return Ok(Matrix::zeros(0, cols_if_empty));
            }
            let conv: Vec<Vec<T>> = rows.iter().map(|r| r.iter().map(|&v| T::lit(v)).collect()).collect();
            Matrix::from_rows(&conv).map_err(|e| RciError::InvalidSystem(format!("{what}: {e}")))
        };
        Self::new(
            mat("A", &d.a, 0)?,
            mat("B", &d.b, 0)?,
            mat("E", &d.e, 0)?,
            mat("C", &d.c, n)?,
            d.u_max.iter().map(|&v| T::lit(v)).collect(),
            d.y_max.iter().map(|&v| T::lit(v)).collect(),
        )
    }
}

/// Plain serializable form of a [`LinearSystem`]; matrices as lists of rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemData {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
    #[serde(rename = "E")]
    pub e: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<f64>>,
    pub u_max: Vec<f64>,
    pub y_max: Vec<f64>,
}
