//! Assembly of the matrix inequalities over packed `(Q, Y)`.

use super::{LinearSystem, RciError};
use crate::linalg::{Matrix, SymMatrix};
use crate::sdp::{LmiBlock, Sense, VarLayout};
use crate::Scalar;

fn check_layout<T: Scalar>(sys: &LinearSystem<T>, layout: &VarLayout) -> Result<(), RciError> {
    if layout.n() != sys.n() {
        return Err(RciError::DimensionMismatch {
            what: "layout state dimension",
            expected: sys.n(),
            found: layout.n(),
        });
    }
    if layout.m() != sys.m() {
        return Err(RciError::DimensionMismatch {
            what: "layout input dimension",
            expected: sys.m(),
            found: layout.m(),
        });
    }
    Ok(())
}

/// Embeds an `n×n` symmetric matrix in the top-left corner of a `dim×dim` zero matrix.
fn embed<T: Scalar>(dim: usize, top_left: &Matrix<T>) -> Matrix<T> {
    let mut m = Matrix::zeros(dim, dim);
    m.set_block(0, 0, top_left);
    m
}

/// `[[AQ + QAᵀ + BY + YᵀBᵀ + λQ, E], [Eᵀ, −λI]] ⪯ 0`.
pub fn build_invariance_lmi<T: Scalar>(
    sys: &LinearSystem<T>,
    lambda: T,
    layout: &VarLayout,
) -> Result<LmiBlock<T>, RciError> {
    if !(lambda > T::zero()) {
        return Err(RciError::InvalidConfig(format!("lambda must be positive, got {lambda}")));
    }
    check_layout(sys, layout)?;
    let (n, p) = (sys.n(), sys.p());
    let dim = n + p;
    let a = sys.a();

    let mut constant = Matrix::zeros(dim, dim);
    for i in 0..n {
        for j in 0..p {
            constant[(i, n + j)] = sys.e()[(i, j)];
            constant[(n + j, i)] = sys.e()[(i, j)];
        }
    }
    for j in 0..p {
        constant[(n + j, n + j)] = -lambda;
    }
    let mut block = LmiBlock::new(SymMatrix::new(constant)?, Sense::NegativeSemidefinite);

    for (i, j) in layout.q_entries() {
        let u = SymMatrix::<T>::unit(n, i, j).into_matrix();
        let au = a.try_mul(&u)?;
        let mut top = &au + &au.transpose();
        top = &top + &u.scale(lambda);
        block.add_coeff(layout.q_index(i, j), SymMatrix::new(embed(dim, &top))?)?;
    }
    for r in 0..sys.m() {
        let b_r = sys.b().col(r);
        for c in 0..n {
            // B e_r e_cᵀ + its transpose
            let mut top = Matrix::zeros(n, n);
            for (k, &bk) in b_r.iter().enumerate() {
                top[(k, c)] += bk;
                top[(c, k)] += bk;
            }
            if top.max_abs() == T::zero() {
                continue;
            }
            block.add_coeff(layout.y_index(r, c), SymMatrix::new(embed(dim, &top))?)?;
        }
    }
    Ok(block)
}

/// One `[[Q, y_iᵀ], [y_i, u_i²]] ⪰ 0` block per input channel, `y_i` row `i` of `Y`.
pub fn build_input_constraint_lmis<T: Scalar>(layout: &VarLayout, u_max: &[T]) -> Result<Vec<LmiBlock<T>>, RciError> {
    if u_max.len() != layout.m() {
        return Err(RciError::DimensionMismatch {
            what: "input bounds",
            expected: layout.m(),
            found: u_max.len(),
        });
    }
    let n = layout.n();
    u_max
        .iter()
        .enumerate()
        .map(|(row, &u)| {
            if !(u > T::zero()) {
                return Err(RciError::InvalidConfig(format!("input bound {row} must be positive")));
            }
            let mut constant = Matrix::zeros(n + 1, n + 1);
            constant[(n, n)] = u * u;
            let mut block = LmiBlock::new(SymMatrix::new(constant)?, Sense::PositiveSemidefinite);
            add_q_top_left(&mut block, layout, n + 1)?;
            for c in 0..n {
                let mut coeff = Matrix::zeros(n + 1, n + 1);
                coeff[(c, n)] = T::one();
                coeff[(n, c)] = T::one();
                block.add_coeff(layout.y_index(row, c), SymMatrix::new(coeff)?)?;
            }
            Ok(block)
        })
        .collect()
}

/// One `[[Q, Qc_jᵀ], [c_jQ, y_j²]] ⪰ 0` block per output row `c_j` of `C`.
///
/// By a Schur complement this is `c_j Q c_jᵀ ≤ y_j²`, i.e. `|c_j x| ≤ y_j` on
/// the whole ellipsoid `xᵀQ⁻¹x ≤ 1`.
pub fn build_output_constraint_lmis<T: Scalar>(
    layout: &VarLayout,
    c: &Matrix<T>,
    y_max: &[T],
) -> Result<Vec<LmiBlock<T>>, RciError> {
    let n = layout.n();
    if c.cols() != n {
        return Err(RciError::DimensionMismatch {
            what: "output matrix columns",
            expected: n,
            found: c.cols(),
        });
    }
    if y_max.len() != c.rows() {
        return Err(RciError::DimensionMismatch {
            what: "output bounds",
            expected: c.rows(),
            found: y_max.len(),
        });
    }
    (0..c.rows())
        .map(|row| {
            let y = y_max[row];
            if !(y > T::zero()) {
                return Err(RciError::InvalidConfig(format!("output bound {row} must be positive")));
            }
            let cj = c.row(row);
            let mut constant = Matrix::zeros(n + 1, n + 1);
            constant[(n, n)] = y * y;
            let mut block = LmiBlock::new(SymMatrix::new(constant)?, Sense::PositiveSemidefinite);
            for (i, j) in layout.q_entries() {
                let u = SymMatrix::<T>::unit(n, i, j);
                let uc = u.mul_vec(cj);
                let mut coeff = embed(n + 1, u.as_matrix());
                for (k, &v) in uc.iter().enumerate() {
                    coeff[(k, n)] = v;
                    coeff[(n, k)] = v;
                }
                block.add_coeff(layout.q_index(i, j), SymMatrix::new(coeff)?)?;
            }
            Ok(block)
        })
        .collect()
}

/// `Q − εI ⪰ 0`.
pub fn build_positivity_lmi<T: Scalar>(layout: &VarLayout, epsilon: T) -> Result<LmiBlock<T>, RciError> {
    let n = layout.n();
    let mut block = LmiBlock::new(SymMatrix::identity(n).scale(-epsilon), Sense::PositiveSemidefinite);
    add_q_top_left(&mut block, layout, n)?;
    Ok(block)
}

fn add_q_top_left<T: Scalar>(block: &mut LmiBlock<T>, layout: &VarLayout, dim: usize) -> Result<(), RciError> {
    let n = layout.n();
    for (i, j) in layout.q_entries() {
        let coeff = embed(dim, SymMatrix::<T>::unit(n, i, j).as_matrix());
        block.add_coeff(layout.q_index(i, j), SymMatrix::new(coeff)?)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_eigenvalue, min_eigenvalue};

    fn sys(a: Matrix<f64>, b: Matrix<f64>, e: Matrix<f64>) -> LinearSystem<f64> {
        let n = a.rows();
        let m = b.cols();
        LinearSystem::new(a, b, e, Matrix::zeros(0, n), vec![1.0; m], vec![]).unwrap()
    }

    fn pack(layout: &VarLayout, q: &SymMatrix<f64>, y: &Matrix<f64>) -> Vec<f64> {
        layout.pack(q, y).unwrap()
    }

    #[test]
    fn integrator_without_control_violates() {
        let s = sys(Matrix::zeros(2, 2), Matrix::zeros(2, 1), Matrix::zeros(2, 1));
        let layout = VarLayout::new(2, 1);
        let block = build_invariance_lmi(&s, 1.0, &layout).unwrap();
        let f = block.evaluate(&pack(&layout, &SymMatrix::identity(2), &Matrix::zeros(1, 2))).unwrap();
        assert_eq!(f, SymMatrix::from_diagonal(&[1.0, 1.0, -1.0]));
        assert_eq!(max_eigenvalue(&f).unwrap(), 1.0);
    }

    #[test]
    fn stable_drift_satisfies() {
        let s = sys(Matrix::identity(2).scale(-1.0), Matrix::zeros(2, 1), Matrix::zeros(2, 2));
        let layout = VarLayout::new(2, 1);
        let block = build_invariance_lmi(&s, 1.0, &layout).unwrap();
        let f = block.evaluate(&pack(&layout, &SymMatrix::identity(2), &Matrix::zeros(1, 2))).unwrap();
        assert_eq!(f, SymMatrix::identity(4).scale(-1.0));
    }

    #[test]
    fn disturbance_only_in_constant_off_diagonal() {
        let a = Matrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let s = sys(a, Matrix::column(&[0.0, 1.0]), Matrix::column(&[0.0, 0.1]));
        let layout = VarLayout::new(2, 1);
        let block = build_invariance_lmi(&s, 0.5, &layout).unwrap();
        let k = block.constant();
        assert_eq!(k[(1, 2)], 0.1);
        assert_eq!(k[(0, 2)], 0.0);
        assert_eq!(k[(2, 2)], -0.5);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(k[(i, j)], 0.0);
            }
        }
        for (_, c) in block.coeffs() {
            assert_eq!(c[(2, 2)], 0.0);
            assert_eq!(c[(0, 2)], 0.0);
            assert_eq!(c[(1, 2)], 0.0);
        }
    }

    #[test]
    fn main_block_matches_direct_formula() {
        let a = Matrix::from_rows(&[vec![0.3, -1.0, 0.2], vec![0.5, 0.1, 0.0], vec![-0.4, 0.0, -0.7]]).unwrap();
        let b = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.2, -0.5], vec![0.0, 2.0]]).unwrap();
        let e = Matrix::from_rows(&[vec![0.1], vec![0.0], vec![-0.3]]).unwrap();
        let s = sys(a.clone(), b.clone(), e.clone());
        let layout = VarLayout::new(3, 2);
        let q = SymMatrix::from_rows(&[vec![2.0, 0.3, -0.1], vec![0.3, 1.5, 0.2], vec![-0.1, 0.2, 0.9]]).unwrap();
        let y = Matrix::from_rows(&[vec![0.4, -1.1, 0.3], vec![0.0, 0.6, -0.2]]).unwrap();
        let lambda = 0.7;
        let f = build_invariance_lmi(&s, lambda, &layout).unwrap().evaluate(&pack(&layout, &q, &y)).unwrap();

        let qm = q.as_matrix();
        let aq = &a * qm;
        let by = &b * &y;
        let top = &(&(&aq + &aq.transpose()) + &(&by + &by.transpose())) + &qm.scale(lambda);
        let mut expected = Matrix::zeros(4, 4);
        expected.set_block(0, 0, &top);
        expected.set_block(0, 3, &e);
        expected.set_block(3, 0, &e.transpose());
        expected[(3, 3)] = -lambda;
        assert!((f.as_matrix() - &expected).max_abs() < 1e-14);
    }

    #[test]
    fn input_block_zero_gain_and_boundary() {
        let layout = VarLayout::new(2, 1);
        let blocks = build_input_constraint_lmis(&layout, &[1.0]).unwrap();
        let f = blocks[0].evaluate(&pack(&layout, &SymMatrix::identity(2), &Matrix::zeros(1, 2))).unwrap();
        assert_eq!(f, SymMatrix::identity(3));

        let layout = VarLayout::new(1, 1);
        let blocks = build_input_constraint_lmis(&layout, &[0.5f64]).unwrap();
        let f = blocks[0].evaluate(&[4.0, 1.0]).unwrap();
        assert_eq!(f, SymMatrix::from_rows(&[vec![4.0, 1.0], vec![1.0, 0.25]]).unwrap());
        assert!(min_eigenvalue(&f).unwrap().abs() < 1e-15);
        let g = blocks[0].evaluate(&[16.0, 1.0]).unwrap();
        assert!(min_eigenvalue(&g).unwrap() > 0.0);
    }

    #[test]
    fn output_block_boundary_at_bound() {
        let layout = VarLayout::new(2, 1);
        let c = Matrix::from_rows(&[vec![1.0, 0.0]]).unwrap();
        let y = 0.698f64;
        let blocks = build_output_constraint_lmis(&layout, &c, &[y]).unwrap();
        let q = SymMatrix::from_rows(&[vec![y * y, 0.1], vec![0.1, 2.0]]).unwrap();
        let f = blocks[0].evaluate(&pack(&layout, &q, &Matrix::zeros(1, 2))).unwrap();
        assert!(min_eigenvalue(&f).unwrap().abs() < 1e-12);
        // doubling the bound keeps the point feasible
        let wide = build_output_constraint_lmis(&layout, &c, &[2.0 * y]).unwrap();
        let g = wide[0].evaluate(&pack(&layout, &q, &Matrix::zeros(1, 2))).unwrap();
        assert!(min_eigenvalue(&g).unwrap() >= -1e-15);
        // constant holds only the bound
        assert_eq!(blocks[0].constant(), &SymMatrix::from_diagonal(&[0.0, 0.0, y * y]));
    }

    #[test]
    fn positivity_block() {
        let layout = VarLayout::new(2, 0);
        let b = build_positivity_lmi(&layout, 1e-3).unwrap();
        let f = b.evaluate(&pack(&layout, &SymMatrix::identity(2).scale(-1.0), &Matrix::zeros(0, 2))).unwrap();
        assert!((min_eigenvalue(&f).unwrap() + 1.001).abs() < 1e-12);
    }
}
