//! Hand-built SDPs with independently known answers.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rci_core::linalg::{Matrix, SymMatrix};
use rci_core::sdp::{solve, LmiBlock, SdpProblem, Sense, SolveStatus, SolverSettings, VarLayout};

pub enum Expect {
    Optimal(f64),
    Infeasible,
}

pub struct Case {
    pub name: &'static str,
    pub problem: SdpProblem<f64>,
    pub expect: Expect,
}

pub struct Outcome {
    pub name: &'static str,
    pub ok: bool,
    pub detail: String,
}

/// `constant + Σ c_k z_k ≥ 0` as a 1×1 block.
fn ge(constant: f64, coeffs: &[(usize, f64)]) -> LmiBlock<f64> {
    let mut b = LmiBlock::new(SymMatrix::from_diagonal(&[constant]), Sense::PositiveSemidefinite);
    for &(k, c) in coeffs {
        b.add_coeff(k, SymMatrix::from_diagonal(&[c])).unwrap();
    }
    b
}

fn sym(rows: &[&[f64]]) -> SymMatrix<f64> {
    SymMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

fn lp(nvar: usize, objective: &[f64], rows: &[(f64, &[(usize, f64)])]) -> SdpProblem<f64> {
    SdpProblem::new(
        VarLayout::scalars(nvar),
        objective.to_vec(),
        rows.iter().map(|(c, a)| ge(*c, a)).collect(),
    )
    .unwrap()
}

/// `A Q + Q Aᵀ + shift·I ⪯ 0` over the packed upper triangle of `Q`.
fn lyapunov_block(a: &Matrix<f64>, shift: f64, layout: &VarLayout) -> LmiBlock<f64> {
    let n = a.rows();
    let mut b = LmiBlock::new(SymMatrix::identity(n).scale(shift), Sense::NegativeSemidefinite);
    for (i, j) in layout.q_entries() {
        let u = SymMatrix::unit(n, i, j);
        let au = a.try_mul(u.as_matrix()).unwrap();
        let coeff = SymMatrix::from_fn(n, |r, c| au[(r, c)] + au[(c, r)]);
        b.add_coeff(layout.q_index(i, j), coeff).unwrap();
    }
    b
}

/// `Q − level·I` with the given sense.
fn q_bound(n: usize, level: f64, sense: Sense, layout: &VarLayout) -> LmiBlock<f64> {
    let mut b = LmiBlock::new(SymMatrix::identity(n).scale(-level), sense);
    for (i, j) in layout.q_entries() {
        b.add_coeff(layout.q_index(i, j), SymMatrix::unit(n, i, j)).unwrap();
    }
    b
}

fn lyapunov_problem(a: &Matrix<f64>, shift: f64, sign: f64, extra: Vec<LmiBlock<f64>>) -> SdpProblem<f64> {
    let n = a.rows();
    let layout = VarLayout::new(n, 0);
    let objective: Vec<f64> = layout.trace_objective::<f64>().iter().map(|c| sign * c).collect();
    let mut blocks = vec![lyapunov_block(a, shift, &layout)];
    blocks.extend(extra);
    SdpProblem::new(layout, objective, blocks).unwrap()
}

fn nalgebra_min_eig(rows: &[&[f64]]) -> f64 {
    let n = rows.len();
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    SymmetricEigen::new(m).eigenvalues.min()
}

/// Trace of the solution of `A Q + Q Aᵀ = −I` via the Kronecker form.
fn lyapunov_trace(a: &Matrix<f64>) -> f64 {
    let n = a.rows();
    let am = DMatrix::from_fn(n, n, |i, j| a[(i, j)]);
    let id = DMatrix::<f64>::identity(n, n);
    let big = id.kronecker(&am) + am.kronecker(&id);
    let rhs = -DVector::from_iterator(n * n, id.iter().copied());
    let q = big.lu().solve(&rhs).expect("stable A");
    (0..n).map(|i| q[i * n + i]).sum()
}

pub fn battery() -> Vec<Case> {
    let mut cases = Vec::new();
    let mut push = |name, problem, expect| cases.push(Case { name, problem, expect });

    push("lp: unit interval", lp(1, &[1.0], &[(0.0, &[(0, 1.0)]), (1.0, &[(0, -1.0)])]), Expect::Optimal(1.0));
    push(
        "lp: minimize over [2, 5]",
        lp(1, &[-1.0], &[(-2.0, &[(0, 1.0)]), (5.0, &[(0, -1.0)])]),
        Expect::Optimal(-2.0),
    );
    push(
        "lp: simplex budget",
        lp(
            2,
            &[1.0, 1.0],
            &[(0.0, &[(0, 1.0)]), (0.0, &[(1, 1.0)]), (3.0, &[(0, -1.0), (1, -1.0)])],
        ),
        Expect::Optimal(3.0),
    );
    push(
        "lp: weighted box with coupling",
        lp(
            2,
            &[2.0, 1.0],
            &[
                (0.0, &[(0, 1.0)]),
                (0.0, &[(1, 1.0)]),
                (1.0, &[(0, -1.0)]),
                (2.0, &[(1, -1.0)]),
                (2.5, &[(0, -1.0), (1, -1.0)]),
            ],
        ),
        Expect::Optimal(3.5),
    );
    push(
        "lp: difference of boxes",
        lp(
            2,
            &[1.0, -1.0],
            &[
                (1.0, &[(0, 1.0)]),
                (4.0, &[(0, -1.0)]),
                (-1.0, &[(1, 1.0)]),
                (3.0, &[(1, -1.0)]),
            ],
        ),
        Expect::Optimal(3.0),
    );
    push(
        "lp: covering vertex",
        lp(
            2,
            &[-1.0, -1.0],
            &[
                (0.0, &[(0, 1.0)]),
                (0.0, &[(1, 1.0)]),
                (-2.0, &[(0, 1.0), (1, 2.0)]),
                (-3.0, &[(0, 3.0), (1, 1.0)]),
            ],
        ),
        Expect::Optimal(-1.4),
    );
    push(
        "lp: three-variable cap",
        lp(
            3,
            &[1.0, 1.0, 1.0],
            &[
                (0.0, &[(0, 1.0)]),
                (0.0, &[(1, 1.0)]),
                (0.0, &[(2, 1.0)]),
                (1.0, &[(0, -1.0)]),
                (1.0, &[(1, -1.0)]),
                (1.0, &[(2, -1.0)]),
                (2.2, &[(0, -1.0), (1, -1.0), (2, -1.0)]),
            ],
        ),
        Expect::Optimal(2.2),
    );
    {
        // diag(1 − x, 2 − y, x, y) ⪰ 0 as one block
        let mut b = LmiBlock::new(SymMatrix::from_diagonal(&[1.0, 2.0, 0.0, 0.0]), Sense::PositiveSemidefinite);
        b.add_coeff(0, SymMatrix::from_diagonal(&[-1.0, 0.0, 1.0, 0.0])).unwrap();
        b.add_coeff(1, SymMatrix::from_diagonal(&[0.0, -1.0, 0.0, 1.0])).unwrap();
        let p = SdpProblem::new(VarLayout::scalars(2), vec![1.0, 1.0], vec![b]).unwrap();
        push("lp: diagonal block", p, Expect::Optimal(3.0));
    }
    {
        // [[1, t], [t, 1]] ⪰ 0
        let b = LmiBlock::new(SymMatrix::identity(2), Sense::PositiveSemidefinite)
            .with_coeff(0, sym(&[&[0.0, 1.0], &[1.0, 0.0]]))
            .unwrap();
        let p = SdpProblem::new(VarLayout::scalars(1), vec![1.0], vec![b]).unwrap();
        push("sdp: off-diagonal correlation", p, Expect::Optimal(1.0));
    }
    {
        // [[x, 1], [1, 3 − x]] ⪰ 0
        let b = LmiBlock::new(sym(&[&[0.0, 1.0], &[1.0, 3.0]]), Sense::PositiveSemidefinite)
            .with_coeff(0, SymMatrix::from_diagonal(&[1.0, -1.0]))
            .unwrap();
        let p = SdpProblem::new(VarLayout::scalars(1), vec![1.0], vec![b]).unwrap();
        push("sdp: quadratic root", p, Expect::Optimal((3.0 + 5f64.sqrt()) / 2.0));
    }
    {
        // minimize t with t·I − M ⪰ 0
        let b = LmiBlock::new(sym(&[&[-2.0, -1.0], &[-1.0, -2.0]]), Sense::PositiveSemidefinite)
            .with_coeff(0, SymMatrix::identity(2))
            .unwrap();
        let p = SdpProblem::new(VarLayout::scalars(1), vec![-1.0], vec![b]).unwrap();
        push("sdp: largest eigenvalue", p, Expect::Optimal(-3.0));
    }
    {
        let rows: &[&[f64]] = &[&[4.0, 1.0, 0.0], &[1.0, 3.0, 1.0], &[0.0, 1.0, 2.0]];
        let b = LmiBlock::new(sym(rows), Sense::PositiveSemidefinite)
            .with_coeff(0, SymMatrix::identity(3).scale(-1.0))
            .unwrap();
        let p = SdpProblem::new(VarLayout::scalars(1), vec![1.0], vec![b]).unwrap();
        push("sdp: smallest eigenvalue", p, Expect::Optimal(nalgebra_min_eig(rows)));
    }
    {
        let a = Matrix::identity(2).scale(-1.0);
        let l = VarLayout::new(2, 0);
        let p = lyapunov_problem(&a, 1.0, 1.0, vec![q_bound(2, 10.0, Sense::NegativeSemidefinite, &l)]);
        push("lyapunov: A = -I, capped trace", p, Expect::Optimal(20.0));
    }
    {
        let a = Matrix::identity(3).scale(-1.0);
        push("lyapunov: A = -I, least trace", lyapunov_problem(&a, 1.0, -1.0, vec![]), Expect::Optimal(-1.5));
    }
    {
        let a = Matrix::from_rows(&[vec![-1.0, 2.0], vec![0.0, -3.0]]).unwrap();
        let expected = -lyapunov_trace(&a);
        push("lyapunov: upper triangular", lyapunov_problem(&a, 1.0, -1.0, vec![]), Expect::Optimal(expected));
    }
    {
        let a = Matrix::from_rows(&[vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![-1.0, -3.0, -3.0]]).unwrap();
        let expected = -lyapunov_trace(&a);
        push("lyapunov: companion form", lyapunov_problem(&a, 1.0, -1.0, vec![]), Expect::Optimal(expected));
    }
    push(
        "infeasible: q >= 1 and q <= 0",
        lp(1, &[1.0], &[(-1.0, &[(0, 1.0)]), (0.0, &[(0, -1.0)])]),
        Expect::Infeasible,
    );
    push(
        "infeasible: sum exceeds caps",
        lp(
            2,
            &[1.0, 0.0],
            &[(-3.0, &[(0, 1.0), (1, 1.0)]), (1.0, &[(0, -1.0)]), (1.0, &[(1, -1.0)])],
        ),
        Expect::Infeasible,
    );
    {
        let a = Matrix::identity(2);
        let l = VarLayout::new(2, 0);
        let p = lyapunov_problem(&a, 1.0, 1.0, vec![q_bound(2, 0.0, Sense::PositiveSemidefinite, &l)]);
        push("infeasible: lyapunov with A = +I", p, Expect::Infeasible);
    }
    {
        // [[1, t], [t, 1]] ⪰ 0 with t ≥ 2
        let b = LmiBlock::new(SymMatrix::identity(2), Sense::PositiveSemidefinite)
            .with_coeff(0, sym(&[&[0.0, 1.0], &[1.0, 0.0]]))
            .unwrap();
        let p = SdpProblem::new(VarLayout::scalars(1), vec![1.0], vec![b, ge(-2.0, &[(0, 1.0)])]).unwrap();
        push("infeasible: correlation above one", p, Expect::Infeasible);
    }
    cases
}

pub fn run(case: &Case) -> Outcome {
    let sol = match solve(&case.problem, &SolverSettings::default()) {
        Ok(s) => s,
        Err(e) => {
            return Outcome {
                name: case.name,
                ok: false,
                detail: format!("error: {e}"),
            }
        }
    };
    let (ok, detail) = match case.expect {
        Expect::Optimal(v) => {
            let err = (sol.objective_value - v).abs();
            let ok = sol.status == SolveStatus::Optimal
                && sol.duality_gap_estimate <= 1e-7
                && err <= 1e-6 * v.abs().max(1.0);
            (
                ok,
                format!(
                    "{:?} value {:.9} (expected {v:.9}) gap {:.1e}",
                    sol.status, sol.objective_value, sol.duality_gap_estimate
                ),
            )
        }
        Expect::Infeasible => (
            sol.status == SolveStatus::Infeasible && sol.phase1_shift > 0.0,
            format!("{:?} shift {:.3e}", sol.status, sol.phase1_shift),
        ),
    };
    Outcome {
        name: case.name,
        ok,
        detail,
    }
}
