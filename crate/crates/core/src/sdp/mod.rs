//! Small dense semidefinite programs.
//!
//! A problem maximizes a linear objective `cᵀz` over a packed decision vector
//! subject to a list of affine matrix inequalities. [`solve`] is a log-barrier
//! interior-point method: an infeasible-start phase that minimizes a uniform
//! shift `s` of all blocks, followed by path following on the objective.

mod block;
mod layout;
mod solver;

pub use block::{evaluate_block, LmiBlock, Sense};
pub use layout::VarLayout;
pub use solver::{solve, SdpSolution, SolveStatus, SolverSettings};

use crate::linalg::{max_eigenvalue, min_eigenvalue, LinalgError};
use crate::Scalar;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SdpError {
    #[error("{what}: dimension mismatch (expected {expected}, found {found})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("problem has no matrix inequality blocks")]
    NoBlocks,
    #[error("invalid solver settings: {0}")]
    InvalidSettings(&'static str),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Debug)]
pub struct SdpProblem<T> {
    layout: VarLayout,
    objective: Vec<T>,
    blocks: Vec<LmiBlock<T>>,
}

impl<T: Scalar> SdpProblem<T> {
    /// `maximize objectiveᵀ z` subject to every block.
    pub fn new(layout: VarLayout, objective: Vec<T>, blocks: Vec<LmiBlock<T>>) -> Result<Self, SdpError> {
        if objective.len() != layout.total() {
            return Err(SdpError::DimensionMismatch {
                what: "objective",
                expected: layout.total(),
                found: objective.len(),
            });
        }
        if blocks.is_empty() {
            return Err(SdpError::NoBlocks);
        }
        for b in &blocks {
            if let Some(k) = b.max_var() {
                if k >= layout.total() {
                    return Err(SdpError::DimensionMismatch {
                        what: "block variable index",
                        expected: layout.total(),
                        found: k + 1,
                    });
                }
            }
        }
        Ok(Self {
            layout,
            objective,
            blocks,
        })
    }

    pub fn layout(&self) -> &VarLayout {
        &self.layout
    }

    pub fn objective(&self) -> &[T] {
        &self.objective
    }

    pub fn blocks(&self) -> &[LmiBlock<T>] {
        &self.blocks
    }

    pub fn objective_value(&self, z: &[T]) -> T {
        crate::linalg::dot(&self.objective, z)
    }
}

/// Per-block extreme eigenvalue on the side that matters for the block's sense.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockCheck<T> {
    pub index: usize,
    pub sense: Sense,
    /// `λ_max` for `⪯ 0` blocks, `λ_min` for `⪰ 0` blocks.
    pub extreme_eigenvalue: T,
}

impl<T: Scalar> BlockCheck<T> {
    /// Amount by which the block is on the wrong side of zero (zero when satisfied).
    pub fn violation(&self) -> T {
        match self.sense {
            Sense::NegativeSemidefinite => self.extreme_eigenvalue.max(T::zero()),
            Sense::PositiveSemidefinite => (-self.extreme_eigenvalue).max(T::zero()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FeasibilityReport<T> {
    pub blocks: Vec<BlockCheck<T>>,
}

impl<T: Scalar> FeasibilityReport<T> {
    /// Blocks whose violation exceeds `tol`, as `(block index, extreme eigenvalue)`.
    pub fn violations(&self, tol: T) -> Vec<(usize, T)> {
        self.blocks
            .iter()
            .filter(|b| b.violation() > tol)
            .map(|b| (b.index, b.extreme_eigenvalue))
            .collect()
    }

    pub fn max_violation(&self) -> T {
        self.blocks.iter().fold(T::zero(), |m, b| m.max(b.violation()))
    }

    pub fn is_feasible(&self, tol: T) -> bool {
        self.violations(tol).is_empty()
    }
}

pub fn feasibility_report<T: Scalar>(problem: &SdpProblem<T>, z: &[T]) -> Result<FeasibilityReport<T>, SdpError> {
    if z.len() != problem.layout.total() {
        return Err(SdpError::DimensionMismatch {
            what: "decision vector",
            expected: problem.layout.total(),
            found: z.len(),
        });
    }
    let blocks = problem
        .blocks
        .iter()
        .enumerate()
        .map(|(index, b)| {
            let f = b.evaluate(z)?;
            let extreme_eigenvalue = match b.sense() {
                Sense::NegativeSemidefinite => max_eigenvalue(&f)?,
                Sense::PositiveSemidefinite => min_eigenvalue(&f)?,
            };
            Ok(BlockCheck {
                index,
                sense: b.sense(),
                extreme_eigenvalue,
            })
        })
        .collect::<Result<Vec<_>, SdpError>>()?;
    Ok(FeasibilityReport { blocks })
}
