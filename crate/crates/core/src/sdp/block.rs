use super::SdpError;
use crate::linalg::SymMatrix;
use crate::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    /// `F(z) ⪯ 0`
    NegativeSemidefinite,
    /// `F(z) ⪰ 0`
    PositiveSemidefinite,
}

/// Affine matrix function `F(z) = constant + Σ z_k · coeff_k` with a definiteness sense.
#[derive(Clone, Debug)]
pub struct LmiBlock<T> {
    constant: SymMatrix<T>,
    coeffs: Vec<(usize, SymMatrix<T>)>,
    sense: Sense,
}

impl<T: Scalar> LmiBlock<T> {
    pub fn new(constant: SymMatrix<T>, sense: Sense) -> Self {
        Self {
            constant,
            coeffs: Vec::new(),
            sense,
        }
    }

    /// Adds `coeff` to the coefficient of variable `var`, merging repeated indices.
    pub fn add_coeff(&mut self, var: usize, coeff: SymMatrix<T>) -> Result<(), SdpError> {
        if coeff.dim() != self.dim() {
            return Err(SdpError::DimensionMismatch {
                what: "block coefficient",
                expected: self.dim(),
                found: coeff.dim(),
            });
        }
        match self.coeffs.iter_mut().find(|(k, _)| *k == var) {
            Some((_, existing)) => existing.add_scaled(T::one(), &coeff),
            None => {
                self.coeffs.push((var, coeff));
                self.coeffs.sort_by_key(|(k, _)| *k);
            }
        }
        Ok(())
    }

    pub fn with_coeff(mut self, var: usize, coeff: SymMatrix<T>) -> Result<Self, SdpError> {
        self.add_coeff(var, coeff)?;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.constant.dim()
    }

    pub fn constant(&self) -> &SymMatrix<T> {
        &self.constant
    }

    pub fn coeffs(&self) -> &[(usize, SymMatrix<T>)] {
        &self.coeffs
    }

    pub fn coeff(&self, var: usize) -> Option<&SymMatrix<T>> {
        self.coeffs.iter().find(|(k, _)| *k == var).map(|(_, c)| c)
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    /// Largest variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        self.coeffs.last().map(|(k, _)| *k)
    }

    pub fn evaluate(&self, z: &[T]) -> Result<SymMatrix<T>, SdpError> {
        evaluate_block(self, z)
    }

    /// Same block flipped to `⪰ 0` form.
    pub(crate) fn to_psd_form(&self) -> (SymMatrix<T>, Vec<(usize, SymMatrix<T>)>) {
        let sign = match self.sense {
            Sense::PositiveSemidefinite => T::one(),
            Sense::NegativeSemidefinite => -T::one(),
        };
        (
            self.constant.scale(sign),
            self.coeffs.iter().map(|(k, c)| (*k, c.scale(sign))).collect(),
        )
    }
}

/// `constant + Σ z_k coeff_k`.
pub fn evaluate_block<T: Scalar>(block: &LmiBlock<T>, z: &[T]) -> Result<SymMatrix<T>, SdpError> {
    if let Some(k) = block.max_var() {
        if k >= z.len() {
            return Err(SdpError::DimensionMismatch {
                what: "decision vector",
                expected: k + 1,
                found: z.len(),
            });
        }
    }
    let mut out = block.constant.clone();
    for (k, c) in &block.coeffs {
        if z[*k] != T::zero() {
            out.add_scaled(z[*k], c);
        }
    }
    Ok(out)
}
