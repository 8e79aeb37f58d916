use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use super::synth::{Synthesis, SynthesisConfig};
use super::{EllipsoidalRciSet, GridDiagnostic, LinearSystem, RciError, SystemData};
use crate::linalg::{Matrix, SymMatrix};
use crate::sdp::SolverSettings;
use crate::Scalar;

/// Serialized synthesis result. Matrices `Q`, `P`, `K` are flat row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RciArtifact {
    pub n: usize,
    pub m: usize,
    pub lambda: f64,
    #[serde(rename = "Q")]
    pub q: Vec<f64>,
    #[serde(rename = "P")]
    pub p: Vec<f64>,
    #[serde(rename = "K")]
    pub k: Vec<f64>,
    #[serde(rename = "trace_Q")]
    pub trace_q: f64,
    /// Linearization residual budget folded into `system.E`, if any.
    pub delta_max: Option<f64>,
    /// System the set was certified for, with the disturbance matrix actually used.
    pub system: SystemData,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub solver: SolverSettings<f64>,
    pub lambda_grid: Vec<f64>,
    /// Margin `ε` in `Q ⪰ εI`.
    pub epsilon: f64,
    pub grid: Vec<GridDiagnostic>,
}

fn flat<T: Scalar>(m: &Matrix<T>) -> Vec<f64> {
    m.as_slice().iter().map(|v| v.as_f64()).collect()
}

impl RciArtifact {
    pub fn from_synthesis<T: Scalar>(
        sys: &LinearSystem<T>,
        synthesis: &Synthesis<T>,
        cfg: &SynthesisConfig<T>,
        delta_max: Option<T>,
    ) -> Self {
        let set = &synthesis.set;
        let s = &cfg.solver;
        Self {
            n: set.n(),
            m: set.m(),
            lambda: set.lambda.as_f64(),
            q: flat(set.q.as_matrix()),
            p: flat(set.p.as_matrix()),
            k: flat(&set.k),
            trace_q: set.trace_q.as_f64(),
            delta_max: delta_max.map(|d| d.as_f64()),
            system: sys.to_data(),
            provenance: Provenance {
                solver: SolverSettings {
                    feas_tol: s.feas_tol.as_f64(),
                    gap_tol: s.gap_tol.as_f64(),
                    max_iter: s.max_iter,
                    initial_scale: s.initial_scale.as_f64(),
                    mu_factor: s.mu_factor.as_f64(),
                    variable_bound: s.variable_bound.as_f64(),
                },
                lambda_grid: cfg.lambda_grid.iter().map(|v| v.as_f64()).collect(),
                epsilon: synthesis.epsilon.as_f64(),
                grid: synthesis.grid.clone(),
            },
        }
    }

    fn check_len(&self, what: &str, v: &[f64], expected: usize) -> Result<(), RciError> {
        if v.len() != expected {
            return Err(RciError::InvalidArtifact(format!(
                "{what} has {} entries, expected {expected}",
                v.len()
            )));
        }
        Ok(())
    }

    /// Set exactly as stored: `Q` and `P` are taken verbatim, `Y = KQ`.
    pub fn set<T: Scalar>(&self) -> Result<EllipsoidalRciSet<T>, RciError> {
        let (n, m) = (self.n, self.m);
        self.check_len("Q", &self.q, n * n)?;
        self.check_len("P", &self.p, n * n)?;
        self.check_len("K", &self.k, m * n)?;
        let conv = |v: &[f64]| v.iter().map(|&x| T::lit(x)).collect::<Vec<T>>();
        let q = SymMatrix::new(Matrix::from_row_major(n, n, conv(&self.q))?)?;
        let p = SymMatrix::new(Matrix::from_row_major(n, n, conv(&self.p))?)?;
        let k = Matrix::from_row_major(m, n, conv(&self.k))?;
        let y = k.try_mul(q.as_matrix())?;
        Ok(EllipsoidalRciSet {
            trace_q: q.trace(),
            q,
            p,
            k,
            y,
            lambda: T::lit(self.lambda),
        })
    }

    pub fn system<T: Scalar>(&self) -> Result<LinearSystem<T>, RciError> {
        let sys = LinearSystem::from_data(&self.system)?;
        if sys.n() != self.n || sys.m() != self.m {
            return Err(RciError::InvalidArtifact("system dimensions disagree with the set".into()));
        }
        Ok(sys)
    }

    pub fn to_json(&self) -> String {
        to_json_17(self).expect("artifact serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, RciError> {
        serde_json::from_str(s).map_err(|e| RciError::InvalidArtifact(e.to_string()))
    }
}

/// Pretty JSON with every float written as 17 significant digits.
struct Digits17 {
    inner: PrettyFormatter<'static>,
}

impl Formatter for Digits17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(w, "{value:.16e}")
        } else {
            w.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// Serializes any value as pretty JSON with 17-significant-digit floats.
pub fn to_json_17<V: Serialize>(value: &V) -> Result<String, serde_json::Error> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(
        &mut buf,
        Digits17 {
            inner: PrettyFormatter::new(),
        },
    );
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_bitwise() {
        let values = vec![0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.0, -0.0];
        let s = to_json_17(&values).unwrap();
        let back: Vec<f64> = serde_json::from_str(&s).unwrap();
        for (a, b) in values.iter().zip(&back) {
            assert_eq!(a.to_bits(), b.to_bits(), "{a} vs {b}");
        }
        assert!(s.contains("3.3333333333333331e-1"));
    }
}
