//! Ellipsoidal robust controlled invariant sets for constrained linear systems.
//!
//! The crate bundles a small dense SDP solver, the LMI assembly that turns a
//! linear system with bounded disturbances and box constraints into an
//! ellipsoid plus feedback gain, sampling oracles that check the result, and a
//! runtime filter that blends a nominal command with the certified backup law.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the aliases at the
//! crate root fix the scalar to `f64`.

pub mod filter;
pub mod linalg;
pub mod rci;
mod scalar;
pub mod sdp;

pub use scalar::Scalar;

pub type MatrixF64 = linalg::Matrix<f64>;
pub type SymMatrixF64 = linalg::SymMatrix<f64>;
pub type LinearSystemF64 = rci::LinearSystem<f64>;
pub type EllipsoidalRciSetF64 = rci::EllipsoidalRciSet<f64>;
pub type SynthesisConfigF64 = rci::SynthesisConfig<f64>;
pub type SolverSettingsF64 = sdp::SolverSettings<f64>;
pub type SdpProblemF64 = sdp::SdpProblem<f64>;
pub type SdpSolutionF64 = sdp::SdpSolution<f64>;
pub type FilterConfigF64 = filter::FilterConfig<f64>;
