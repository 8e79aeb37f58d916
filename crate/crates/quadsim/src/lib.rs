//! Nonlinear quadrotor simulation with cascaded PD control and an optional
//! invariant-set safety filter on the attitude loop.

mod attitude;
mod audit;
mod control;
mod model;
mod scenario;

pub use attitude::{attitude_linear_system, attitude_vector_field, ATTITUDE_OUTPUT_BOUND};
pub use audit::{hover_audit, HoverAudit};
pub use control::{attitude_controller, position_controller, ControllerGains, LoopConventions, PositionCommand};
pub use model::{
    angular_acceleration, cross, disturbance, dynamics, euler_rate_matrix, rotation_matrix, step_rk4, Controls, Mat3,
    QuadrotorParams, QuadrotorState, GIMBAL_GUARD,
};
pub use scenario::{
    csv_header, read_csv, rms_position_difference, run_scenario, write_csv, LogRow, Scenario, ScenarioKind, Simulator,
    TrajectoryLog, TrajectoryMetrics, DIVERGENCE_NORM,
};

use rci_core::filter::FilterError;
use rci_core::rci::RciError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("gimbal lock: pitch {theta} rad too close to ±π/2")]
    GimbalLock { theta: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("trajectory log: {0}")]
    Log(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Rci(#[from] RciError),
}
