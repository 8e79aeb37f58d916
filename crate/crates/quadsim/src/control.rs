//! Cascaded PD control: position loop producing attitude references, attitude
//! loop producing torques.

use serde::{Deserialize, Serialize};

use crate::model::{QuadrotorParams, QuadrotorState};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ControllerGains {
    pub k_px: f64,
    pub k_dx: f64,
    pub k_py: f64,
    pub k_dy: f64,
    pub k_p_phi: f64,
    pub k_d_phi: f64,
    pub k_p_theta: f64,
    pub k_d_theta: f64,
    pub k_p_psi: f64,
    pub k_d_psi: f64,
}

impl Default for ControllerGains {
    fn default() -> Self {
        Self {
            k_px: 0.2,
            k_dx: 0.2,
            k_py: -0.2,
            k_dy: -0.2,
            k_p_phi: -1e-3,
            k_d_phi: 2e-4,
            k_p_theta: -1e-3,
            k_d_theta: 2e-4,
            k_p_psi: -3e-4,
            k_d_psi: 1e-4,
        }
    }
}

/// Sign constants reconciling the printed gains with this model's axes.
///
/// The printed gain signs assume an axis convention that is not stated. In the
/// north-east-down, ZYX frame used here, positive roll accelerates toward +y
/// and positive pitch toward −x, and positive torque raises the matching
/// angle. With the gains taken literally both the position loop and the
/// proportional part of the attitude loop have the wrong sign, while the rate
/// damping is already correct. One constant per loop fixes this without
/// touching any gain: `position_output` multiplies the outer PD output and
/// `attitude_error` multiplies the angle error `η_d − η` of the inner PD.
/// [`crate::hover_audit`] checks the resulting hover linearization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LoopConventions {
    pub position_output: f64,
    pub attitude_error: f64,
}

impl Default for LoopConventions {
    fn default() -> Self {
        Self {
            position_output: -1.0,
            attitude_error: -1.0,
        }
    }
}

impl LoopConventions {
    /// Control laws exactly as printed, no sign changes.
    pub fn verbatim() -> Self {
        Self {
            position_output: 1.0,
            attitude_error: 1.0,
        }
    }
}

/// Output of the position loop.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PositionCommand {
    /// N
    pub thrust: f64,
    /// Saturated roll reference, rad.
    pub phi_d: f64,
    /// Saturated pitch reference, rad.
    pub theta_d: f64,
}

/// `φ_d = k_py(y_d − y) + k_dy(0 − v_y)`, `θ_d = k_px(x_d − x) + k_dx(0 − v_x)`,
/// saturated to the tilt limits, and gravity-compensating thrust
/// `F = mg / (cos φ cos θ)` capped at `thrust_cap · mg`.
pub fn position_controller(
    state: &QuadrotorState,
    reference: &[f64; 3],
    gains: &ControllerGains,
    conventions: &LoopConventions,
    params: &QuadrotorParams,
) -> PositionCommand {
    let c = conventions.position_output;
    let phi_d = c * (gains.k_py * (reference[1] - state.p[1]) + gains.k_dy * (0.0 - state.v[1]));
    let theta_d = c * (gains.k_px * (reference[0] - state.p[0]) + gains.k_dx * (0.0 - state.v[0]));
    let tilt = state.eta[0].cos() * state.eta[1].cos();
    let hover = params.hover_thrust();
    let cap = params.thrust_cap * hover;
    let thrust = if tilt > hover / cap { hover / tilt } else { cap };
    PositionCommand {
        thrust,
        phi_d: phi_d.clamp(-params.phi_max, params.phi_max),
        theta_d: theta_d.clamp(-params.theta_max, params.theta_max),
    }
}

/// Per-axis PD on the Euler angles and body rates, clipped to `±τ_max`.
pub fn attitude_controller(
    eta: &[f64; 3],
    omega: &[f64; 3],
    eta_d: &[f64; 3],
    gains: &ControllerGains,
    conventions: &LoopConventions,
    params: &QuadrotorParams,
) -> [f64; 3] {
    let c = conventions.attitude_error;
    let raw = [
        gains.k_p_phi * c * (eta_d[0] - eta[0]) + gains.k_d_phi * (0.0 - omega[0]),
        gains.k_p_theta * c * (eta_d[1] - eta[1]) + gains.k_d_theta * (0.0 - omega[1]),
        gains.k_p_psi * c * (eta_d[2] - eta[2]) + gains.k_d_psi * (0.0 - omega[2]),
    ];
    std::array::from_fn(|i| raw[i].clamp(-params.tau_max[i], params.tau_max[i]))
}
