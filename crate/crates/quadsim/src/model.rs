//! 6-DOF rigid-body model in a north-east-down frame with ZYX Euler angles.

use serde::{Deserialize, Serialize};

use crate::QuadError;

pub type Mat3 = [[f64; 3]; 3];

/// Pitch closer than this to ±π/2 is treated as gimbal lock.
pub const GIMBAL_GUARD: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadrotorParams {
    /// kg
    pub mass: f64,
    /// m/s², positive down
    pub gravity: f64,
    /// Principal moments of inertia, kg·m².
    pub inertia: [f64; 3],
    /// rad
    pub phi_max: f64,
    /// rad
    pub theta_max: f64,
    /// N·m per axis.
    pub tau_max: [f64; 3],
    /// Disturbance torque magnitude, N·m.
    pub d_max: f64,
    /// Thrust cap as a multiple of hover thrust.
    pub thrust_cap: f64,
}

impl Default for QuadrotorParams {
    fn default() -> Self {
        Self {
            mass: 0.028,
            gravity: 9.81,
            inertia: [16.6e-6, 16.6e-6, 29.3e-6],
            phi_max: 40f64.to_radians(),
            theta_max: 40f64.to_radians(),
            tau_max: [1e-4; 3],
            d_max: 1e-5,
            thrust_cap: 2.0,
        }
    }
}

impl QuadrotorParams {
    pub fn validate(&self) -> Result<(), QuadError> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        let ok = positive(self.mass)
            && positive(self.gravity)
            && self.inertia.iter().all(|&j| positive(j))
            && positive(self.phi_max)
            && positive(self.theta_max)
            && self.tau_max.iter().all(|&t| positive(t))
            && positive(self.d_max)
            && positive(self.thrust_cap);
        if ok {
            Ok(())
        } else {
            Err(QuadError::InvalidParams("all physical parameters and bounds must be positive".into()))
        }
    }

    pub fn hover_thrust(&self) -> f64 {
        self.mass * self.gravity
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadrotorState {
    /// Position, m.
    pub p: [f64; 3],
    /// Velocity, m/s.
    pub v: [f64; 3],
    /// Roll, pitch, yaw, rad.
    pub eta: [f64; 3],
    /// Body rates, rad/s.
    pub omega: [f64; 3],
}

impl QuadrotorState {
    pub fn to_array(&self) -> [f64; 12] {
        let mut x = [0.0; 12];
        x[0..3].copy_from_slice(&self.p);
        x[3..6].copy_from_slice(&self.v);
        x[6..9].copy_from_slice(&self.eta);
        x[9..12].copy_from_slice(&self.omega);
        x
    }

    pub fn from_array(x: &[f64; 12]) -> Self {
        let part = |i: usize| [x[i], x[i + 1], x[i + 2]];
        Self {
            p: part(0),
            v: part(3),
            eta: part(6),
            omega: part(9),
        }
    }

    /// `[η; ω]`, the sub-state seen by the attitude filter.
    pub fn attitude(&self) -> [f64; 6] {
        [
            self.eta[0],
            self.eta[1],
            self.eta[2],
            self.omega[0],
            self.omega[1],
            self.omega[2],
        ]
    }

    pub fn norm(&self) -> f64 {
        self.to_array().iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

/// Body-to-inertial rotation `R = R_z(ψ) R_y(θ) R_x(φ)`.
pub fn rotation_matrix(eta: &[f64; 3]) -> Mat3 {
    let (sf, cf) = eta[0].sin_cos();
    let (st, ct) = eta[1].sin_cos();
    let (ss, cs) = eta[2].sin_cos();
    [
        [ct * cs, sf * st * cs - cf * ss, cf * st * cs + sf * ss],
        [ct * ss, sf * st * ss + cf * cs, cf * st * ss - sf * cs],
        [-st, sf * ct, cf * ct],
    ]
}

/// `η̇ = W(η) ω`.
pub fn euler_rate_matrix(eta: &[f64; 3]) -> Result<Mat3, QuadError> {
    let theta = eta[1];
    if !(theta.abs() < std::f64::consts::FRAC_PI_2 - GIMBAL_GUARD) {
        return Err(QuadError::GimbalLock { theta });
    }
    let (sf, cf) = eta[0].sin_cos();
    let (st, ct) = theta.sin_cos();
    let tt = st / ct;
    Ok([[1.0, sf * tt, cf * tt], [0.0, cf, -sf], [0.0, sf / ct, cf / ct]])
}

pub fn mat_vec(m: &Mat3, x: &[f64; 3]) -> [f64; 3] {
    [
        m[0][0] * x[0] + m[0][1] * x[1] + m[0][2] * x[2],
        m[1][0] * x[0] + m[1][1] * x[1] + m[1][2] * x[2],
        m[2][0] * x[0] + m[2][1] * x[1] + m[2][2] * x[2],
    ]
}

pub fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// `J⁻¹(−ω × Jω + τ + d)`.
pub fn angular_acceleration(omega: &[f64; 3], tau: &[f64; 3], d: &[f64; 3], inertia: &[f64; 3]) -> [f64; 3] {
    let jw = [inertia[0] * omega[0], inertia[1] * omega[1], inertia[2] * omega[2]];
    let gyro = cross(omega, &jw);
    [
        (-gyro[0] + tau[0] + d[0]) / inertia[0],
        (-gyro[1] + tau[1] + d[1]) / inertia[1],
        (-gyro[2] + tau[2] + d[2]) / inertia[2],
    ]
}

/// State derivative for thrust `F` along body −z, torque `τ` and disturbance torque `d`.
pub fn dynamics(
    state: &QuadrotorState,
    thrust: f64,
    tau: &[f64; 3],
    d: &[f64; 3],
    params: &QuadrotorParams,
) -> Result<QuadrotorState, QuadError> {
    let w = euler_rate_matrix(&state.eta)?;
    let r = rotation_matrix(&state.eta);
    let f = thrust / params.mass;
    let v_dot = [-r[0][2] * f, -r[1][2] * f, params.gravity - r[2][2] * f];
    Ok(QuadrotorState {
        p: state.v,
        v: v_dot,
        eta: mat_vec(&w, &state.omega),
        omega: angular_acceleration(&state.omega, tau, d, &params.inertia),
    })
}

/// Thrust and torque held constant over an integration step.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Controls {
    pub thrust: f64,
    pub tau: [f64; 3],
}

fn axpy(x: &QuadrotorState, h: f64, k: &QuadrotorState) -> QuadrotorState {
    let (a, b) = (x.to_array(), k.to_array());
    let mut out = [0.0; 12];
    for i in 0..12 {
        out[i] = a[i] + h * b[i];
    }
    QuadrotorState::from_array(&out)
}

/// Classical fourth-order Runge–Kutta step with zero-order-hold inputs.
pub fn step_rk4(
    state: &QuadrotorState,
    controls: &Controls,
    d: &[f64; 3],
    dt: f64,
    params: &QuadrotorParams,
) -> Result<QuadrotorState, QuadError> {
    let f = |s: &QuadrotorState| dynamics(s, controls.thrust, &controls.tau, d, params);
    let k1 = f(state)?;
    let k2 = f(&axpy(state, 0.5 * dt, &k1))?;
    let k3 = f(&axpy(state, 0.5 * dt, &k2))?;
    let k4 = f(&axpy(state, dt, &k3))?;
    let (x, a, b, c, e) = (
        state.to_array(),
        k1.to_array(),
        k2.to_array(),
        k3.to_array(),
        k4.to_array(),
    );
    let mut out = [0.0; 12];
    for i in 0..12 {
        out[i] = x[i] + dt / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * c[i] + e[i]);
    }
    Ok(QuadrotorState::from_array(&out))
}

/// `d_max · (sin 2t, cos 2t, 0)`.
pub fn disturbance(t: f64, params: &QuadrotorParams) -> [f64; 3] {
    let (s, c) = (2.0 * t).sin_cos();
    [params.d_max * s, params.d_max * c, 0.0]
}
