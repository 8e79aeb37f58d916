//! Hover linearization of the attitude sub-state `[φ, θ, ψ, p, q, r]`.

use rci_core::linalg::Matrix;
use rci_core::rci::{LinearSystem, RciError};

use crate::model::{angular_acceleration, euler_rate_matrix, mat_vec, QuadrotorParams};

/// Output bound on roll and pitch used for synthesis, rad.
pub const ATTITUDE_OUTPUT_BOUND: f64 = 0.698;

/// `A = [[0, I], [0, 0]]`, `B = [0; J⁻¹]`, `E = [0; J⁻¹ d_max]`, outputs roll and pitch.
pub fn attitude_linear_system(params: &QuadrotorParams) -> Result<LinearSystem<f64>, RciError> {
    let mut a = Matrix::zeros(6, 6);
    for i in 0..3 {
        a[(i, i + 3)] = 1.0;
    }
    let mut b = Matrix::zeros(6, 3);
    let mut e = Matrix::zeros(6, 3);
    for i in 0..3 {
        b[(i + 3, i)] = 1.0 / params.inertia[i];
        e[(i + 3, i)] = params.d_max / params.inertia[i];
    }
    let mut c = Matrix::zeros(2, 6);
    c[(0, 0)] = 1.0;
    c[(1, 1)] = 1.0;
    LinearSystem::new(
        a,
        b,
        e,
        c,
        params.tau_max.to_vec(),
        vec![ATTITUDE_OUTPUT_BOUND, ATTITUDE_OUTPUT_BOUND],
    )
}

/// Nonlinear attitude field `[W(η)ω; J⁻¹(−ω × Jω + τ)]` without disturbance.
///
/// Beyond the gimbal-lock guard the field is reported as non-finite.
pub fn attitude_vector_field(params: &QuadrotorParams) -> impl Fn(&[f64], &[f64]) -> Vec<f64> + '_ {
    move |x, u| {
        let eta = [x[0], x[1], x[2]];
        let omega = [x[3], x[4], x[5]];
        let tau = [u[0], u[1], u[2]];
        let Ok(w) = euler_rate_matrix(&eta) else {
            return vec![f64::INFINITY; 6];
        };
        let eta_dot = mat_vec(&w, &omega);
        let omega_dot = angular_acceleration(&omega, &tau, &[0.0; 3], &params.inertia);
        eta_dot.into_iter().chain(omega_dot).collect()
    }
}
