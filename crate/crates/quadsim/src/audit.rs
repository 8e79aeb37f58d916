//! Eigenvalues of the closed-loop cascade linearized at hover.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::control::{attitude_controller, position_controller, ControllerGains, LoopConventions};
use crate::model::{dynamics, QuadrotorParams, QuadrotorState};

/// States kept in the audit: altitude and climb rate are excluded because the
/// thrust law only cancels gravity and leaves them neutrally stable.
const AUDITED: [usize; 10] = [0, 1, 3, 4, 6, 7, 8, 9, 10, 11];

#[derive(Clone, Debug, Serialize)]
pub struct HoverAudit {
    pub conventions: LoopConventions,
    /// `(re, im)` pairs sorted by real part, descending.
    pub eigenvalues: Vec<(f64, f64)>,
    pub max_real_part: f64,
    pub hurwitz: bool,
}

fn closed_loop(x: &[f64; 12], gains: &ControllerGains, conv: &LoopConventions, params: &QuadrotorParams) -> [f64; 12] {
    let s = QuadrotorState::from_array(x);
    let cmd = position_controller(&s, &[0.0; 3], gains, conv, params);
    let tau = attitude_controller(&s.eta, &s.omega, &[cmd.phi_d, cmd.theta_d, 0.0], gains, conv, params);
    dynamics(&s, cmd.thrust, &tau, &[0.0; 3], params)
        .expect("hover neighbourhood is far from gimbal lock")
        .to_array()
}

/// Central-difference Jacobian at hover and its spectrum.
pub fn hover_audit(params: &QuadrotorParams, gains: &ControllerGains, conventions: &LoopConventions) -> HoverAudit {
    let h = 1e-7;
    let k = AUDITED.len();
    let mut jac = DMatrix::<f64>::zeros(k, k);
    for (c, &j) in AUDITED.iter().enumerate() {
        let mut plus = [0.0; 12];
        let mut minus = [0.0; 12];
        plus[j] = h;
        minus[j] = -h;
        let fp = closed_loop(&plus, gains, conventions, params);
        let fm = closed_loop(&minus, gains, conventions, params);
        for (r, &i) in AUDITED.iter().enumerate() {
            jac[(r, c)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    let mut eigenvalues: Vec<(f64, f64)> = jac.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect();
    eigenvalues.sort_by(|a, b| b.0.total_cmp(&a.0).then(b.1.total_cmp(&a.1)));
    let max_real_part = eigenvalues.iter().map(|e| e.0).fold(f64::NEG_INFINITY, f64::max);
    HoverAudit {
        conventions: *conventions,
        eigenvalues,
        max_real_part,
        hurwitz: max_real_part < 0.0,
    }
}
