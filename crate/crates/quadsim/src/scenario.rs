use std::io;

use rci_core::filter::{filter_into, safety_metric, FilterConfig};
use serde::{Deserialize, Serialize};

use crate::control::{attitude_controller, position_controller, ControllerGains, LoopConventions};
use crate::model::{disturbance, step_rk4, Controls, QuadrotorParams, QuadrotorState};
use crate::QuadError;

/// State norm beyond which a run is declared diverged.
pub const DIVERGENCE_NORM: f64 = 1e6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioKind {
    SetPoint { p_d: [f64; 3] },
    /// Horizontal circle `(r cos ωt, r sin ωt, 0)`.
    Circle { radius: f64, angular_speed: f64 },
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    #[serde(flatten)]
    pub kind: ScenarioKind,
    /// s
    pub duration: f64,
    /// s
    pub dt: f64,
    #[serde(default = "default_true")]
    pub disturbance_on: bool,
    #[serde(default)]
    pub filter_on: bool,
    #[serde(default)]
    pub x0: QuadrotorState,
    #[serde(default)]
    pub seed: u64,
}

impl Scenario {
    fn base(name: &str, kind: ScenarioKind, duration: f64) -> Self {
        Self {
            name: name.into(),
            kind,
            duration,
            dt: 1e-3,
            disturbance_on: true,
            filter_on: false,
            x0: QuadrotorState::default(),
            seed: 0,
        }
    }

    /// Small set-point change.
    pub fn small_step() -> Self {
        Self::base("scenario1", ScenarioKind::SetPoint { p_d: [0.5, 0.5, 0.0] }, 20.0)
    }

    /// Large set-point change.
    pub fn large_step() -> Self {
        Self::base("scenario2", ScenarioKind::SetPoint { p_d: [10.0, 10.0, 0.0] }, 20.0)
    }

    /// Circle of radius 5 m at 1 rad/s.
    pub fn circle() -> Self {
        Self::base(
            "scenario3",
            ScenarioKind::Circle {
                radius: 5.0,
                angular_speed: 1.0,
            },
            30.0,
        )
    }

    pub fn with_filter(mut self, on: bool) -> Self {
        self.filter_on = on;
        self
    }

    pub fn validate(&self) -> Result<(), QuadError> {
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(QuadError::InvalidScenario(format!("{}: duration must be positive", self.name)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(QuadError::InvalidScenario(format!("{}: dt must be positive", self.name)));
        }
        if let ScenarioKind::Circle { radius, angular_speed } = self.kind {
            if !(radius.is_finite() && angular_speed.is_finite()) {
                return Err(QuadError::InvalidScenario(format!("{}: circle parameters must be finite", self.name)));
            }
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.duration / self.dt).round() as usize
    }

    pub fn reference(&self, t: f64) -> [f64; 3] {
        match self.kind {
            ScenarioKind::SetPoint { p_d } => p_d,
            ScenarioKind::Circle { radius, angular_speed } => {
                let (s, c) = (angular_speed * t).sin_cos();
                [radius * c, radius * s, 0.0]
            }
        }
    }
}

/// One logged instant: the state at `t` and the commands held over `[t, t + dt)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogRow {
    pub t: f64,
    pub x: [f64; 12],
    pub u_nom: [f64; 3],
    pub u_s: [f64; 3],
    pub thrust: f64,
    /// `NaN` when no filter configuration is available.
    pub h: f64,
    pub alpha: f64,
    pub diverged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryLog {
    pub rows: Vec<LogRow>,
    /// Time at which divergence was detected, if it was.
    pub diverged_at: Option<f64>,
}

impl TrajectoryLog {
    pub fn diverged(&self) -> bool {
        self.diverged_at.is_some()
    }
}

pub struct Simulator<'a> {
    pub params: &'a QuadrotorParams,
    pub gains: &'a ControllerGains,
    pub conventions: &'a LoopConventions,
}

impl Simulator<'_> {
    fn evaluate(
        &self,
        scn: &Scenario,
        filter: Option<&FilterConfig<f64>>,
        t: f64,
        s: &QuadrotorState,
    ) -> Result<LogRow, QuadError> {
        let cmd = position_controller(s, &scn.reference(t), self.gains, self.conventions, self.params);
        let u_nom = attitude_controller(
            &s.eta,
            &s.omega,
            &[cmd.phi_d, cmd.theta_d, 0.0],
            self.gains,
            self.conventions,
            self.params,
        );
        let xa = s.attitude();
        let mut u_s = u_nom;
        let (h, alpha) = match filter {
            Some(cfg) if scn.filter_on => {
                let step = filter_into(&xa, &u_nom, cfg, &mut u_s)?;
                (step.h, step.alpha)
            }
            Some(cfg) => (safety_metric(&xa, cfg.p())?, 0.0),
            None => (f64::NAN, 0.0),
        };
        for (u, lim) in u_s.iter_mut().zip(&self.params.tau_max) {
            *u = u.clamp(-lim, *lim);
        }
        Ok(LogRow {
            t,
            x: s.to_array(),
            u_nom,
            u_s,
            thrust: cmd.thrust,
            h,
            alpha,
            diverged: false,
        })
    }

    /// Simulates the cascade with the filter applied when `scn.filter_on`.
    ///
    /// A filter configuration is required when the filter is on; when it is
    /// off, a configuration is only used to log `h`.
    pub fn run(&self, scn: &Scenario, filter: Option<&FilterConfig<f64>>) -> Result<TrajectoryLog, QuadError> {
        scn.validate()?;
        self.params.validate()?;
        if scn.filter_on && filter.is_none() {
            return Err(QuadError::InvalidScenario(format!(
                "{}: filter is on but no filter configuration was given",
                scn.name
            )));
        }
        if let Some(cfg) = filter {
            if cfg.n() != 6 || cfg.m() != 3 {
                return Err(QuadError::InvalidScenario("filter must act on the 6-dim attitude state with 3 torques".into()));
            }
        }
        let n = scn.steps();
        let mut rows = Vec::with_capacity(n + 1);
        let mut s = scn.x0;
        for k in 0..n {
            let t = k as f64 * scn.dt;
            let row = self.evaluate(scn, filter, t, &s)?;
            let d = if scn.disturbance_on {
                disturbance(t, self.params)
            } else {
                [0.0; 3]
            };
            let controls = Controls {
                thrust: row.thrust,
                tau: row.u_s,
            };
            rows.push(row);
            let next = match step_rk4(&s, &controls, &d, scn.dt, self.params) {
                Ok(next) if next.is_finite() && next.norm() <= DIVERGENCE_NORM => next,
                other => {
                    let t_next = (k + 1) as f64 * scn.dt;
                    let x = match other {
                        Ok(next) => next.to_array(),
                        Err(_) => s.to_array(),
                    };
                    rows.push(LogRow {
                        t: t_next,
                        x,
                        u_nom: [f64::NAN; 3],
                        u_s: [f64::NAN; 3],
                        thrust: f64::NAN,
                        h: f64::NAN,
                        alpha: f64::NAN,
                        diverged: true,
                    });
                    return Ok(TrajectoryLog {
                        rows,
                        diverged_at: Some(t_next),
                    });
                }
            };
            s = next;
        }
        rows.push(self.evaluate(scn, filter, n as f64 * scn.dt, &s)?);
        Ok(TrajectoryLog { rows, diverged_at: None })
    }
}

/// Convenience wrapper around [`Simulator::run`].
pub fn run_scenario(
    scn: &Scenario,
    filter: Option<&FilterConfig<f64>>,
    params: &QuadrotorParams,
    gains: &ControllerGains,
    conventions: &LoopConventions,
) -> Result<TrajectoryLog, QuadError> {
    Simulator {
        params,
        gains,
        conventions,
    }
    .run(scn, filter)
}

pub fn csv_header() -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend((0..12).map(|i| format!("x{i}")));
    h.extend((0..3).map(|i| format!("u_nom{i}")));
    h.extend((0..3).map(|i| format!("u_s{i}")));
    h.extend(["F", "h", "alpha", "diverged"].map(String::from));
    h
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: io::Write>(rows: &[LogRow], w: W) -> Result<(), QuadError> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(csv_header())?;
    for r in rows {
        let mut rec = Vec::with_capacity(23);
        rec.push(fmt(r.t));
        rec.extend(r.x.iter().map(|&v| fmt(v)));
        rec.extend(r.u_nom.iter().map(|&v| fmt(v)));
        rec.extend(r.u_s.iter().map(|&v| fmt(v)));
        rec.push(fmt(r.thrust));
        rec.push(fmt(r.h));
        rec.push(fmt(r.alpha));
        rec.push(if r.diverged { "1" } else { "0" }.to_string());
        wr.write_record(&rec)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_csv<R: io::Read>(r: R) -> Result<Vec<LogRow>, QuadError> {
    let mut rd = csv::Reader::from_reader(r);
    let expected = csv_header();
    let header: Vec<String> = rd.headers()?.iter().map(String::from).collect();
    if header != expected {
        return Err(QuadError::Log("unexpected trajectory header".into()));
    }
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64, QuadError> {
            rec[i]
                .parse::<f64>()
                .map_err(|e| QuadError::Log(format!("column {}: {e}", expected[i])))
        };
        let mut vals = [0.0; 22];
        for (i, v) in vals.iter_mut().enumerate() {
            *v = num(i)?;
        }
        let diverged = match &rec[22] {
            "0" => false,
            "1" => true,
            other => return Err(QuadError::Log(format!("diverged flag '{other}'"))),
        };
        rows.push(LogRow {
            t: vals[0],
            x: std::array::from_fn(|i| vals[1 + i]),
            u_nom: std::array::from_fn(|i| vals[13 + i]),
            u_s: std::array::from_fn(|i| vals[16 + i]),
            thrust: vals[19],
            h: vals[20],
            alpha: vals[21],
            diverged,
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMetrics {
    pub max_abs_phi: f64,
    pub max_abs_theta: f64,
    /// Absent when the run logged no safety metric.
    pub max_h: Option<f64>,
    /// Root mean square of `‖p − p_d(t)‖` over logged rows.
    pub rms_pos_err: f64,
    /// `‖p − p_d‖` at the last logged row.
    pub final_pos_err: f64,
    /// Share of control steps with `α = 0`.
    pub alpha_zero_fraction: f64,
    pub diverged: bool,
    pub steps: usize,
}

fn pos_err(scn: &Scenario, r: &LogRow) -> f64 {
    let pd = scn.reference(r.t);
    ((r.x[0] - pd[0]).powi(2) + (r.x[1] - pd[1]).powi(2) + (r.x[2] - pd[2]).powi(2)).sqrt()
}

impl TrajectoryMetrics {
    pub fn from_rows(rows: &[LogRow], scn: &Scenario) -> Self {
        let finite_max = |f: &dyn Fn(&LogRow) -> f64| rows.iter().map(f).filter(|v| !v.is_nan()).fold(0.0f64, f64::max);
        let max_abs_phi = finite_max(&|r| r.x[6].abs());
        let max_abs_theta = finite_max(&|r| r.x[7].abs());
        let hs: Vec<f64> = rows.iter().map(|r| r.h).filter(|h| !h.is_nan()).collect();
        let max_h = if hs.is_empty() {
            None
        } else {
            Some(hs.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        };
        let sq: f64 = rows.iter().map(|r| pos_err(scn, r).powi(2)).sum();
        let rms_pos_err = (sq / rows.len().max(1) as f64).sqrt();
        let final_pos_err = rows.last().map_or(f64::NAN, |r| pos_err(scn, r));
        let controlled: Vec<&LogRow> = rows.iter().filter(|r| !r.diverged).collect();
        let zeros = controlled.iter().filter(|r| r.alpha == 0.0).count();
        let alpha_zero_fraction = zeros as f64 / controlled.len().max(1) as f64;
        Self {
            max_abs_phi,
            max_abs_theta,
            max_h,
            rms_pos_err,
            final_pos_err,
            alpha_zero_fraction,
            diverged: rows.iter().any(|r| r.diverged),
            steps: rows.len().saturating_sub(1),
        }
    }
}

/// Root mean square of `‖p_a(t) − p_b(t)‖` over the rows both logs share.
pub fn rms_position_difference(a: &[LogRow], b: &[LogRow]) -> f64 {
    let n = a.len().min(b.len());
    if n == 0 {
        return f64::NAN;
    }
    let sq: f64 = a
        .iter()
        .zip(b)
        .map(|(ra, rb)| (0..3).map(|i| (ra.x[i] - rb.x[i]).powi(2)).sum::<f64>())
        .sum();
    (sq / n as f64).sqrt()
}
