//! One test per acceptance criterion; each prints a single PASS/FAIL line.
//!
//! Run with `cargo test -p rci-validation --test acceptance -- --nocapture`
//! to see the lines.

#[path = "../../core/tests/support/battery.rs"]
mod battery;

use std::path::Path;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config as RunnerConfig, TestError, TestRunner};
use rci_cli::{simulate, synth, verify, ProjectConfig, SynthOutput, VerifyTolerances};
use rci_core::filter::{blend, mixing_alpha, FilterConfig, Mixing};
use rci_core::linalg::{cholesky, sym_eig, Matrix, SymMatrix};
use rci_core::rci::{
    estimate_linearization_error, max_gain_over_ellipsoid, verify_nagumo, EllipsoidSampler, EllipsoidalRciSet,
    LinearSystem,
};
use rci_quadsim::{attitude_vector_field, read_csv, rms_position_difference, rotation_matrix, LogRow};
use rci_validation::Verdict;

const SAMPLES: usize = 100_000;
const SEED: u64 = 2024;
const ATTITUDE_BOUND: f64 = 0.698;

struct Project {
    _dir: tempfile::TempDir,
    cfg: ProjectConfig,
    synth: SynthOutput,
    synth_time: Duration,
}

impl Project {
    fn load(name: &str) -> Self {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
        let mut cfg = ProjectConfig::load(&path).expect("config loads");
        let dir = tempfile::tempdir().unwrap();
        cfg.output_dir = dir.path().to_path_buf();
        let t0 = Instant::now();
        let synth = synth(&cfg).expect("synthesis feasible");
        Self {
            _dir: dir,
            cfg,
            synth,
            synth_time: t0.elapsed(),
        }
    }

    fn set(&self) -> EllipsoidalRciSet<f64> {
        self.synth.artifact.set().unwrap()
    }

    fn system(&self) -> LinearSystem<f64> {
        self.synth.artifact.system().unwrap()
    }

    /// Runs `scenario` through the CLI pipeline and reads the trajectory back.
    fn run(&self, scenario: &str, filter: bool) -> (rci_cli::SimulationRecord, Vec<LogRow>, Duration) {
        let t0 = Instant::now();
        let out = simulate(&self.cfg, scenario, Some(filter)).expect("simulation runs");
        let elapsed = t0.elapsed();
        let rows = read_csv(std::fs::File::open(&out.csv_path).unwrap()).unwrap();
        (out.record, rows, elapsed)
    }
}

fn quadrotor() -> &'static Project {
    static P: OnceLock<Project> = OnceLock::new();
    P.get_or_init(|| Project::load("quadrotor.json"))
}

fn double_integrator() -> &'static Project {
    static P: OnceLock<Project> = OnceLock::new();
    P.get_or_init(|| Project::load("double_integrator.json"))
}

fn max_attitude(r: &rci_cli::SimulationRecord) -> f64 {
    r.metrics.max_abs_phi.max(r.metrics.max_abs_theta)
}

#[test]
fn criterion_1_quadrotor_synthesis_feasibility() {
    let p = quadrotor();
    let t0 = Instant::now();
    let rep = verify(&p.synth.artifact_path, SAMPLES, SEED, &VerifyTolerances::default()).unwrap();
    let set = p.set();
    let sys = p.system();
    let gains: Vec<f64> = (0..3)
        .map(|i| max_gain_over_ellipsoid(set.k.row(i), &set.q).unwrap())
        .collect();
    let outputs = [set.q[(0, 0)].sqrt(), set.q[(1, 1)].sqrt()];
    let max_gain = gains.iter().copied().fold(0.0, f64::max);
    let max_out = outputs[0].max(outputs[1]);
    let runtime = p.synth_time + t0.elapsed();
    let pass = p.synth.artifact.delta_max == Some(0.65)
        && sys.e().cols() == 9
        && rep.lmi_residual <= 1e-8
        && max_gain <= 1e-4
        && max_out <= ATTITUDE_BOUND
        && runtime < Duration::from_secs(30);
    Verdict {
        id: 1,
        title: "quadrotor synthesis feasibility",
        pass,
        detail: format!(
            "lambda* {:.4}, trace Q {:.4}, lmi residual {:.2e}, max sqrt(k'Qk) {:.12e}, max sqrt(Q_ii) {:.12}",
            p.synth.lambda, p.synth.trace_q, rep.lmi_residual, max_gain, max_out
        ),
        elapsed: runtime,
    }
    .report();
}

#[test]
fn criterion_2_nagumo_certification() {
    let (q, di) = (quadrotor(), double_integrator());
    let t0 = Instant::now();
    let wq = verify_nagumo(&q.set(), &q.system(), SAMPLES, SEED).unwrap();
    let wd = verify_nagumo(&di.set(), &di.system(), SAMPLES, SEED).unwrap();
    let elapsed = t0.elapsed();
    Verdict {
        id: 2,
        title: "Nagumo certification",
        pass: wq <= 1e-6 && wd <= 1e-6 && elapsed < Duration::from_secs(10),
        detail: format!("worst margin: quadrotor {wq:.3e}, double integrator {wd:.3e}, {SAMPLES} samples each"),
        elapsed,
    }
    .report();
}

#[test]
fn criterion_3_linearization_error_anchor() {
    let p = quadrotor();
    let t0 = Instant::now();
    let field = attitude_vector_field(&p.cfg.params);
    let err = estimate_linearization_error(&field, &p.system(), &p.set(), SAMPLES, SEED).unwrap();
    let budget = p.synth.artifact.delta_max.unwrap();
    Verdict {
        id: 3,
        title: "linearization-error anchor",
        pass: (0.50..=0.65).contains(&err) && err < budget,
        detail: format!("max residual {err:.4} over {SAMPLES} samples, band [0.50, 0.65], budget {budget}"),
        elapsed: t0.elapsed(),
    }
    .report();
}

#[test]
fn criterion_4_scenario_two_dichotomy() {
    let p = quadrotor();
    let (off, _, t_off) = p.run("scenario2", false);
    let (on, _, t_on) = p.run("scenario2", true);
    let limit = Duration::from_secs(10);
    let off_bad = off.metrics.diverged || max_attitude(&off) > ATTITUDE_BOUND;
    let on_ok = !on.metrics.diverged
        && on.metrics.steps == 20_000
        && max_attitude(&on) <= ATTITUDE_BOUND + 1e-3
        && on.metrics.final_pos_err <= 0.1;
    Verdict {
        id: 4,
        title: "scenario II dichotomy",
        pass: off_bad && on_ok && t_off < limit && t_on < limit,
        detail: format!(
            "off: max attitude {:.4}, diverged {}; on: max attitude {:.4}, final error {:.4} m",
            max_attitude(&off),
            off.metrics.diverged,
            max_attitude(&on),
            on.metrics.final_pos_err
        ),
        elapsed: t_off + t_on,
    }
    .report();
}

#[test]
fn criterion_5_scenario_one_minimal_intervention() {
    let p = quadrotor();
    let (_, off_rows, t_off) = p.run("scenario1", false);
    let (on, on_rows, t_on) = p.run("scenario1", true);
    let scn = p.cfg.scenario("scenario1").unwrap();
    let target = scn.reference(0.0);
    let p0 = scn.x0.p;
    let scale = (0..3).map(|i| (target[i] - p0[i]).powi(2)).sum::<f64>().sqrt();
    let rel = rms_position_difference(&on_rows, &off_rows) / scale;
    let zero = on.metrics.alpha_zero_fraction;
    Verdict {
        id: 5,
        title: "scenario I minimal intervention",
        pass: rel <= 0.02 && zero >= 0.95,
        detail: format!("rms position difference {:.3}% of step size, alpha = 0 on {:.2}% of steps", rel * 100.0, zero * 100.0),
        elapsed: t_off + t_on,
    }
    .report();
}

#[test]
fn criterion_6_scenario_three() {
    let p = quadrotor();
    let (off, _, t_off) = p.run("scenario3", false);
    let (on, _, t_on) = p.run("scenario3", true);
    let off_bad = off.metrics.diverged || max_attitude(&off) > ATTITUDE_BOUND;
    let max_h = on.metrics.max_h.unwrap_or(f64::INFINITY);
    let on_ok = !on.metrics.diverged && on.metrics.steps == 30_000 && max_h <= 1.0 + 5e-3;
    Verdict {
        id: 6,
        title: "scenario III",
        pass: off_bad && on_ok,
        detail: format!(
            "off: max attitude {:.4}, diverged {}; on: max h {:.4} over {} steps",
            max_attitude(&off),
            off.metrics.diverged,
            max_h,
            on.metrics.steps
        ),
        elapsed: t_off + t_on,
    }
    .report();
}

/// `ẋ = (A + BK)x + E d` with `d = EᵀPx / ‖EᵀPx‖`, the disturbance that pushes `h` up fastest.
fn worst_case_field(sys: &LinearSystem<f64>, set: &EllipsoidalRciSet<f64>) -> impl Fn(&[f64]) -> Vec<f64> {
    let a_cl = sys.closed_loop(&set.k).unwrap();
    let e = sys.e().clone();
    let p = set.p.clone();
    move |x| {
        let g = e.tr_mul_vec(&p.mul_vec(x));
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        let d: Vec<f64> = if norm > 0.0 { g.iter().map(|v| v / norm).collect() } else { vec![0.0; g.len()] };
        let ed = e.mul_vec(&d);
        a_cl.mul_vec(x).iter().zip(ed).map(|(u, v)| u + v).collect()
    }
}

fn rk4(f: &impl Fn(&[f64]) -> Vec<f64>, x: &[f64], h: f64) -> Vec<f64> {
    let shift = |base: &[f64], k: &[f64], s: f64| base.iter().zip(k).map(|(b, k)| b + s * k).collect::<Vec<_>>();
    let k1 = f(x);
    let k2 = f(&shift(x, &k1, h / 2.0));
    let k3 = f(&shift(x, &k2, h / 2.0));
    let k4 = f(&shift(x, &k3, h));
    (0..x.len())
        .map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

#[test]
fn criterion_7_double_integrator_oracle() {
    let p = double_integrator();
    let t0 = Instant::now();
    let (sys, set) = (p.system(), p.set());
    let f = worst_case_field(&sys, &set);
    let mut sampler = EllipsoidSampler::new(&set.q, SEED).unwrap();
    let (dt, steps) = (1e-3, 10_000);
    let (mut max_h, mut max_excess) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for _ in 0..200 {
        let mut x = sampler.boundary();
        for step in 0..=steps {
            max_h = max_h.max(set.level(&x));
            let u = set.k.mul_vec(&x);
            for (ui, lim) in u.iter().zip(sys.u_max()) {
                max_excess = max_excess.max(ui.abs() - lim);
            }
            if step < steps {
                x = rk4(&f, &x, dt);
            }
        }
    }
    Verdict {
        id: 7,
        title: "double-integrator oracle equivalence",
        pass: max_h <= 1.0 + 1e-3 && max_excess <= 1e-9,
        detail: format!("200 boundary starts, 10 s worst-case disturbance: max h {max_h:.9}, max |Kx| - u_max {max_excess:.3e}"),
        elapsed: t0.elapsed(),
    }
    .report();
}

#[test]
fn criterion_8_sdp_battery() {
    let t0 = Instant::now();
    let cases = battery::battery();
    let outcomes: Vec<battery::Outcome> = cases.iter().map(battery::run).collect();
    let failed: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.ok)
        .map(|o| format!("{}: {}", o.name, o.detail))
        .collect();
    Verdict {
        id: 8,
        title: "SDP solver battery",
        pass: cases.len() == 20 && failed.is_empty(),
        detail: if failed.is_empty() {
            format!("{} of {} classified correctly", outcomes.len(), cases.len())
        } else {
            format!("failures: {}", failed.join("; "))
        },
        elapsed: t0.elapsed(),
    }
    .report();
}

fn spd_strategy() -> impl Strategy<Value = SymMatrix<f64>> {
    (1usize..=7).prop_flat_map(|n| {
        prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |v| {
            let g = Matrix::from_row_major(n, n, v).unwrap();
            let ggt = &g * &g.transpose();
            SymMatrix::from_fn(n, |i, j| ggt[(i, j)] + if i == j { 0.1 } else { 0.0 })
        })
    })
}

fn mixing_cfg(mixing: Mixing) -> FilterConfig<f64> {
    FilterConfig::new(SymMatrix::identity(1), Matrix::zeros(1, 1), 0.1, 0.9, vec![1.0], mixing).unwrap()
}

fn suite<S: Strategy>(
    name: &'static str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    let mut runner = TestRunner::new(RunnerConfig {
        cases: 1024,
        ..RunnerConfig::default()
    });
    runner.run(&strategy, test).map_err(|e| match e {
        TestError::Fail(why, input) => format!("{name}: {why} at {input:?}"),
        TestError::Abort(why) => format!("{name}: aborted ({why})"),
    })
}

#[test]
fn criterion_9_property_suites() {
    let t0 = Instant::now();
    let results = [
        suite("cholesky reconstruction", spd_strategy(), |s| {
            let c = cholesky(&s).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let llt = c.l() * &c.l().transpose();
            prop_assert!((&llt - s.as_matrix()).max_abs() <= 1e-12 * s.frobenius_norm().max(1.0));
            Ok(())
        }),
        suite("eigenvector orthogonality and residual", spd_strategy(), |s| {
            let n = s.dim();
            let e = sym_eig(&s).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let vtv = &e.vectors.transpose() * &e.vectors;
            prop_assert!((&vtv - &Matrix::identity(n)).max_abs() <= 1e-12);
            let av = s.as_matrix() * &e.vectors;
            for k in 0..n {
                for i in 0..n {
                    prop_assert!((av[(i, k)] - e.values[k] * e.vectors[(i, k)]).abs() <= 1e-12 * s.frobenius_norm().max(1.0));
                }
            }
            Ok(())
        }),
        suite("mixing monotonicity", (0.0f64..2.0, 0.0f64..2.0, any::<bool>()), |(a, b, sig)| {
            let c = mixing_cfg(if sig { Mixing::Sigmoid } else { Mixing::Ramp });
            let (lo, hi) = (a.min(b), a.max(b));
            prop_assert!(mixing_alpha(lo, &c) <= mixing_alpha(hi, &c));
            Ok(())
        }),
        suite("mixing branch values", (0.9f64..10.0, any::<bool>()), |(h, sig)| {
            let c = mixing_cfg(if sig { Mixing::Sigmoid } else { Mixing::Ramp });
            prop_assert_eq!(mixing_alpha(0.05, &c), 0.0);
            prop_assert!((mixing_alpha(0.5, &c) - 0.5).abs() <= 1e-12);
            prop_assert_eq!(mixing_alpha(h, &c), 1.0);
            Ok(())
        }),
        suite("convex-combination betweenness", (-5.0f64..5.0, -5.0f64..5.0, 0.0f64..=1.0), |(u, v, a)| {
            let w = blend(u, v, a);
            prop_assert!(w >= u.min(v) - 1e-12 && w <= u.max(v) + 1e-12);
            Ok(())
        }),
        suite("rotation orthonormality", (-3.2f64..3.2, -3.2f64..3.2, -3.2f64..3.2), |(phi, theta, psi)| {
            let r = rotation_matrix(&[phi, theta, psi]);
            for i in 0..3 {
                for j in 0..3 {
                    let dot: f64 = (0..3).map(|k| r[k][i] * r[k][j]).sum();
                    let target = f64::from(u8::from(i == j));
                    prop_assert!((dot - target).abs() <= 1e-12);
                }
            }
            Ok(())
        }),
    ];
    let failures: Vec<String> = results.into_iter().filter_map(Result::err).collect();
    Verdict {
        id: 9,
        title: "property suites",
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            "6 suites x 1024 random cases green".into()
        } else {
            failures.join("; ")
        },
        elapsed: t0.elapsed(),
    }
    .report();
}
