//! The four workflows, each taking a resolved config and an output
//! directory. Nothing is written until the config has been validated.

use std::path::{Path, PathBuf};

use acorbfn_core::aco::benchmark::{gaussian_blobs, sine_target};
use acorbfn_core::aco::compare::{compare_seed, CompareReport};
use acorbfn_core::dynamics::*;
use acorbfn_core::sim::ik::run_ik_experiment;
use acorbfn_core::sim::{rk4_step, run_simulation, Metrics};
use acorbfn_core::rng;
use rand::Rng;
use rayon::prelude::*;

use crate::config::Config;
use crate::error::CliError;
use crate::formats::{self, write_atomic};
use crate::plot;

fn emit(dir: &Path, name: &str, bytes: &[u8], written: &mut Vec<String>) -> Result<(), CliError> {
    write_atomic(&dir.join(name), bytes)?;
    written.push(name.to_string());
    Ok(())
}

fn finish(dir: &Path, subcommand: &str, cfg: &Config, mut written: Vec<String>) -> Result<Vec<PathBuf>, CliError> {
    let refs: Vec<&str> = written.iter().map(String::as_str).collect();
    let text = formats::manifest(subcommand, cfg, &refs);
    write_atomic(&dir.join("manifest.txt"), text.as_bytes())?;
    written.push("manifest.txt".into());
    Ok(written.iter().map(|w| dir.join(w)).collect())
}

pub struct SimulateOutcome {
    pub files: Vec<PathBuf>,
    pub metrics: Option<Metrics>,
    pub abort: Option<String>,
}

pub fn simulate(cfg: &Config, out: &Path, plots: bool) -> Result<SimulateOutcome, CliError> {
    cfg.validate()?;
    let run = run_simulation(&cfg.robot, &cfg.ctrl, &cfg.sim_config())?;
    let mut written = Vec::new();
    emit(out, "trace.csv", &formats::trace_csv(&run.trace), &mut written)?;
    if let Some(m) = &run.metrics {
        emit(out, "metrics.txt", formats::metrics_text(m).as_bytes(), &mut written)?;
        emit(out, "metrics.csv", &formats::metrics_csv(m), &mut written)?;
    }
    if plots {
        for (stem, svg) in plot::trace_panels(&run.trace) {
            emit(out, &format!("plots/{stem}.svg"), svg.as_bytes(), &mut written)?;
        }
    }
    Ok(SimulateOutcome {
        files: finish(out, "simulate", cfg, written)?,
        metrics: run.metrics,
        abort: run.trace.abort.map(|e| e.to_string()),
    })
}

pub struct TrainIkOutcome {
    pub files: Vec<PathBuf>,
    pub mean_joint_error: f64,
    pub mean_cartesian_error: f64,
}

pub fn train_ik(cfg: &Config, out: &Path) -> Result<TrainIkOutcome, CliError> {
    cfg.validate()?;
    let report = run_ik_experiment(&cfg.robot, &cfg.ik_config())?;
    let mut written = Vec::new();
    emit(out, "ik_report.csv", &formats::ik_csv(&report), &mut written)?;
    emit(out, "ik_summary.txt", formats::ik_summary(&report).as_bytes(), &mut written)?;
    emit(out, "network.txt", formats::network_text(&report.network).as_bytes(), &mut written)?;
    Ok(TrainIkOutcome {
        files: finish(out, "train-ik", cfg, written)?,
        mean_joint_error: report.mean_joint_error,
        mean_cartesian_error: report.mean_cartesian_error,
    })
}

pub struct CompareOutcome {
    pub files: Vec<PathBuf>,
    pub report: CompareReport,
}

/// Seeds run in parallel; rows come back in seed order, so the output does
/// not depend on scheduling.
pub fn compare(cfg: &Config, out: &Path) -> Result<CompareOutcome, CliError> {
    cfg.validate()?;
    let inputs = gaussian_blobs(&cfg.compare.blobs)?;
    let targets: Vec<Vec<f64>> = inputs.iter().map(|x| vec![sine_target(x)]).collect();
    let cc = cfg.compare_config();
    let rows = (0..cc.seeds as u64)
        .into_par_iter()
        .map(|s| compare_seed(&inputs, &targets, &cc, cc.base_seed + s))
        .collect::<Result<Vec<_>, _>>()?;
    let report = CompareReport::from_rows(rows)?;
    let mut written = Vec::new();
    emit(out, "compare.csv", &formats::compare_csv(&report), &mut written)?;
    emit(out, "summary.txt", formats::compare_summary(&report).as_bytes(), &mut written)?;
    Ok(CompareOutcome {
        files: finish(out, "compare", cfg, written)?,
        report,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub required: bool,
    pub passed: bool,
    /// Worst observed residual or margin.
    pub worst: f64,
    pub note: &'static str,
}

pub struct CheckOutcome {
    pub files: Vec<PathBuf>,
    pub checks: Vec<Check>,
}

impl CheckOutcome {
    pub fn all_required_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed || !c.required)
    }
}

fn random_q(r: &mut impl Rng, q2_max: f64) -> Vec3 {
    Vec3::new(
        r.random_range(-std::f64::consts::PI..=std::f64::consts::PI),
        r.random_range(-q2_max..=q2_max),
        r.random_range(-1.0..=1.0),
    )
}

fn random_qdot(r: &mut impl Rng) -> Vec3 {
    Vec3::new(r.random_range(-2.0..=2.0), r.random_range(-2.0..=2.0), r.random_range(-2.0..=2.0))
}

/// Dynamics self-checks. Every sweep uses `check.samples` draws except the
/// symmetry sweep (ten times as many) and the 10 s energy run.
pub fn dynamics_checks(cfg: &Config) -> Vec<Check> {
    use std::f64::consts::PI;
    let p = cfg.robot;
    let n = cfg.check.samples;
    let payload_max = cfg.sim.payload.extra_mass;
    let mut r = rng::stream(cfg.seed, &[0xC4EC]);
    let mut checks = Vec::new();

    let mut sym = 0.0f64;
    for _ in 0..10 * n {
        let m = mass_matrix(&p, &random_q(&mut r, PI), r.random_range(0.0..=payload_max));
        sym = sym.max((m - m.transpose()).abs().max());
    }
    checks.push(Check { name: "mass symmetry", required: true, passed: sym == 0.0, worst: sym, note: "" });

    let pd_sweep = |r: &mut rng::StreamRng, q2_max: f64| {
        let mut fails = 0usize;
        for _ in 0..n {
            let q = random_q(r, q2_max);
            // include both payload extremes on every draw
            for load in [0.0, payload_max, r.random_range(0.0..=payload_max)] {
                if !is_positive_definite(&mass_matrix(&p, &q, load)) {
                    fails += 1;
                }
            }
        }
        fails
    };
    let fails = pd_sweep(&mut r, cfg.check.q2_envelope);
    checks.push(Check {
        name: "positive definite (q2 envelope)",
        required: true,
        passed: fails == 0,
        worst: fails as f64,
        note: "",
    });
    let fails = pd_sweep(&mut r, PI);
    checks.push(Check {
        name: "positive definite (full q2 range)",
        required: false,
        passed: fails == 0,
        worst: fails as f64,
        note: "M12 is kept with its printed sign; definiteness is lost near |q2| > 1.87..2.07 depending on payload",
    });

    for (mode, name, required, note) in [
        (CoriolisMode::Christoffel, "christoffel passivity", true, ""),
        (
            CoriolisMode::Paper,
            "paper passivity",
            false,
            "expected to fail: the printed C gives (Mdot - 2C)_11 = -2 h qdot2",
        ),
    ] {
        let mut worst = 0.0f64;
        for _ in 0..n {
            let s = JointState { q: random_q(&mut r, PI), qdot: random_qdot(&mut r) };
            worst = worst.max(passivity_residual(&p, &s, mode, 1e-5).abs());
        }
        checks.push(Check { name, required, passed: worst < 1e-8, worst, note });
    }

    let mut worst = 0.0f64;
    for _ in 0..n {
        let q = Vec3::new(r.random_range(-3.1..3.1), r.random_range(0.05..PI - 0.05), r.random_range(-0.5..0.5));
        match analytic_ik(&p, &forward_kinematics(&p, &q), ElbowBranch::Down) {
            Ok(back) => worst = worst.max((back - q).abs().max()),
            Err(_) => worst = f64::INFINITY,
        }
    }
    checks.push(Check { name: "fk/ik round trip", required: true, passed: worst < 1e-9, worst, note: "" });

    let plant = Plant {
        params: p,
        payload: cfg.sim.payload,
        coriolis: cfg.sim.coriolis,
        friction: true,
        disturbance: true,
    };
    let mut worst = 0.0f64;
    for _ in 0..n {
        let s = JointState { q: random_q(&mut r, cfg.check.q2_envelope), qdot: random_qdot(&mut r) };
        let tau = Vec3::new(r.random_range(-50.0..50.0), r.random_range(-50.0..50.0), r.random_range(-50.0..50.0));
        let t = r.random_range(0.0..6.0);
        worst = match forward_dynamics(&plant, &s, &tau, t) {
            Ok(a) => worst.max((plant.mass_at(&s.q, t) * a + plant.bias_force(&s, t) - tau).norm()),
            Err(_) => f64::INFINITY,
        };
    }
    checks.push(Check { name: "forward dynamics residual", required: true, passed: worst < 1e-10, worst, note: "" });

    let free = Plant::rigid(p, CoriolisMode::Christoffel);
    let mut s = JointState { q: Vec3::new(0.0, 1.0, 0.1), qdot: Vec3::new(0.5, 0.5, 0.0) };
    let e0 = total_energy(&p, &s, 0.0);
    let mut drift = 0.0f64;
    for i in 0..10_000 {
        match rk4_step(|t, st| forward_dynamics(&free, st, &Vec3::zeros(), t), &s, i as f64 * 1e-3, 1e-3) {
            Ok(next) => s = next,
            Err(_) => {
                drift = f64::INFINITY;
                break;
            }
        }
        drift = drift.max(((total_energy(&p, &s, 0.0) - e0) / e0).abs());
    }
    checks.push(Check { name: "energy conservation", required: true, passed: drift < 1e-6, worst: drift, note: "" });
    checks
}

pub fn check_dynamics(cfg: &Config, out: &Path) -> Result<CheckOutcome, CliError> {
    cfg.validate()?;
    let checks = dynamics_checks(cfg);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["property", "required", "status", "worst"]).expect("in-memory csv");
    for c in &checks {
        w.write_record([
            c.name.to_string(),
            c.required.to_string(),
            if c.passed { "PASS" } else { "FAIL" }.to_string(),
            formats::num(c.worst),
        ])
        .expect("in-memory csv");
    }
    let mut written = Vec::new();
    emit(out, "check_dynamics.csv", &w.into_inner().expect("in-memory csv"), &mut written)?;
    Ok(CheckOutcome {
        files: finish(out, "check-dynamics", cfg, written)?,
        checks,
    })
}
