//! Learning the SCARA inverse kinematics with an ACO-seeded RBF network.
//!
//! Joint configurations are sampled on the elbow-down branch and mapped
//! through forward kinematics, so every target is reachable and the inverse
//! is single-valued. Centers come from the colony over the Cartesian
//! inputs, widths from the spread rule, weights from LMS.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;

use crate::aco::{run_aco_centers, AcoConfig, AcoOutcome};
use crate::dynamics::{analytic_ik, forward_kinematics, ElbowBranch, RobotParams, Vec3};
use crate::rbfn::{train_lms, RbfNetwork, TrainConfig, TrainReport};
use crate::{rng, Error, Result};

/// Joint sampling box: `q1 ∈ [-π, π]`, `q2 ∈ [0.1, π − 0.1]`, `q3 ∈ [0, 0.6]`.
pub const Q2_MARGIN: f64 = 0.1;
pub const Q3_RANGE: (f64, f64) = (0.0, 0.6);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IkConfig {
    pub train_points: usize,
    pub test_points: usize,
    pub aco: AcoConfig,
    pub train: TrainConfig,
    pub rng_seed: u64,
}

impl Default for IkConfig {
    fn default() -> Self {
        Self {
            train_points: 1000,
            test_points: 200,
            aco: AcoConfig {
                centers: 40,
                ..AcoConfig::default()
            },
            train: TrainConfig {
                // overlapping grown units bound how large the step can be
                learning_rate: 0.05,
                error_target: 1.0,
                max_hidden: 200,
                max_epochs: 1000,
                rng_seed: 0,
            },
            rng_seed: 0,
        }
    }
}

/// A Cartesian position and the joint vector that reaches it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IkSample {
    pub position: Vec3,
    pub joints: Vec3,
}

pub fn sample_workspace<R: Rng + ?Sized>(robot: &RobotParams, n: usize, rng: &mut R) -> Vec<IkSample> {
    (0..n)
        .map(|_| {
            let q = Vec3::new(
                rng.random_range(-PI..=PI),
                rng.random_range(Q2_MARGIN..=PI - Q2_MARGIN),
                rng.random_range(Q3_RANGE.0..=Q3_RANGE.1),
            );
            IkSample {
                position: forward_kinematics(robot, &q),
                joints: q,
            }
        })
        .collect()
}

/// Anything that maps a Cartesian position to joint coordinates.
pub trait IkSolver {
    fn solve(&self, position: &Vec3) -> Result<Vec3>;
}

impl IkSolver for RbfNetwork {
    fn solve(&self, position: &Vec3) -> Result<Vec3> {
        let y = self.forward(position.as_slice())?;
        if y.len() != 3 {
            return Err(Error::DimensionMismatch { expected: 3, found: y.len() });
        }
        Ok(Vec3::new(y[0], y[1], y[2]))
    }
}

/// Closed-form elbow-down solver; the harness reference.
pub struct AnalyticSolver(pub RobotParams);

impl IkSolver for AnalyticSolver {
    fn solve(&self, position: &Vec3) -> Result<Vec3> {
        analytic_ik(&self.0, position, ElbowBranch::Down)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IkEvaluation {
    pub sample: IkSample,
    pub predicted: Vec3,
    /// `‖q̂ − q‖`
    pub joint_error: f64,
    /// `‖FK(q̂) − p‖`
    pub cartesian_error: f64,
}

pub fn evaluate<S: IkSolver + ?Sized>(robot: &RobotParams, solver: &S, samples: &[IkSample]) -> Result<Vec<IkEvaluation>> {
    samples
        .iter()
        .map(|s| {
            let predicted = solver.solve(&s.position)?;
            Ok(IkEvaluation {
                sample: *s,
                predicted,
                joint_error: (predicted - s.joints).norm(),
                cartesian_error: (forward_kinematics(robot, &predicted) - s.position).norm(),
            })
        })
        .collect()
}

pub fn mean_errors(evals: &[IkEvaluation]) -> (f64, f64) {
    let n = evals.len().max(1) as f64;
    (
        evals.iter().map(|e| e.joint_error).sum::<f64>() / n,
        evals.iter().map(|e| e.cartesian_error).sum::<f64>() / n,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct IkReport {
    pub network: RbfNetwork,
    pub colony: AcoOutcome,
    pub training: TrainReport,
    pub test: Vec<IkEvaluation>,
    pub mean_joint_error: f64,
    pub mean_cartesian_error: f64,
}

/// Two-phase training on sampled `(FK(q) → q)` pairs, scored on a disjoint
/// held-out sample.
pub fn run_ik_experiment(robot: &RobotParams, cfg: &IkConfig) -> Result<IkReport> {
    robot.validate()?;
    if cfg.train_points == 0 || cfg.test_points == 0 {
        return Err(Error::InvalidConfig("train and test sets must be non-empty"));
    }
    let train = sample_workspace(robot, cfg.train_points, &mut rng::stream(cfg.rng_seed, &[1]));
    let test = sample_workspace(robot, cfg.test_points, &mut rng::stream(cfg.rng_seed, &[2]));
    let inputs: Vec<Vec<f64>> = train.iter().map(|s| s.position.as_slice().to_vec()).collect();
    let targets: Vec<Vec<f64>> = train.iter().map(|s| s.joints.as_slice().to_vec()).collect();

    let aco = AcoConfig {
        rng_seed: cfg.rng_seed,
        ..cfg.aco
    };
    let colony = run_aco_centers(&inputs, &aco)?;
    let initial = RbfNetwork::with_spread_widths(3, &colony.centers)?;
    let train_cfg = TrainConfig {
        rng_seed: cfg.rng_seed,
        max_hidden: cfg.train.max_hidden.max(colony.centers.len()),
        ..cfg.train
    };
    let (network, training) = train_lms(&initial, &inputs, &targets, &train_cfg)?;
    let evals = evaluate(robot, &network, &test)?;
    let (mean_joint_error, mean_cartesian_error) = mean_errors(&evals);
    Ok(IkReport {
        network,
        colony,
        training,
        test: evals,
        mean_joint_error,
        mean_cartesian_error,
    })
}
