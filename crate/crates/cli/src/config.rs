//! Flat `key=value` run configuration.
//!
//! Every tunable lives under a namespaced key (`robot.l1`, `aco.rho`,
//! `ctrl.k`, `sim.dt`, ...). [`Config::entries`] lists all of them with
//! their current values, which is what a manifest records; feeding such a
//! file back through [`Config::apply_text`] reproduces the run.

use std::fmt::Display;
use std::str::FromStr;

use acorbfn_core::aco::benchmark::BlobSpec;
use acorbfn_core::aco::AcoConfig;
use acorbfn_core::controller::{CompensatorInput, ControllerConfig};
use acorbfn_core::dynamics::{CoriolisMode, RobotParams, Vec3};
use acorbfn_core::rbfn::TrainConfig;
use acorbfn_core::sim::ik::IkConfig;
use acorbfn_core::sim::SimConfig;

use crate::error::CliError;

pub const SEED_ENV: &str = "ACORBFN_SEED";

/// Keys under this prefix describe a run rather than configure one; they
/// are skipped when a manifest is loaded as a config.
pub const RUN_PREFIX: &str = "run.";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareSettings {
    pub seeds: usize,
    pub centers: usize,
    pub kmeans_iters: usize,
    pub blobs: BlobSpec,
}

impl Default for CompareSettings {
    fn default() -> Self {
        Self {
            seeds: 20,
            centers: 5,
            kmeans_iters: 100,
            blobs: BlobSpec::REGRESSION,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckSettings {
    pub samples: usize,
    /// Largest `|q2|` of the envelope where definiteness is required.
    pub q2_envelope: f64,
}

impl Default for CheckSettings {
    fn default() -> Self {
        Self {
            samples: 1000,
            q2_envelope: 1.8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    pub seed: u64,
    pub robot: RobotParams,
    /// Colony settings shared by every workflow; the center count comes
    /// from the workflow (`ctrl.hidden`, `ik.centers`, `compare.centers`).
    pub aco: AcoConfig,
    pub ctrl: ControllerConfig,
    pub sim: SimConfig,
    /// Weight training used by `compare`.
    pub train: TrainConfig,
    pub ik: IkConfig,
    pub compare: CompareSettings,
    pub check: CheckSettings,
}

impl Default for Config {
    fn default() -> Self {
        let compare = acorbfn_core::aco::compare::CompareConfig::default();
        Self {
            seed: 0,
            robot: RobotParams::default(),
            aco: AcoConfig::default(),
            ctrl: ControllerConfig::default(),
            sim: SimConfig::default(),
            train: compare.train,
            ik: IkConfig::default(),
            compare: CompareSettings::default(),
            check: CheckSettings::default(),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("{key}: cannot parse {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value.trim() {
        "true" | "1" | "on" | "yes" => Ok(true),
        "false" | "0" | "off" | "no" => Ok(false),
        _ => Err(CliError::Config(format!("{key}: expected true/false, got {value:?}"))),
    }
}

fn parse_vec3(key: &str, value: &str) -> Result<Vec3, CliError> {
    let parts: Vec<&str> = value.split(',').collect();
    match parts.as_slice() {
        [v] => Ok(Vec3::repeat(parse(key, v)?)),
        [a, b, c] => Ok(Vec3::new(parse(key, a)?, parse(key, b)?, parse(key, c)?)),
        _ => Err(CliError::Config(format!("{key}: expected one or three comma-separated numbers"))),
    }
}

fn show_vec3(v: &Vec3) -> String {
    format!("{},{},{}", v[0], v[1], v[2])
}

fn show<T: Display>(v: T) -> String {
    v.to_string()
}

impl Config {
    /// Sets one key. Unknown keys and unparsable values are config errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let k = key.trim();
        match k {
            "seed" => self.seed = parse(k, value)?,

            "robot.l1" => self.robot.l1 = parse(k, value)?,
            "robot.l2" => self.robot.l2 = parse(k, value)?,
            "robot.l3" => self.robot.l3 = parse(k, value)?,
            "robot.m1" => self.robot.m1 = parse(k, value)?,
            "robot.m2" => self.robot.m2 = parse(k, value)?,
            "robot.m3" => self.robot.m3 = parse(k, value)?,
            "robot.g" => self.robot.g = parse(k, value)?,
            "robot.viscous" => self.robot.viscous = parse_vec3(k, value)?,
            "robot.coulomb" => self.robot.coulomb = parse_vec3(k, value)?,
            "robot.factors" => {
                let f = parse_vec3(k, value)?;
                self.robot.estimate.mass = f[0];
                self.robot.estimate.coriolis = f[1];
                self.robot.estimate.gravity = f[2];
            }

            "aco.ants" => self.aco.ant_count = parse(k, value)?,
            "aco.rho" => self.aco.evaporation = parse(k, value)?,
            "aco.q" => self.aco.deposit = parse(k, value)?,
            "aco.max_iter" => self.aco.max_iterations = parse(k, value)?,
            "aco.tau0" => self.aco.initial_pheromone = parse(k, value)?,

            "ctrl.lambda" => self.ctrl.lambda = parse_vec3(k, value)?,
            "ctrl.k" => self.ctrl.robust_gain = parse(k, value)?,
            "ctrl.eps" => self.ctrl.boundary_layer = parse(k, value)?,
            "ctrl.alpha" => self.ctrl.adaptation_gain = parse(k, value)?,
            "ctrl.hidden" => self.ctrl.hidden_count = parse(k, value)?,
            "ctrl.compensation" => self.ctrl.compensation = parse_bool(k, value)?,
            "ctrl.input" => {
                self.ctrl.input = match value.trim() {
                    "error" => CompensatorInput::TrackingError,
                    "state" => CompensatorInput::JointState,
                    _ => return Err(CliError::Config(format!("{k}: expected error or state"))),
                }
            }

            "sim.dt" => self.sim.dt = parse(k, value)?,
            "sim.t_end" => self.sim.t_end = parse(k, value)?,
            "sim.payload" => self.sim.payload.extra_mass = parse(k, value)?,
            "sim.payload_on" => self.sim.payload.t_on = parse(k, value)?,
            "sim.payload_off" => self.sim.payload.t_off = parse(k, value)?,
            "sim.disturbance" => self.sim.disturbance = parse_bool(k, value)?,
            "sim.friction" => self.sim.friction = parse_bool(k, value)?,
            "sim.coriolis" => {
                self.sim.coriolis = match value.trim() {
                    "paper" => CoriolisMode::Paper,
                    "christoffel" => CoriolisMode::Christoffel,
                    _ => return Err(CliError::Config(format!("{k}: expected paper or christoffel"))),
                }
            }
            "sim.prerun" => self.sim.prerun = parse(k, value)?,
            "sim.prerun_stride" => self.sim.prerun_stride = parse(k, value)?,

            "train.rate" => self.train.learning_rate = parse(k, value)?,
            "train.target" => self.train.error_target = parse(k, value)?,
            "train.max_epochs" => self.train.max_epochs = parse(k, value)?,

            "ik.train_points" => self.ik.train_points = parse(k, value)?,
            "ik.test_points" => self.ik.test_points = parse(k, value)?,
            "ik.centers" => self.ik.aco.centers = parse(k, value)?,
            "ik.rate" => self.ik.train.learning_rate = parse(k, value)?,
            "ik.target" => self.ik.train.error_target = parse(k, value)?,
            "ik.max_hidden" => self.ik.train.max_hidden = parse(k, value)?,
            "ik.max_epochs" => self.ik.train.max_epochs = parse(k, value)?,

            "compare.seeds" => self.compare.seeds = parse(k, value)?,
            "compare.centers" => self.compare.centers = parse(k, value)?,
            "compare.kmeans_iters" => self.compare.kmeans_iters = parse(k, value)?,
            "compare.points" => self.compare.blobs.points = parse(k, value)?,
            "compare.blobs" => self.compare.blobs.blobs = parse(k, value)?,
            "compare.dim" => self.compare.blobs.dim = parse(k, value)?,
            "compare.sigma" => self.compare.blobs.sigma = parse(k, value)?,
            "compare.separation" => self.compare.blobs.min_separation = parse(k, value)?,
            "compare.data_seed" => self.compare.blobs.seed = parse(k, value)?,

            "check.samples" => self.check.samples = parse(k, value)?,
            "check.q2_envelope" => self.check.q2_envelope = parse(k, value)?,

            _ => return Err(CliError::Config(format!("unknown key {k:?}"))),
        }
        Ok(())
    }

    /// Every key with its current value, in a fixed order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let r = &self.robot;
        let f = r.estimate;
        vec![
            ("seed", show(self.seed)),
            ("robot.l1", show(r.l1)),
            ("robot.l2", show(r.l2)),
            ("robot.l3", show(r.l3)),
            ("robot.m1", show(r.m1)),
            ("robot.m2", show(r.m2)),
            ("robot.m3", show(r.m3)),
            ("robot.g", show(r.g)),
            ("robot.viscous", show_vec3(&r.viscous)),
            ("robot.coulomb", show_vec3(&r.coulomb)),
            ("robot.factors", format!("{},{},{}", f.mass, f.coriolis, f.gravity)),
            ("aco.ants", show(self.aco.ant_count)),
            ("aco.rho", show(self.aco.evaporation)),
            ("aco.q", show(self.aco.deposit)),
            ("aco.max_iter", show(self.aco.max_iterations)),
            ("aco.tau0", show(self.aco.initial_pheromone)),
            ("ctrl.lambda", show_vec3(&self.ctrl.lambda)),
            ("ctrl.k", show(self.ctrl.robust_gain)),
            ("ctrl.eps", show(self.ctrl.boundary_layer)),
            ("ctrl.alpha", show(self.ctrl.adaptation_gain)),
            ("ctrl.hidden", show(self.ctrl.hidden_count)),
            ("ctrl.compensation", show(self.ctrl.compensation)),
            (
                "ctrl.input",
                match self.ctrl.input {
                    CompensatorInput::TrackingError => "error",
                    CompensatorInput::JointState => "state",
                }
                .into(),
            ),
            ("sim.dt", show(self.sim.dt)),
            ("sim.t_end", show(self.sim.t_end)),
            ("sim.payload", show(self.sim.payload.extra_mass)),
            ("sim.payload_on", show(self.sim.payload.t_on)),
            ("sim.payload_off", show(self.sim.payload.t_off)),
            ("sim.disturbance", show(self.sim.disturbance)),
            ("sim.friction", show(self.sim.friction)),
            (
                "sim.coriolis",
                match self.sim.coriolis {
                    CoriolisMode::Paper => "paper",
                    CoriolisMode::Christoffel => "christoffel",
                }
                .into(),
            ),
            ("sim.prerun", show(self.sim.prerun)),
            ("sim.prerun_stride", show(self.sim.prerun_stride)),
            ("train.rate", show(self.train.learning_rate)),
            ("train.target", show(self.train.error_target)),
            ("train.max_epochs", show(self.train.max_epochs)),
            ("ik.train_points", show(self.ik.train_points)),
            ("ik.test_points", show(self.ik.test_points)),
            ("ik.centers", show(self.ik.aco.centers)),
            ("ik.rate", show(self.ik.train.learning_rate)),
            ("ik.target", show(self.ik.train.error_target)),
            ("ik.max_hidden", show(self.ik.train.max_hidden)),
            ("ik.max_epochs", show(self.ik.train.max_epochs)),
            ("compare.seeds", show(self.compare.seeds)),
            ("compare.centers", show(self.compare.centers)),
            ("compare.kmeans_iters", show(self.compare.kmeans_iters)),
            ("compare.points", show(self.compare.blobs.points)),
            ("compare.blobs", show(self.compare.blobs.blobs)),
            ("compare.dim", show(self.compare.blobs.dim)),
            ("compare.sigma", show(self.compare.blobs.sigma)),
            ("compare.separation", show(self.compare.blobs.min_separation)),
            ("compare.data_seed", show(self.compare.blobs.seed)),
            ("check.samples", show(self.check.samples)),
            ("check.q2_envelope", show(self.check.q2_envelope)),
        ]
    }

    /// Default value of `key` as text, for help output.
    pub fn default_of(key: &str) -> String {
        Config::default()
            .entries()
            .into_iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| v)
            .unwrap_or_default()
    }

    /// Applies `key=value` lines. Blank lines and `#` comments are skipped,
    /// as are `run.*` keys so manifests can be fed back in.
    /// Returns whether a `seed` line was present.
    pub fn apply_text(&mut self, text: &str) -> Result<bool, CliError> {
        let mut saw_seed = false;
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key=value", n + 1)))?;
            let key = key.trim();
            if key.starts_with(RUN_PREFIX) {
                continue;
            }
            saw_seed |= key == "seed";
            self.set(key, value)?;
        }
        Ok(saw_seed)
    }

    /// Config for the tracking simulation; seeds follow the run seed.
    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            rng_seed: self.seed,
            aco: self.aco,
            ..self.sim
        }
    }

    pub fn ik_config(&self) -> IkConfig {
        IkConfig {
            rng_seed: self.seed,
            aco: AcoConfig {
                centers: self.ik.aco.centers,
                ..self.aco
            },
            ..self.ik
        }
    }

    pub fn compare_config(&self) -> acorbfn_core::aco::compare::CompareConfig {
        acorbfn_core::aco::compare::CompareConfig {
            aco: AcoConfig {
                centers: self.compare.centers,
                ..self.aco
            },
            train: TrainConfig {
                max_hidden: self.compare.centers,
                ..self.train
            },
            kmeans_max_iters: self.compare.kmeans_iters,
            seeds: self.compare.seeds,
            base_seed: self.seed,
        }
    }

    /// Checks everything the workflows will need up front, so a bad value
    /// fails before any output is written.
    pub fn validate(&self) -> Result<(), CliError> {
        let core = |e: acorbfn_core::Error| CliError::Config(e.to_string());
        self.robot.validate().map_err(core)?;
        self.ctrl.validate().map_err(core)?;
        self.sim.validate().map_err(core)?;
        self.aco
            .validate(usize::MAX)
            .map_err(core)?;
        self.train.validate().map_err(core)?;
        self.ik.train.validate().map_err(core)?;
        if self.ik.aco.centers == 0 {
            return Err(CliError::Config("ik.centers must be >= 1".into()));
        }
        if self.ik.aco.centers > self.ik.train_points {
            return Err(CliError::Config("ik.centers exceeds ik.train_points".into()));
        }
        if self.ik.train_points == 0 || self.ik.test_points == 0 {
            return Err(CliError::Config("ik point counts must be >= 1".into()));
        }
        if self.compare.seeds == 0 || self.compare.centers == 0 {
            return Err(CliError::Config("compare.seeds and compare.centers must be >= 1".into()));
        }
        if self.compare.centers > self.compare.blobs.points {
            return Err(CliError::Config("compare.centers exceeds compare.points".into()));
        }
        if self.check.samples == 0 || !(self.check.q2_envelope > 0.0) {
            return Err(CliError::Config("check.samples and check.q2_envelope must be positive".into()));
        }
        Ok(())
    }
}

/// Seed from the environment, used only when neither a flag nor the config
/// file names one.
pub fn env_seed() -> Result<Option<u64>, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => parse(SEED_ENV, &v).map(Some),
        Err(_) => Ok(None),
    }
}
