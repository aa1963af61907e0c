//! Closed-loop tracking simulation and its metrics.

pub mod ik;
mod rk4;

pub use rk4::rk4_step;

use alloc::vec::Vec;

use crate::aco::{run_aco_centers, AcoConfig};
use crate::controller::{adapt_weights, control_law, desired_at, ControlState, ControllerConfig};
use crate::dynamics::{forward_dynamics, CoriolisMode, JointState, PayloadSchedule, Plant, RobotParams, Vec3};
use crate::{Error, Result};

/// Largest number of integration steps a single run may take.
pub const MAX_STEPS: f64 = 1e7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    pub t_end: f64,
    pub payload: PayloadSchedule,
    pub disturbance: bool,
    pub friction: bool,
    pub coriolis: CoriolisMode,
    pub rng_seed: u64,
    /// Length of the compensation-off run whose states seed the
    /// compensator centers.
    pub prerun: f64,
    /// Keep every `prerun_stride`-th pre-run sample as an ACO candidate.
    pub prerun_stride: usize,
    /// Colony settings for the compensator centers; `centers` and
    /// `rng_seed` are overridden by the controller's hidden count and
    /// `rng_seed` above.
    pub aco: AcoConfig,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 10.0,
            payload: PayloadSchedule::default(),
            disturbance: true,
            friction: true,
            coriolis: CoriolisMode::Paper,
            rng_seed: 0,
            prerun: 2.0,
            prerun_stride: 10,
            aco: AcoConfig::default(),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidConfig("dt must be > 0"));
        }
        if !(self.t_end >= self.dt) || !self.t_end.is_finite() {
            return Err(Error::InvalidConfig("t_end must be >= dt"));
        }
        if self.t_end / self.dt > MAX_STEPS {
            return Err(Error::InvalidConfig("t_end / dt exceeds the step guard"));
        }
        if !(self.prerun >= self.dt) || self.prerun_stride == 0 {
            return Err(Error::InvalidConfig("pre-run needs duration >= dt and stride >= 1"));
        }
        self.payload.validate()
    }

    pub fn steps(&self) -> usize {
        step_count(self.t_end, self.dt)
    }

    pub fn plant(&self, robot: RobotParams) -> Plant {
        Plant {
            params: robot,
            payload: self.payload,
            coriolis: self.coriolis,
            friction: self.friction,
            disturbance: self.disturbance,
        }
    }
}

fn step_count(t_end: f64, dt: f64) -> usize {
    libm::floor(t_end / dt + 1e-9) as usize
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub q_desired: Vec3,
    pub q: Vec3,
    pub e: Vec3,
    pub torque: Vec3,
    pub s: Vec3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub robot: RobotParams,
    pub controller: ControllerConfig,
    pub config: SimConfig,
    pub rows: Vec<TraceRow>,
    /// Set when integration stopped early; `rows` then holds the partial run.
    pub abort: Option<Error>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub window: (f64, f64),
    pub rms: [f64; 3],
    pub max_abs: [f64; 3],
    /// RMS over the final half of the trace.
    pub final_half_rms: [f64; 3],
}

fn window_stats(rows: &[TraceRow], from: f64, to: f64) -> Result<([f64; 3], [f64; 3])> {
    let tol = 1e-9 * (1.0 + to.abs());
    let mut sq = [0.0; 3];
    let mut max = [0.0f64; 3];
    let mut n = 0usize;
    for r in rows.iter().filter(|r| r.t >= from - tol && r.t <= to + tol) {
        n += 1;
        for j in 0..3 {
            sq[j] += r.e[j] * r.e[j];
            max[j] = max[j].max(r.e[j].abs());
        }
    }
    if n == 0 {
        return Err(Error::EmptyWindow);
    }
    Ok((sq.map(|v| libm::sqrt(v / n as f64)), max))
}

/// Per-joint RMS and peak tracking error over `t ∈ [from, to]`.
pub fn compute_metrics(trace: &SimTrace, window: (f64, f64)) -> Result<Metrics> {
    let (from, to) = window;
    if !(from < to) {
        return Err(Error::EmptyWindow);
    }
    let (rms, max_abs) = window_stats(&trace.rows, from, to)?;
    let last = trace.rows.last().ok_or(Error::EmptyWindow)?.t;
    let first = trace.rows[0].t;
    let (final_half_rms, _) = window_stats(&trace.rows, first + 0.5 * (last - first), last)?;
    Ok(Metrics {
        window,
        rms,
        max_abs,
        final_half_rms,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimRun {
    pub trace: SimTrace,
    /// Over the whole trace; `None` if the run aborted before any step.
    pub metrics: Option<Metrics>,
    /// Compensator after the run (when compensation was on).
    pub compensator: Option<ControlState>,
}

fn start_state() -> JointState {
    let d = desired_at(0.0);
    JointState { q: d.q, qdot: d.qdot }
}

/// Runs the loop without compensation for `cfg.prerun` seconds and returns
/// every `prerun_stride`-th compensator input vector.
pub fn collect_prerun_features(
    robot: &RobotParams,
    ctrl: &ControllerConfig,
    cfg: &SimConfig,
) -> Result<Vec<Vec<f64>>> {
    let plant = cfg.plant(*robot);
    let ctrl = ControllerConfig {
        compensation: false,
        ..*ctrl
    };
    let mut state = start_state();
    let mut features = Vec::new();
    let steps = step_count(cfg.prerun, cfg.dt);
    for i in 0..steps {
        let t = i as f64 * cfg.dt;
        let out = control_law(robot, &state, t, &ctrl, None, cfg.coriolis)?;
        if i % cfg.prerun_stride == 0 {
            features.push(out.features.to_vec());
        }
        state = rk4_step(|tt, st| forward_dynamics(&plant, st, &out.torque, tt), &state, t, cfg.dt)?;
    }
    Ok(features)
}

/// Offline phase: ACO picks compensator centers among pre-run samples.
pub fn initial_compensator(
    robot: &RobotParams,
    ctrl: &ControllerConfig,
    cfg: &SimConfig,
) -> Result<ControlState> {
    let samples = collect_prerun_features(robot, ctrl, cfg)?;
    let aco = AcoConfig {
        centers: ctrl.hidden_count,
        rng_seed: cfg.rng_seed,
        ..cfg.aco
    };
    let found = run_aco_centers(&samples, &aco)?;
    ControlState::from_centers(&found.centers, ctrl.adaptation_gain)
}

/// Fixed-step closed loop: control law, weight adaptation with the
/// realized `s`, then one RK4 step of the plant under zero-order-hold
/// torque. The trace holds `floor(t_end/dt) + 1` rows unless the plant
/// becomes singular, in which case the run stops and `trace.abort` is set.
pub fn run_simulation(robot: &RobotParams, ctrl: &ControllerConfig, cfg: &SimConfig) -> Result<SimRun> {
    robot.validate()?;
    ctrl.validate()?;
    cfg.validate()?;
    let mut cstate = if ctrl.compensation {
        Some(initial_compensator(robot, ctrl, cfg)?)
    } else {
        None
    };
    run_with_compensator(robot, ctrl, cfg, cstate.take())
}

/// Same loop as [`run_simulation`] with a caller-supplied compensator.
pub fn run_with_compensator(
    robot: &RobotParams,
    ctrl: &ControllerConfig,
    cfg: &SimConfig,
    mut cstate: Option<ControlState>,
) -> Result<SimRun> {
    let plant = cfg.plant(*robot);
    let steps = cfg.steps();
    let mut rows = Vec::with_capacity(steps + 1);
    let mut state = start_state();
    let mut abort = None;

    for i in 0..=steps {
        let t = i as f64 * cfg.dt;
        let out = control_law(robot, &state, t, ctrl, cstate.as_ref(), cfg.coriolis)?;
        rows.push(TraceRow {
            t,
            q_desired: out.desired.q,
            q: state.q,
            e: out.e,
            torque: out.torque,
            s: out.s,
        });
        if i == steps {
            break;
        }
        if ctrl.compensation {
            if let Some(c) = cstate.as_mut() {
                adapt_weights(c, &out.s, &out.features, cfg.dt)?;
            }
        }
        match rk4_step(|tt, st| forward_dynamics(&plant, st, &out.torque, tt), &state, t, cfg.dt) {
            Ok(next) => state = next,
            Err(e) => {
                abort = Some(e);
                break;
            }
        }
    }

    let mut trace = SimTrace {
        robot: *robot,
        controller: *ctrl,
        config: *cfg,
        rows,
        abort,
    };
    let metrics = match trace.rows.len() {
        0 | 1 => None,
        _ => {
            let span = (trace.rows[0].t, trace.rows[trace.rows.len() - 1].t);
            Some(compute_metrics(&trace, span)?)
        }
    };
    trace.rows.shrink_to_fit();
    Ok(SimRun {
        trace,
        metrics,
        compensator: cstate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::EstimateFactors;

    fn ideal() -> (RobotParams, ControllerConfig, SimConfig) {
        let robot = RobotParams {
            estimate: EstimateFactors::EXACT,
            ..RobotParams::default()
        };
        let ctrl = ControllerConfig {
            compensation: false,
            ..ControllerConfig::default()
        };
        let sim = SimConfig {
            payload: PayloadSchedule::NONE,
            disturbance: false,
            friction: false,
            ..SimConfig::default()
        };
        (robot, ctrl, sim)
    }

    #[test]
    fn single_step_has_two_rows() {
        let (robot, ctrl, sim) = ideal();
        let sim = SimConfig { t_end: 1e-3, ..sim };
        let run = run_simulation(&robot, &ctrl, &sim).unwrap();
        assert_eq!(run.trace.rows.len(), 2);
        assert_eq!(run.trace.rows[1].t, 1e-3);
    }

    #[test]
    fn row_count_matches_floor() {
        let (robot, ctrl, sim) = ideal();
        for (t_end, dt) in [(0.5, 1e-3), (0.1, 0.003), (0.25, 0.01)] {
            let sim = SimConfig { t_end, dt, ..sim };
            let run = run_simulation(&robot, &ctrl, &sim).unwrap();
            assert_eq!(run.trace.rows.len(), libm::floor(t_end / dt + 1e-9) as usize + 1);
            for w in run.trace.rows.windows(2) {
                assert!((w[1].t - w[0].t - dt).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ideal_model_tracks_closely() {
        let (robot, ctrl, sim) = ideal();
        let run = run_simulation(&robot, &ctrl, &sim).unwrap();
        let worst = run.trace.rows.iter().map(|r| r.e.amax()).fold(0.0, f64::max);
        assert!(worst < 1e-3, "max |e| = {worst}");
    }

    #[test]
    fn config_validation() {
        let (_, _, sim) = ideal();
        assert!(SimConfig { dt: 0.0, ..sim }.validate().is_err());
        assert!(SimConfig { t_end: 1e-4, ..sim }.validate().is_err());
        assert!(SimConfig { t_end: 1e5, dt: 1e-3, ..sim }.validate().is_err());
    }

    fn synthetic(dt: f64, t_end: f64, e: impl Fn(f64) -> Vec3) -> SimTrace {
        let (robot, controller, config) = ideal();
        let rows = (0..=step_count(t_end, dt))
            .map(|i| {
                let t = i as f64 * dt;
                TraceRow { t, q_desired: Vec3::zeros(), q: Vec3::zeros(), e: e(t), torque: Vec3::zeros(), s: Vec3::zeros() }
            })
            .collect();
        SimTrace { robot, controller, config, rows, abort: None }
    }

    #[test]
    fn metrics_examples() {
        let zero = synthetic(0.01, 1.0, |_| Vec3::zeros());
        let m = compute_metrics(&zero, (0.0, 1.0)).unwrap();
        assert_eq!(m.rms, [0.0; 3]);
        assert_eq!(m.max_abs, [0.0; 3]);

        let constant = synthetic(0.01, 1.0, |_| Vec3::new(0.1, 0.0, 0.0));
        let m = compute_metrics(&constant, (0.0, 1.0)).unwrap();
        assert!((m.rms[0] - 0.1).abs() < 1e-15);
        assert_eq!(m.max_abs[0], 0.1);

        let tau = core::f64::consts::TAU;
        let sine = synthetic(1e-3, 2.0 * tau, |t| Vec3::new(libm::sin(t), 0.0, 0.0));
        let m = compute_metrics(&sine, (0.0, 2.0 * tau)).unwrap();
        assert!((m.rms[0] - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-3);

        assert_eq!(compute_metrics(&zero, (2.0, 3.0)), Err(Error::EmptyWindow));
        assert_eq!(compute_metrics(&zero, (0.5, 0.5)), Err(Error::EmptyWindow));
    }
}
