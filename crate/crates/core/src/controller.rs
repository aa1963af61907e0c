//! Tracking controller: computed torque on the scaled model estimates, an
//! online-adapted RBFN compensator for whatever the estimates miss, and a
//! boundary-layer sliding term.
//!
//! With `e = q − q_d` and `s = ė + Λe`:
//!
//! ```text
//! τ = M̂(q)(q̈_d − Λė) + Ĉ(q, q̇)(q̇_d − Λe) + Ĝ + u_rbf − k·sat(s/ε)
//! ```
//!
//! `M̂, Ĉ, Ĝ` are the nominal matrices scaled by the estimate factors; they
//! never include the payload, friction or disturbance.

use alloc::vec::Vec;

use crate::dynamics::{coriolis_matrix, gravity_vector, mass_matrix, CoriolisMode, JointState, RobotParams, Vec3};
use crate::rbfn::RbfNetwork;
use crate::{Error, Result};

/// Signals fed to the compensator network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CompensatorInput {
    /// `(e, ė)`
    #[default]
    TrackingError,
    /// `(q, q̇)`
    JointState,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerConfig {
    /// Diagonal of Λ (1/s).
    pub lambda: Vec3,
    pub robust_gain: f64,
    pub boundary_layer: f64,
    pub adaptation_gain: f64,
    pub hidden_count: usize,
    pub compensation: bool,
    pub input: CompensatorInput,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            lambda: Vec3::repeat(5.0),
            robust_gain: 15.0,
            boundary_layer: 0.05,
            adaptation_gain: 0.5,
            hidden_count: 15,
            compensation: true,
            input: CompensatorInput::TrackingError,
        }
    }
}

impl ControllerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lambda.iter().any(|l| !(*l > 0.0)) {
            return Err(Error::InvalidConfig("lambda entries must be > 0"));
        }
        if !(self.boundary_layer > 0.0) {
            return Err(Error::InvalidConfig("boundary layer must be > 0"));
        }
        if !(self.robust_gain >= 0.0) {
            return Err(Error::InvalidConfig("robust gain must be >= 0"));
        }
        if !(self.adaptation_gain > 0.0) {
            return Err(Error::InvalidConfig("adaptation gain must be > 0"));
        }
        if self.hidden_count == 0 {
            return Err(Error::InvalidConfig("compensator needs at least one hidden unit"));
        }
        Ok(())
    }
}

/// Desired joint position, velocity and acceleration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Desired {
    pub q: Vec3,
    pub qdot: Vec3,
    pub qddot: Vec3,
}

/// Reference trajectory for the three joints, with analytic derivatives.
pub fn desired_at(t: f64) -> Desired {
    use libm::{cos, sin};
    Desired {
        q: Vec3::new(
            1.0 + 0.1 * (sin(t) + sin(2.0 * t)),
            1.0 + 0.1 * (cos(2.0 * t) + cos(3.0 * t)),
            1.0 + 0.1 * (sin(3.0 * t) + sin(4.0 * t)),
        ),
        qdot: Vec3::new(
            0.1 * (cos(t) + 2.0 * cos(2.0 * t)),
            -0.1 * (2.0 * sin(2.0 * t) + 3.0 * sin(3.0 * t)),
            0.1 * (3.0 * cos(3.0 * t) + 4.0 * cos(4.0 * t)),
        ),
        qddot: Vec3::new(
            -0.1 * (sin(t) + 4.0 * sin(2.0 * t)),
            -0.1 * (4.0 * cos(2.0 * t) + 9.0 * cos(3.0 * t)),
            -0.1 * (9.0 * sin(3.0 * t) + 16.0 * sin(4.0 * t)),
        ),
    }
}

pub fn sliding_surface(e: &Vec3, edot: &Vec3, lambda: &Vec3) -> Vec3 {
    edot + lambda.component_mul(e)
}

/// `−k·sat(s/ε)` with `sat` clamping to `[-1, 1]`.
pub fn robust_term(s: &Vec3, gain: f64, boundary_layer: f64) -> Vec3 {
    s.map(|v| -gain * (v / boundary_layer).clamp(-1.0, 1.0))
}

/// Online part of the controller.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlState {
    /// 6 inputs, 3 torque outputs.
    pub compensator: RbfNetwork,
    pub adaptation_gain: f64,
}

impl ControlState {
    pub fn new(compensator: RbfNetwork, adaptation_gain: f64) -> Result<Self> {
        if compensator.input_dim() != 6 || compensator.output_dim() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 6 * 3,
                found: compensator.input_dim() * compensator.output_dim(),
            });
        }
        Ok(Self {
            compensator,
            adaptation_gain,
        })
    }

    /// Zero-weight compensator with spread-rule widths over `centers`.
    pub fn from_centers(centers: &[Vec<f64>], adaptation_gain: f64) -> Result<Self> {
        Self::new(RbfNetwork::with_spread_widths(3, centers)?, adaptation_gain)
    }
}

/// Everything the control law computed at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlOutput {
    pub torque: Vec3,
    pub desired: Desired,
    pub e: Vec3,
    pub edot: Vec3,
    pub s: Vec3,
    /// Input vector presented to the compensator.
    pub features: [f64; 6],
}

pub fn compensator_features(input: CompensatorInput, state: &JointState, e: &Vec3, edot: &Vec3) -> [f64; 6] {
    let (a, b) = match input {
        CompensatorInput::TrackingError => (e, edot),
        CompensatorInput::JointState => (&state.q, &state.qdot),
    };
    [a[0], a[1], a[2], b[0], b[1], b[2]]
}

/// Evaluates the control law at time `t`. `cstate` is only read when
/// compensation is enabled.
pub fn control_law(
    params: &RobotParams,
    state: &JointState,
    t: f64,
    cfg: &ControllerConfig,
    cstate: Option<&ControlState>,
    mode: CoriolisMode,
) -> Result<ControlOutput> {
    let desired = desired_at(t);
    let e = state.q - desired.q;
    let edot = state.qdot - desired.qdot;
    let s = sliding_surface(&e, &edot, &cfg.lambda);
    let f = params.estimate;

    let m_hat = mass_matrix(params, &state.q, 0.0) * f.mass;
    let c_hat = coriolis_matrix(params, &state.q, &state.qdot, mode) * f.coriolis;
    let g_hat = gravity_vector(params, 0.0) * f.gravity;
    let qddot_ref = desired.qddot - cfg.lambda.component_mul(&edot);
    let qdot_ref = desired.qdot - cfg.lambda.component_mul(&e);

    let features = compensator_features(cfg.input, state, &e, &edot);
    let mut torque = m_hat * qddot_ref + c_hat * qdot_ref + g_hat
        + robust_term(&s, cfg.robust_gain, cfg.boundary_layer);
    if cfg.compensation {
        if let Some(c) = cstate {
            let u = c.compensator.forward(&features)?;
            torque += Vec3::new(u[0], u[1], u[2]);
        }
    }
    Ok(ControlOutput {
        torque,
        desired,
        e,
        edot,
        s,
        features,
    })
}

/// `w_ji ← w_ji − α s_j φ_i(x) dt`; centers and widths stay fixed.
pub fn adapt_weights(cstate: &mut ControlState, s: &Vec3, x: &[f64], dt: f64) -> Result<()> {
    if !(dt > 0.0) {
        return Err(Error::InvalidConfig("adaptation step must be > 0"));
    }
    let phi = cstate.compensator.activations(x)?;
    let step = cstate.adaptation_gain * dt;
    for (column, p) in cstate.compensator.weights_mut().chunks_exact_mut(3).zip(&phi) {
        for (w, sj) in column.iter_mut().zip(s.iter()) {
            *w -= step * sj * p;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn trajectory_at_zero() {
        let d = desired_at(0.0);
        assert!((d.q - Vec3::new(1.0, 1.2, 1.0)).norm() < 1e-15);
        assert!((d.qdot - Vec3::new(0.3, 0.0, 0.7)).norm() < 1e-15);
    }

    #[test]
    fn surface_examples() {
        let l = Vec3::repeat(1.0);
        assert_eq!(sliding_surface(&Vec3::zeros(), &Vec3::zeros(), &l), Vec3::zeros());
        assert_eq!(sliding_surface(&Vec3::new(1.0, 0.0, 0.0), &Vec3::zeros(), &l), Vec3::new(1.0, 0.0, 0.0));
        let s = sliding_surface(&Vec3::new(0.0, 1.0, 0.0), &Vec3::new(0.0, -2.0, 0.0), &Vec3::repeat(2.0));
        assert_eq!(s, Vec3::zeros());
    }

    #[test]
    fn perfect_tracking_is_pure_feedforward() {
        let p = RobotParams::default();
        let cfg = ControllerConfig { compensation: false, ..Default::default() };
        let t = 0.37;
        let d = desired_at(t);
        let state = JointState::new(d.q, d.qdot).unwrap();
        let out = control_law(&p, &state, t, &cfg, None, CoriolisMode::Paper).unwrap();
        let f = p.estimate;
        let expected = mass_matrix(&p, &d.q, 0.0) * f.mass * d.qddot
            + coriolis_matrix(&p, &d.q, &d.qdot, CoriolisMode::Paper) * f.coriolis * d.qdot
            + gravity_vector(&p, 0.0) * f.gravity;
        assert!((out.torque - expected).norm() < 1e-12);
        assert!(out.s.norm() < 1e-15);
    }

    #[test]
    fn robust_term_regions() {
        let r = robust_term(&Vec3::new(0.2, -0.07, 5.0), 15.0, 0.05);
        assert_eq!(r, Vec3::new(-15.0, 15.0, -15.0));
        let r = robust_term(&Vec3::new(0.01, -0.02, 0.0), 15.0, 0.05);
        assert!((r - Vec3::new(-3.0, 6.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn adaptation_examples() {
        let net = RbfNetwork::new(3, &[vec![0.0; 6]], vec![1.0]).unwrap();
        let mut c = ControlState::new(net, 0.5).unwrap();
        let before = c.clone();
        adapt_weights(&mut c, &Vec3::zeros(), &[0.0; 6], 1e-3).unwrap();
        assert_eq!(c, before);
        adapt_weights(&mut c, &Vec3::new(1.0, 0.0, 0.0), &[0.0; 6], 1e-3).unwrap();
        assert!((c.compensator.weight(0, 0) + 5e-4).abs() < 1e-15);
        assert_eq!(c.compensator.weight(1, 0), 0.0);
        assert!(adapt_weights(&mut c, &Vec3::zeros(), &[0.0; 6], 0.0).is_err());
    }

    #[test]
    fn compensator_shape_is_checked() {
        let net = RbfNetwork::new(2, &[vec![0.0; 6]], vec![1.0]).unwrap();
        assert!(ControlState::new(net, 0.5).is_err());
    }
}
