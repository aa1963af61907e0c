//! Rigid-body model of the three-link SCARA arm (two revolute joints in the
//! horizontal plane, one vertical prismatic joint).
//!
//! The inertia, Coriolis and gravity terms follow the printed closed forms,
//! including the nonstandard minus sign in `M12`. Velocity factors in the
//! Coriolis entries and the friction argument are joint velocities.

use nalgebra::{Cholesky, Matrix3, Vector3};

use crate::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Condition number (1-norm) above which the mass matrix counts as singular.
pub const MAX_MASS_CONDITION: f64 = 1e12;

/// Scalars applied to the true `M`, `C`, `G` to form the controller's model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateFactors {
    pub mass: f64,
    pub coriolis: f64,
    pub gravity: f64,
}

impl Default for EstimateFactors {
    fn default() -> Self {
        Self {
            mass: 0.9,
            coriolis: 0.8,
            gravity: 0.85,
        }
    }
}

impl EstimateFactors {
    pub const EXACT: Self = Self {
        mass: 1.0,
        coriolis: 1.0,
        gravity: 1.0,
    };
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotParams {
    pub l1: f64,
    pub l2: f64,
    /// Carried for completeness; the vertical joint's length does not enter
    /// the model.
    pub l3: f64,
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub g: f64,
    /// Viscous friction per joint, N·m·s/rad (N·s/m for the prismatic joint).
    pub viscous: Vec3,
    /// Coulomb friction level per joint.
    pub coulomb: Vec3,
    pub estimate: EstimateFactors,
}

impl Default for RobotParams {
    fn default() -> Self {
        Self {
            l1: 1.0,
            l2: 0.8,
            l3: 0.6,
            m1: 1.0,
            m2: 0.8,
            m3: 0.5,
            g: 9.8,
            viscous: Vec3::repeat(12.0),
            coulomb: Vec3::repeat(0.2),
            estimate: EstimateFactors::default(),
        }
    }
}

impl RobotParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.l1, self.l2, self.l3, self.m1, self.m2, self.m3];
        if positive.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidConfig("link lengths and masses must be > 0"));
        }
        if !self.g.is_finite() {
            return Err(Error::InvalidConfig("gravity must be finite"));
        }
        let f = self.estimate;
        if [f.mass, f.coriolis, f.gravity]
            .iter()
            .any(|v| !(*v > 0.0 && *v <= 1.0))
        {
            return Err(Error::InvalidConfig("estimate factors must lie in (0, 1]"));
        }
        Ok(())
    }

    /// Same arm with `extra` kilograms rigidly attached to the last link.
    pub fn with_extra_mass(&self, extra: f64) -> Self {
        Self {
            m3: self.m3 + extra,
            ..*self
        }
    }

    /// Maximum planar reach `l1 + l2`.
    pub fn reach(&self) -> f64 {
        self.l1 + self.l2
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointState {
    /// (rad, rad, m)
    pub q: Vec3,
    pub qdot: Vec3,
}

impl JointState {
    pub fn new(q: Vec3, qdot: Vec3) -> Result<Self> {
        if q.iter().chain(qdot.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("joint state must be finite"));
        }
        Ok(Self { q, qdot })
    }

    pub fn at_rest(q: Vec3) -> Self {
        Self {
            q,
            qdot: Vec3::zeros(),
        }
    }
}

/// Unknown load carried by the end effector over a time window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PayloadSchedule {
    pub extra_mass: f64,
    pub t_on: f64,
    pub t_off: f64,
}

impl Default for PayloadSchedule {
    fn default() -> Self {
        Self {
            extra_mass: 10.0,
            t_on: 1.0,
            t_off: 4.0,
        }
    }
}

impl PayloadSchedule {
    pub const NONE: Self = Self {
        extra_mass: 0.0,
        t_on: 0.0,
        t_off: f64::INFINITY,
    };

    pub fn validate(&self) -> Result<()> {
        if !(self.extra_mass >= 0.0) || !self.extra_mass.is_finite() {
            return Err(Error::InvalidConfig("payload mass must be >= 0"));
        }
        if !(self.t_on < self.t_off) {
            return Err(Error::InvalidConfig("payload window needs t_on < t_off"));
        }
        Ok(())
    }

    /// Mass attached at time `t` (the window is closed on both ends).
    pub fn mass_at(&self, t: f64) -> f64 {
        if t >= self.t_on && t <= self.t_off {
            self.extra_mass
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoriolisMode {
    /// Entries as printed for the SCARA model.
    #[default]
    Paper,
    /// Built from Christoffel symbols of `M(q)`; satisfies passivity.
    Christoffel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElbowBranch {
    /// `q2 ∈ [-π, 0]`
    Up,
    /// `q2 ∈ [0, π]`
    Down,
}

// Lumped inertia constants shared by M and its derivative.
struct Inertia {
    a: f64,
    b: f64,
    h: f64,
    c: f64,
}

impl Inertia {
    fn of(p: &RobotParams, payload: f64) -> Self {
        let m3 = p.m3 + payload;
        Self {
            a: p.l1 * p.l1 * (p.m1 / 3.0 + p.m2 + m3),
            b: p.l1 * p.l2 * (p.m2 + 2.0 * m3),
            h: p.l1 * p.l2 * (p.m2 / 2.0 + m3),
            c: p.l2 * p.l2 * (p.m2 / 3.0 + m3),
        }
    }
}

/// Inertia matrix `M(q)`; `payload_mass` is added to the last link.
pub fn mass_matrix(params: &RobotParams, q: &Vec3, payload_mass: f64) -> Mat3 {
    let k = Inertia::of(params, payload_mass);
    let cos2 = libm::cos(q[1]);
    let m11 = k.a + k.b * cos2 + k.c;
    let m12 = k.h * cos2 - k.c;
    let m22 = k.c;
    let m33 = params.m3 + payload_mass;
    Mat3::new(m11, m12, 0.0, m12, m22, 0.0, 0.0, 0.0, m33)
}

/// `∂M/∂q2`, the only nonzero partial derivative of the inertia matrix.
pub fn mass_matrix_dq2(params: &RobotParams, q: &Vec3, payload_mass: f64) -> Mat3 {
    let k = Inertia::of(params, payload_mass);
    let sin2 = libm::sin(q[1]);
    let d11 = -k.b * sin2;
    let d12 = -k.h * sin2;
    Mat3::new(d11, d12, 0.0, d12, 0.0, 0.0, 0.0, 0.0, 0.0)
}

fn coriolis_with_payload(
    params: &RobotParams,
    q: &Vec3,
    qdot: &Vec3,
    mode: CoriolisMode,
    payload_mass: f64,
) -> Mat3 {
    match mode {
        CoriolisMode::Paper => {
            let m3 = params.m3 + payload_mass;
            let c1 = params.l1 * params.l2 * libm::sin(q[1]);
            let c11 = -qdot[1] * c1 * (params.m2 + 2.0 * m3);
            let c12 = -qdot[1] * c1 * (params.m2 / 2.0 + m3);
            Mat3::new(c11, c12, 0.0, c12, 0.0, 0.0, 0.0, 0.0, 0.0)
        }
        CoriolisMode::Christoffel => {
            // C[k][j] = Σ_i ½(∂_i M_kj + ∂_j M_ki − ∂_k M_ij) q̇_i
            let d2 = mass_matrix_dq2(params, q, payload_mass);
            let dm = |i: usize, r: usize, c: usize| if i == 1 { d2[(r, c)] } else { 0.0 };
            Mat3::from_fn(|k, j| {
                (0..3)
                    .map(|i| 0.5 * (dm(i, k, j) + dm(j, k, i) - dm(k, i, j)) * qdot[i])
                    .sum()
            })
        }
    }
}

/// Coriolis/centripetal matrix `C(q, q̇)` of the unloaded arm.
pub fn coriolis_matrix(params: &RobotParams, q: &Vec3, qdot: &Vec3, mode: CoriolisMode) -> Mat3 {
    coriolis_with_payload(params, q, qdot, mode, 0.0)
}

pub fn gravity_vector(params: &RobotParams, payload_mass: f64) -> Vec3 {
    Vec3::new(0.0, 0.0, -(params.m3 + payload_mass) * params.g)
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Viscous plus Coulomb friction, with `sign(0) = 0`.
pub fn friction_force(params: &RobotParams, qdot: &Vec3) -> Vec3 {
    Vec3::from_fn(|i, _| params.viscous[i] * qdot[i] + params.coulomb[i] * sign(qdot[i]))
}

/// External disturbance torque, identical on all three joints.
pub fn disturbance(t: f64) -> Vec3 {
    Vec3::repeat(5.0 * libm::sin(2.0 * t))
}

/// The simulated arm: nominal parameters plus which unmodeled effects are on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plant {
    pub params: RobotParams,
    pub payload: PayloadSchedule,
    pub coriolis: CoriolisMode,
    pub friction: bool,
    pub disturbance: bool,
}

impl Plant {
    /// Bare rigid body: no payload, friction or disturbance.
    pub fn rigid(params: RobotParams, coriolis: CoriolisMode) -> Self {
        Self {
            params,
            payload: PayloadSchedule::NONE,
            coriolis,
            friction: false,
            disturbance: false,
        }
    }

    /// Sum of the non-inertial terms `C q̇ + G + f − t1` at time `t`.
    pub fn bias_force(&self, state: &JointState, t: f64) -> Vec3 {
        let load = self.payload.mass_at(t);
        let c = coriolis_with_payload(&self.params, &state.q, &state.qdot, self.coriolis, load);
        let mut bias = c * state.qdot + gravity_vector(&self.params, load);
        if self.friction {
            bias += friction_force(&self.params, &state.qdot);
        }
        if self.disturbance {
            bias -= disturbance(t);
        }
        bias
    }

    pub fn mass_at(&self, q: &Vec3, t: f64) -> Mat3 {
        mass_matrix(&self.params, q, self.payload.mass_at(t))
    }
}

/// 1-norm condition number, `None` when the matrix cannot be inverted.
pub fn condition_number(m: &Mat3) -> Option<f64> {
    let inv = m.try_inverse()?;
    let norm1 = |a: &Mat3| {
        (0..3)
            .map(|j| a.column(j).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    Some(norm1(m) * norm1(&inv))
}

/// Joint accelerations from `M q̈ + C q̇ + G + f = τ + t1`.
pub fn forward_dynamics(plant: &Plant, state: &JointState, torque: &Vec3, t: f64) -> Result<Vec3> {
    let m = plant.mass_at(&state.q, t);
    let cond = condition_number(&m).unwrap_or(f64::INFINITY);
    if !(cond <= MAX_MASS_CONDITION) {
        return Err(Error::SingularMass { condition: cond });
    }
    let rhs = torque - plant.bias_force(state, t);
    m.lu()
        .solve(&rhs)
        .ok_or(Error::SingularMass { condition: cond })
}

pub fn forward_kinematics(params: &RobotParams, q: &Vec3) -> Vec3 {
    let q12 = q[0] + q[1];
    Vec3::new(
        params.l1 * libm::cos(q[0]) + params.l2 * libm::cos(q12),
        params.l1 * libm::sin(q[0]) + params.l2 * libm::sin(q12),
        q[2],
    )
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    use core::f64::consts::{PI, TAU};
    let mut w = libm::fmod(a, TAU);
    if w <= -PI {
        w += TAU;
    } else if w > PI {
        w -= TAU;
    }
    w
}

/// Closed-form inverse kinematics. `q1` is returned in `(-π, π]`.
pub fn analytic_ik(params: &RobotParams, p: &Vec3, branch: ElbowBranch) -> Result<Vec3> {
    let (l1, l2) = (params.l1, params.l2);
    let r2 = p[0] * p[0] + p[1] * p[1];
    let r = libm::sqrt(r2);
    let slack = 1e-12 * params.reach();
    if r > l1 + l2 + slack || r < (l1 - l2).abs() - slack {
        return Err(Error::OutOfWorkspace { radius: r });
    }
    let c2 = ((r2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2)).clamp(-1.0, 1.0);
    let mut q2 = libm::acos(c2);
    if branch == ElbowBranch::Up {
        q2 = -q2;
    }
    let q1 = libm::atan2(p[1], p[0]) - libm::atan2(l2 * libm::sin(q2), l1 + l2 * libm::cos(q2));
    Ok(Vec3::new(wrap_angle(q1), q2, p[2]))
}

/// Kinetic plus potential energy. The potential is `-(m3 + payload) g q3`,
/// the one whose gradient is the gravity vector above.
pub fn total_energy(params: &RobotParams, state: &JointState, payload_mass: f64) -> f64 {
    let m = mass_matrix(params, &state.q, payload_mass);
    let kinetic = 0.5 * state.qdot.dot(&(m * state.qdot));
    kinetic - (params.m3 + payload_mass) * params.g * state.q[2]
}

pub fn is_positive_definite(m: &Mat3) -> bool {
    Cholesky::new(*m).is_some()
}

/// `q̇ᵀ (Ṁ − 2C) q̇`, with `Ṁ` from a central difference of `M` along `q̇`.
/// Zero for a passive Coriolis matrix.
pub fn passivity_residual(
    params: &RobotParams,
    state: &JointState,
    mode: CoriolisMode,
    step: f64,
) -> f64 {
    let fwd = mass_matrix(params, &(state.q + state.qdot * step), 0.0);
    let back = mass_matrix(params, &(state.q - state.qdot * step), 0.0);
    let mdot = (fwd - back) / (2.0 * step);
    let c = coriolis_matrix(params, &state.q, &state.qdot, mode);
    state.qdot.dot(&((mdot - c * 2.0) * state.qdot))
}
