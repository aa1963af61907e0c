//! Classical fixed-step Runge–Kutta for second-order joint dynamics.

use crate::dynamics::{JointState, Vec3};
use crate::Result;

/// Advances `(q, q̇)` by one RK4 step of `q̈ = accel(t, state)`.
///
/// Anything the closure captures (the applied torque in particular) is
/// held constant across the four stages.
pub fn rk4_step<F>(mut accel: F, state: &JointState, t: f64, dt: f64) -> Result<JointState>
where
    F: FnMut(f64, &JointState) -> Result<Vec3>,
{
    let half = 0.5 * dt;
    let stage = |q: Vec3, qdot: Vec3| JointState { q, qdot };

    let v1 = state.qdot;
    let a1 = accel(t, state)?;
    let v2 = state.qdot + a1 * half;
    let a2 = accel(t + half, &stage(state.q + v1 * half, v2))?;
    let v3 = state.qdot + a2 * half;
    let a3 = accel(t + half, &stage(state.q + v2 * half, v3))?;
    let v4 = state.qdot + a3 * dt;
    let a4 = accel(t + dt, &stage(state.q + v3 * dt, v4))?;

    let sixth = dt / 6.0;
    Ok(JointState {
        q: state.q + (v1 + (v2 + v3) * 2.0 + v4) * sixth,
        qdot: state.qdot + (a1 + (a2 + a3) * 2.0 + a4) * sixth,
    })
}
