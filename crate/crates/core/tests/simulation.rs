use acorbfn_core::controller::ControllerConfig;
use acorbfn_core::dynamics::*;
use acorbfn_core::sim::{rk4_step, run_simulation, run_with_compensator, SimConfig};
use acorbfn_core::Error;

fn free_plant() -> Plant {
    Plant::rigid(RobotParams::default(), CoriolisMode::Christoffel)
}

fn free_start() -> JointState {
    JointState::new(Vec3::new(0.0, 1.0, 0.1), Vec3::new(0.5, 0.5, 0.0)).unwrap()
}

fn coast(plant: &Plant, dt: f64, t_end: f64) -> JointState {
    let steps = (t_end / dt).round() as usize;
    let mut s = free_start();
    for i in 0..steps {
        s = rk4_step(|t, st| forward_dynamics(plant, st, &Vec3::zeros(), t), &s, i as f64 * dt, dt).unwrap();
    }
    s
}

#[test]
fn unforced_energy_is_conserved() {
    let plant = free_plant();
    let e0 = total_energy(&plant.params, &free_start(), 0.0);
    let mut s = free_start();
    let mut worst: f64 = 0.0;
    for i in 0..10_000 {
        s = rk4_step(|t, st| forward_dynamics(&plant, st, &Vec3::zeros(), t), &s, i as f64 * 1e-3, 1e-3).unwrap();
        worst = worst.max(((total_energy(&plant.params, &s, 0.0) - e0) / e0).abs());
    }
    assert!(worst < 1e-6, "drift {worst:e}");
}

#[test]
fn step_halving_shows_fourth_order() {
    let plant = free_plant();
    let a = coast(&plant, 0.04, 2.0).q;
    let b = coast(&plant, 0.02, 2.0).q;
    let c = coast(&plant, 0.01, 2.0).q;
    let order = ((a - b).norm() / (b - c).norm()).log2();
    assert!(order >= 3.5, "observed order {order}");
}

fn short_config() -> SimConfig {
    SimConfig {
        t_end: 1.5,
        prerun: 0.5,
        ..SimConfig::default()
    }
}

#[test]
fn runs_are_bit_identical() {
    let robot = RobotParams::default();
    let ctrl = ControllerConfig::default();
    let a = run_simulation(&robot, &ctrl, &short_config()).unwrap();
    let b = run_simulation(&robot, &ctrl, &short_config()).unwrap();
    assert_eq!(a.trace, b.trace);
    assert_eq!(a.compensator, b.compensator);
    assert_eq!(a.trace.rows.len(), 1501);
}

#[test]
fn row_count_is_floor_plus_one() {
    let robot = RobotParams::default();
    let ctrl = ControllerConfig { compensation: false, ..ControllerConfig::default() };
    for (dt, t_end, rows) in [(1e-3, 0.001, 2), (0.01, 0.255, 26), (0.003, 0.1, 34), (0.1, 1.0, 11)] {
        let cfg = SimConfig { dt, t_end, ..SimConfig::default() };
        let run = run_simulation(&robot, &ctrl, &cfg).unwrap();
        assert_eq!(run.trace.rows.len(), rows, "dt {dt} t_end {t_end}");
    }
}

#[test]
fn payload_window_is_closed() {
    let plant = SimConfig::default().plant(RobotParams::default());
    let q = Vec3::new(0.0, 1.0, 0.0);
    for (t, m33) in [(0.999, 0.5), (1.0, 10.5), (2.5, 10.5), (4.0, 10.5), (4.001, 0.5)] {
        assert_eq!(plant.mass_at(&q, t)[(2, 2)], m33, "t = {t}");
    }
}

#[test]
fn payload_step_shows_in_the_error() {
    // 98 N of extra load overwhelms the saturated robust term, so joint 3
    // falls off the reference once the payload lands
    let robot = RobotParams::default();
    let ctrl = ControllerConfig { compensation: false, ..ControllerConfig::default() };
    let cfg = SimConfig { t_end: 1.2, ..SimConfig::default() };
    let run = run_simulation(&robot, &ctrl, &cfg).unwrap();
    let e3 = |t: f64| run.trace.rows[(t / 1e-3).round() as usize].e[2].abs();
    assert!(e3(1.2) > 10.0 * e3(0.95), "{} vs {}", e3(1.2), e3(0.95));
}

#[test]
fn singular_plant_aborts_with_a_partial_trace() {
    let robot = RobotParams { m3: 0.0, ..RobotParams::default() };
    let ctrl = ControllerConfig { compensation: false, ..ControllerConfig::default() };
    let cfg = SimConfig { t_end: 0.5, payload: PayloadSchedule::NONE, ..SimConfig::default() };
    let run = run_with_compensator(&robot, &ctrl, &cfg, None).unwrap();
    assert!(matches!(run.trace.abort, Some(Error::SingularMass { .. })));
    assert_eq!(run.trace.rows.len(), 1);
}
