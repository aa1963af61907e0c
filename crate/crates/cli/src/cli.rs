//! Argument parsing and config resolution.
//!
//! Precedence is built-in defaults < `--config` file < `--set` overrides <
//! named flags. The seed falls back to `ACORBFN_SEED` when neither a file
//! nor the command line names one.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::parser::ValueSource;
use clap::{Arg, ArgAction, ArgMatches, Command};

use crate::commands;
use crate::config::{env_seed, Config};
use crate::error::CliError;

/// A flag that sets one config key.
struct Flag {
    id: &'static str,
    key: &'static str,
    help: &'static str,
}

/// A switch that sets a key to a fixed value when present.
struct Switch {
    id: &'static str,
    key: &'static str,
    value: &'static str,
    help: &'static str,
}

const SIMULATE_FLAGS: &[Flag] = &[
    Flag { id: "dt", key: "sim.dt", help: "Integration step in seconds" },
    Flag { id: "t-end", key: "sim.t_end", help: "Simulated time in seconds" },
    Flag { id: "payload", key: "sim.payload", help: "Extra mass carried during the payload window (kg)" },
    Flag { id: "factors", key: "robot.factors", help: "Model estimate factors for M,C,G" },
    Flag { id: "coriolis", key: "sim.coriolis", help: "Plant Coriolis model: paper or christoffel" },
    Flag { id: "lambda", key: "ctrl.lambda", help: "Sliding surface slopes (one value or three)" },
    Flag { id: "k", key: "ctrl.k", help: "Robust gain" },
    Flag { id: "eps", key: "ctrl.eps", help: "Boundary layer width" },
    Flag { id: "alpha", key: "ctrl.alpha", help: "Compensator adaptation gain" },
    Flag { id: "hidden", key: "ctrl.hidden", help: "Compensator hidden units" },
];

const SIMULATE_SWITCHES: &[Switch] = &[
    Switch { id: "no-compensation", key: "ctrl.compensation", value: "false", help: "Disable the RBFN compensator [default: enabled]" },
    Switch { id: "no-disturbance", key: "sim.disturbance", value: "false", help: "Disable the external disturbance [default: enabled]" },
    Switch { id: "no-friction", key: "sim.friction", value: "false", help: "Disable joint friction [default: enabled]" },
];

const TRAIN_IK_FLAGS: &[Flag] = &[
    Flag { id: "centers", key: "ik.centers", help: "ACO-selected initial hidden units" },
    Flag { id: "train-points", key: "ik.train_points", help: "Training samples" },
    Flag { id: "test-points", key: "ik.test_points", help: "Held-out samples" },
    Flag { id: "rate", key: "ik.rate", help: "LMS learning rate" },
    Flag { id: "max-hidden", key: "ik.max_hidden", help: "Hidden unit cap for growth" },
    Flag { id: "epochs", key: "ik.max_epochs", help: "Maximum training epochs" },
];

const COMPARE_FLAGS: &[Flag] = &[
    Flag { id: "seeds", key: "compare.seeds", help: "Number of paired seeds" },
    Flag { id: "centers", key: "compare.centers", help: "Centers per method" },
    Flag { id: "ants", key: "aco.ants", help: "Ants per cycle" },
];

const CHECK_FLAGS: &[Flag] = &[
    Flag { id: "payload", key: "sim.payload", help: "Largest payload swept by the definiteness checks (kg)" },
    Flag { id: "samples", key: "check.samples", help: "Random draws per sweep" },
];

fn flags_for(sub: &str) -> (&'static [Flag], &'static [Switch]) {
    match sub {
        "simulate" => (SIMULATE_FLAGS, SIMULATE_SWITCHES),
        "train-ik" => (TRAIN_IK_FLAGS, &[]),
        "compare" => (COMPARE_FLAGS, &[]),
        _ => (CHECK_FLAGS, &[]),
    }
}

fn subcommand(name: &'static str, about: &'static str) -> Command {
    let (flags, switches) = flags_for(name);
    let mut cmd = Command::new(name)
        .about(about)
        .arg(Arg::new("config").long("config").value_name("FILE").help("Config file of key=value lines"))
        .arg(
            Arg::new("seed")
                .long("seed")
                .value_name("N")
                .default_value(Config::default_of("seed"))
                .help("Run seed; without this flag the config file, then $ACORBFN_SEED, then the default applies"),
        )
        .arg(
            Arg::new("out")
                .long("out")
                .value_name("DIR")
                .default_value(format!("acorbfn-out/{name}"))
                .help("Output directory"),
        )
        .arg(
            Arg::new("set")
                .long("set")
                .value_name("KEY=VALUE")
                .action(ArgAction::Append)
                .help("Override any config key (repeatable)"),
        );
    for f in flags {
        cmd = cmd.arg(
            Arg::new(f.id)
                .long(f.id)
                .value_name("VALUE")
                .default_value(Config::default_of(f.key))
                .help(format!("{} ({})", f.help, f.key)),
        );
    }
    for s in switches {
        cmd = cmd.arg(Arg::new(s.id).long(s.id).action(ArgAction::SetTrue).help(s.help));
    }
    if name == "simulate" {
        cmd = cmd.arg(
            Arg::new("plots")
                .long("plots")
                .action(ArgAction::SetTrue)
                .help("Also write SVG plots of position, error and torque per joint [default: off]"),
        );
    }
    cmd
}

pub fn command() -> Command {
    Command::new("acorbfn")
        .version(env!("CARGO_PKG_VERSION"))
        .about("ACO-seeded RBF networks for SCARA inverse kinematics and tracking control")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .subcommand(subcommand("simulate", "Closed-loop tracking simulation"))
        .subcommand(subcommand("train-ik", "Learn the inverse kinematics with an ACO-seeded RBF network"))
        .subcommand(subcommand("compare", "ACO versus k-means center selection on the blob benchmark"))
        .subcommand(subcommand("check-dynamics", "Self-checks of the manipulator model"))
}

fn from_command_line(m: &ArgMatches, id: &str) -> bool {
    m.value_source(id) == Some(ValueSource::CommandLine)
}

/// Builds the effective config for one subcommand invocation.
pub fn resolve(sub: &str, m: &ArgMatches) -> Result<Config, CliError> {
    let mut cfg = Config::default();
    let mut seed_named = false;
    if let Some(path) = m.get_one::<String>("config") {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{path}: {e}")))?;
        seed_named |= cfg.apply_text(&text)?;
    }
    for kv in m.get_many::<String>("set").into_iter().flatten() {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        seed_named |= k.trim() == "seed";
        cfg.set(k, v)?;
    }
    let (flags, switches) = flags_for(sub);
    for f in flags {
        if from_command_line(m, f.id) {
            cfg.set(f.key, m.get_one::<String>(f.id).expect("flag has a value"))?;
        }
    }
    for s in switches {
        if m.get_flag(s.id) {
            cfg.set(s.key, s.value)?;
        }
    }
    if from_command_line(m, "seed") {
        cfg.set("seed", m.get_one::<String>("seed").expect("seed has a value"))?;
    } else if !seed_named {
        if let Some(seed) = env_seed().map_err(|e| CliError::Config(e.to_string()))? {
            cfg.seed = seed;
        }
    }
    Ok(cfg)
}

fn report(files: &[PathBuf]) {
    for f in files {
        println!("wrote {}", f.display());
    }
}

fn dispatch(sub: &str, m: &ArgMatches) -> Result<u8, CliError> {
    let cfg = resolve(sub, m)?;
    let out = PathBuf::from(m.get_one::<String>("out").expect("out has a default"));
    match sub {
        "simulate" => {
            let o = commands::simulate(&cfg, &out, m.get_flag("plots"))?;
            report(&o.files);
            if let Some(metrics) = o.metrics {
                let r = metrics.final_half_rms;
                println!("final_half_rms={:.6e},{:.6e},{:.6e}", r[0], r[1], r[2]);
            }
            if let Some(reason) = o.abort {
                return Err(CliError::Abort(reason));
            }
        }
        "train-ik" => {
            let o = commands::train_ik(&cfg, &out)?;
            report(&o.files);
            println!(
                "mean_joint_error={:.6e} mean_cartesian_error={:.6e}",
                o.mean_joint_error, o.mean_cartesian_error
            );
        }
        "compare" => {
            let o = commands::compare(&cfg, &out)?;
            report(&o.files);
            let r = &o.report;
            println!(
                "mean_E_aco={:.6e} mean_E_kmeans={:.6e} aco_non_loss_rate={:.3} (ties count as ACO non-loss)",
                r.mean_aco_error, r.mean_kmeans_error, r.aco_non_loss_rate
            );
        }
        _ => {
            let o = commands::check_dynamics(&cfg, &out)?;
            report(&o.files);
            for c in &o.checks {
                let status = if c.passed { "PASS" } else { "FAIL" };
                let tag = if c.required { "" } else { " (informational)" };
                println!("{status} {}{tag}: worst {:.3e}", c.name, c.worst);
                if !c.note.is_empty() {
                    println!("     note: {}", c.note);
                }
            }
            if !o.all_required_pass() {
                let failed: Vec<&str> = o.checks.iter().filter(|c| c.required && !c.passed).map(|c| c.name).collect();
                return Err(CliError::PropertyFailed(failed.join(", ")));
            }
        }
    }
    Ok(0)
}

/// Parses `args`, runs the subcommand and returns the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (sub, m) = matches.subcommand().expect("a subcommand is required");
    match dispatch(sub, m) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matches(args: &[&str]) -> (String, ArgMatches) {
        let m = command().try_get_matches_from(args).unwrap();
        let (s, sub) = m.subcommand().unwrap();
        (s.to_string(), sub.clone())
    }

    #[test]
    fn flags_override_defaults() {
        let (s, m) = matches(&["acorbfn", "simulate", "--dt", "0.002", "--no-friction", "--factors", "1,1,1"]);
        let cfg = resolve(&s, &m).unwrap();
        assert_eq!(cfg.sim.dt, 0.002);
        assert!(!cfg.sim.friction);
        assert_eq!(cfg.robot.estimate.mass, 1.0);
        assert_eq!(cfg.sim.t_end, Config::default().sim.t_end);
    }

    #[test]
    fn flags_beat_the_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("c.txt");
        std::fs::write(&file, "sim.dt=0.005\nsim.t_end=2\nseed=11\n").unwrap();
        let f = file.to_str().unwrap();
        let (s, m) = matches(&["acorbfn", "simulate", "--config", f, "--dt", "0.01"]);
        let cfg = resolve(&s, &m).unwrap();
        assert_eq!(cfg.sim.dt, 0.01);
        assert_eq!(cfg.sim.t_end, 2.0);
        assert_eq!(cfg.seed, 11);
        let (s, m) = matches(&["acorbfn", "simulate", "--config", f, "--set", "sim.t_end=3", "--seed", "4"]);
        let cfg = resolve(&s, &m).unwrap();
        assert_eq!(cfg.sim.t_end, 3.0);
        assert_eq!(cfg.seed, 4);
    }

    #[test]
    fn help_defaults_match_the_config() {
        for sub in command().get_subcommands() {
            let (flags, _) = flags_for(sub.get_name());
            for f in flags {
                let arg = sub.get_arguments().find(|a| a.get_id() == f.id).unwrap();
                assert_eq!(arg.get_default_values()[0].to_str().unwrap(), Config::default_of(f.key));
            }
        }
    }
}
