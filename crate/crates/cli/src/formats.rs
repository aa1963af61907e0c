//! On-disk formats: CSV traces and reports, metrics blocks, the network
//! text format and run manifests.

use std::io::Write;
use std::path::Path;

use acorbfn_core::aco::compare::CompareReport;
use acorbfn_core::rbfn::RbfNetwork;
use acorbfn_core::sim::ik::IkReport;
use acorbfn_core::sim::{Metrics, SimTrace};

use crate::config::{Config, RUN_PREFIX};
use crate::error::CliError;

pub const TRACE_HEADER: [&str; 16] = [
    "t", "qd1", "qd2", "qd3", "q1", "q2", "q3", "e1", "e2", "e3", "tau1", "tau2", "tau3", "s1", "s2", "s3",
];

pub const COMPARE_HEADER: [&str; 7] = [
    "seed",
    "aco_cost",
    "kmeans_cost",
    "aco_final_E",
    "kmeans_final_E",
    "aco_iters",
    "kmeans_iters",
];

pub const IK_HEADER: [&str; 12] = [
    "index", "x", "y", "z", "q1", "q2", "q3", "q1_hat", "q2_hat", "q3_hat", "joint_error", "cartesian_error",
];

/// 17 significant digits, enough to recover every `f64` exactly.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `bytes` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

fn csv_bytes<I, R>(header: &[&str], rows: I) -> Vec<u8>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    // writes into a Vec cannot fail
    w.write_record(header).expect("in-memory csv");
    for row in rows {
        w.write_record(row).expect("in-memory csv");
    }
    w.into_inner().expect("in-memory csv")
}

pub fn trace_csv(trace: &SimTrace) -> Vec<u8> {
    csv_bytes(
        &TRACE_HEADER,
        trace.rows.iter().map(|r| {
            std::iter::once(r.t)
                .chain(r.q_desired.iter().copied())
                .chain(r.q.iter().copied())
                .chain(r.e.iter().copied())
                .chain(r.torque.iter().copied())
                .chain(r.s.iter().copied())
                .map(num)
                .collect::<Vec<_>>()
        }),
    )
}

fn metric_fields(m: &Metrics) -> Vec<(String, f64)> {
    let mut out = vec![("window_start".to_string(), m.window.0), ("window_end".to_string(), m.window.1)];
    for (name, vals) in [("rms", m.rms), ("max_abs", m.max_abs), ("final_half_rms", m.final_half_rms)] {
        for (j, v) in vals.iter().enumerate() {
            out.push((format!("{name}_{}", j + 1), *v));
        }
    }
    out
}

pub fn metrics_text(m: &Metrics) -> String {
    metric_fields(m).iter().map(|(k, v)| format!("{k}={}\n", num(*v))).collect()
}

pub fn metrics_csv(m: &Metrics) -> Vec<u8> {
    let fields = metric_fields(m);
    let header: Vec<&str> = fields.iter().map(|(k, _)| k.as_str()).collect();
    csv_bytes(&header, [fields.iter().map(|(_, v)| num(*v)).collect::<Vec<_>>()])
}

pub fn compare_csv(report: &CompareReport) -> Vec<u8> {
    csv_bytes(
        &COMPARE_HEADER,
        report.rows.iter().map(|r| {
            vec![
                r.seed.to_string(),
                num(r.aco_cost),
                num(r.kmeans_cost),
                num(r.aco_final_error),
                num(r.kmeans_final_error),
                r.aco_iters.to_string(),
                r.kmeans_iters.to_string(),
            ]
        }),
    )
}

pub fn compare_summary(report: &CompareReport) -> String {
    format!(
        "mean_E_aco={}\nmean_E_kmeans={}\naco_non_loss_rate={}\nseeds={}\ntie_rule=equal E counts as an ACO non-loss\n",
        num(report.mean_aco_error),
        num(report.mean_kmeans_error),
        num(report.aco_non_loss_rate),
        report.rows.len()
    )
}

pub fn ik_csv(report: &IkReport) -> Vec<u8> {
    csv_bytes(
        &IK_HEADER,
        report.test.iter().enumerate().map(|(i, e)| {
            let mut row = vec![i.to_string()];
            row.extend(
                e.sample
                    .position
                    .iter()
                    .chain(e.sample.joints.iter())
                    .chain(e.predicted.iter())
                    .copied()
                    .chain([e.joint_error, e.cartesian_error])
                    .map(num),
            );
            row
        }),
    )
}

pub fn ik_summary(report: &IkReport) -> String {
    format!(
        "mean_joint_error={}\nmean_cartesian_error={}\nfinal_E={}\nepochs={}\nhidden={}\nconverged={}\naco_best_cost={}\naco_iterations={}\n",
        num(report.mean_joint_error),
        num(report.mean_cartesian_error),
        num(report.training.final_error),
        report.training.epochs_used,
        report.network.hidden_count(),
        report.training.converged,
        num(report.colony.best_cost),
        report.colony.iterations,
    )
}

/// Header line `input_dim output_dim hidden_count`, then one line per
/// hidden unit: center components, width, then its output weights.
pub fn network_text(net: &RbfNetwork) -> String {
    let mut out = format!("{} {} {}\n", net.input_dim(), net.output_dim(), net.hidden_count());
    for i in 0..net.hidden_count() {
        let fields: Vec<String> = net
            .center(i)
            .iter()
            .copied()
            .chain([net.widths()[i]])
            .chain((0..net.output_dim()).map(|j| net.weight(j, i)))
            .map(num)
            .collect();
        out.push_str(&fields.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_network(text: &str) -> Result<RbfNetwork, CliError> {
    let bad = |m: &str| CliError::Format(m.to_string());
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<usize> = lines
        .next()
        .ok_or_else(|| bad("empty file"))?
        .split_whitespace()
        .map(|v| v.parse().map_err(|_| bad("header must hold three integers")))
        .collect::<Result<_, _>>()?;
    let [input, output, hidden] = header[..] else {
        return Err(bad("header must hold three integers"));
    };
    let mut centers = Vec::with_capacity(hidden * input);
    let mut widths = Vec::with_capacity(hidden);
    let mut weights = Vec::with_capacity(hidden * output);
    for _ in 0..hidden {
        let vals: Vec<f64> = lines
            .next()
            .ok_or_else(|| bad("fewer unit lines than the header declares"))?
            .split_whitespace()
            .map(|v| v.parse().map_err(|_| bad("non-numeric field")))
            .collect::<Result<_, _>>()?;
        if vals.len() != input + 1 + output {
            return Err(bad("unit line has the wrong number of fields"));
        }
        centers.extend_from_slice(&vals[..input]);
        widths.push(vals[input]);
        weights.extend_from_slice(&vals[input + 1..]);
    }
    if lines.next().is_some() {
        return Err(bad("trailing lines after the last unit"));
    }
    Ok(RbfNetwork::from_parts(input, output, centers, widths, weights)?)
}

/// `run.*` lines describing the invocation followed by the fully resolved
/// config; loadable as a config file.
pub fn manifest(subcommand: &str, cfg: &Config, outputs: &[&str]) -> String {
    let mut out = format!(
        "{RUN_PREFIX}subcommand={subcommand}\n{RUN_PREFIX}version={}\n",
        env!("CARGO_PKG_VERSION")
    );
    for o in outputs {
        out.push_str(&format!("{RUN_PREFIX}output={o}\n"));
    }
    for (k, v) in cfg.entries() {
        out.push_str(&format!("{k}={v}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02e23, 0.0, f64::MIN_POSITIVE] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn network_round_trip() {
        let centers = vec![vec![0.1, 0.2], vec![-1.0 / 3.0, 2.5], vec![7.0, 1e-9]];
        let net = RbfNetwork::with_spread_widths(2, &centers)
            .unwrap()
            .with_weights(vec![1.0, -2.0, 0.3, 1.0 / 7.0, 5e5, -0.0])
            .unwrap();
        let text = network_text(&net);
        assert!(text.starts_with("2 2 3\n"));
        assert_eq!(parse_network(&text).unwrap(), net);
    }

    #[test]
    fn malformed_networks_are_rejected() {
        assert!(parse_network("").is_err());
        assert!(parse_network("1 1 2\n0 1 1\n").is_err());
        assert!(parse_network("1 1 1\n0 1\n").is_err());
        assert!(parse_network("1 1 1\n0 1 x\n").is_err());
        assert!(parse_network("1 1 1\n0 1 1\n0 1 1\n").is_err());
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/out.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
