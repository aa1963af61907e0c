//! ACO-seeded versus k-means-seeded RBF networks on a shared regression task.

use alloc::vec::Vec;

use super::kmeans::kmeans_centers;
use super::{run_aco_centers, solution_cost, AcoConfig};
use crate::rbfn::{train_lms, RbfNetwork, TrainConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareConfig {
    pub aco: AcoConfig,
    /// `max_hidden` is pinned to the center count so both networks keep the
    /// same size.
    pub train: TrainConfig,
    pub kmeans_max_iters: usize,
    pub seeds: usize,
    pub base_seed: u64,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            aco: AcoConfig::default(),
            train: TrainConfig {
                learning_rate: 0.05,
                error_target: 1e-3,
                max_hidden: 5,
                max_epochs: 100,
                rng_seed: 0,
            },
            kmeans_max_iters: 100,
            seeds: 20,
            base_seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareRow {
    pub seed: u64,
    /// Quantization cost `Σ min ‖x − c‖` of each center set.
    pub aco_cost: f64,
    pub kmeans_cost: f64,
    pub aco_final_error: f64,
    pub kmeans_final_error: f64,
    pub aco_iters: usize,
    pub kmeans_iters: usize,
}

impl CompareRow {
    /// Ties count in ACO's favor.
    pub fn aco_non_loss(&self) -> bool {
        self.aco_final_error <= self.kmeans_final_error
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub rows: Vec<CompareRow>,
    pub mean_aco_error: f64,
    pub mean_kmeans_error: f64,
    pub aco_non_loss_rate: f64,
}

impl CompareReport {
    pub fn from_rows(rows: Vec<CompareRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Empty("comparison rows"));
        }
        let n = rows.len() as f64;
        let mean_aco_error = rows.iter().map(|r| r.aco_final_error).sum::<f64>() / n;
        let mean_kmeans_error = rows.iter().map(|r| r.kmeans_final_error).sum::<f64>() / n;
        let wins = rows.iter().filter(|r| r.aco_non_loss()).count() as f64;
        Ok(Self {
            rows,
            mean_aco_error,
            mean_kmeans_error,
            aco_non_loss_rate: wins / n,
        })
    }
}

/// Fits output weights for fixed centers and returns the final batch error.
pub fn fitted_error(
    centers: &[Vec<f64>],
    inputs: &[Vec<f64>],
    targets: &[Vec<f64>],
    train: &TrainConfig,
) -> Result<f64> {
    let output_dim = targets.first().ok_or(Error::Empty("targets"))?.len();
    let net = RbfNetwork::with_spread_widths(output_dim, centers)?;
    let cfg = TrainConfig {
        max_hidden: centers.len(),
        ..*train
    };
    Ok(train_lms(&net, inputs, targets, &cfg)?.1.final_error)
}

/// One paired trial: both center selectors and the weight training share
/// `seed`.
pub fn compare_seed(
    inputs: &[Vec<f64>],
    targets: &[Vec<f64>],
    cfg: &CompareConfig,
    seed: u64,
) -> Result<CompareRow> {
    let aco_cfg = AcoConfig {
        rng_seed: seed,
        ..cfg.aco
    };
    let train = TrainConfig {
        rng_seed: seed,
        ..cfg.train
    };
    let aco = run_aco_centers(inputs, &aco_cfg)?;
    let km = kmeans_centers(inputs, cfg.aco.centers, cfg.kmeans_max_iters, seed)?;
    Ok(CompareRow {
        seed,
        aco_cost: aco.best_cost,
        kmeans_cost: solution_cost(&km.centers, inputs),
        aco_final_error: fitted_error(&aco.centers, inputs, targets, &train)?,
        kmeans_final_error: fitted_error(&km.centers, inputs, targets, &train)?,
        aco_iters: aco.iterations,
        kmeans_iters: km.iterations,
    })
}

/// Runs `cfg.seeds` paired trials with seeds `base_seed, base_seed + 1, …`.
pub fn compare_clustering(
    inputs: &[Vec<f64>],
    targets: &[Vec<f64>],
    cfg: &CompareConfig,
) -> Result<CompareReport> {
    if cfg.seeds == 0 {
        return Err(Error::InvalidConfig("at least one seed is required"));
    }
    let rows = (0..cfg.seeds as u64)
        .map(|s| compare_seed(inputs, targets, cfg, cfg.base_seed + s))
        .collect::<Result<Vec<_>>>()?;
    CompareReport::from_rows(rows)
}
