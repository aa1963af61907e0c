//! Lloyd's k-means, the baseline the ACO centers are compared against.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;

use crate::{rng, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansOutcome {
    pub centers: Vec<Vec<f64>>,
    /// Sum of squared distances to the assigned center.
    pub cost: f64,
    pub iterations: usize,
    /// Cost after every assignment step, starting with the initial one.
    pub cost_history: Vec<f64>,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn assign(dataset: &[Vec<f64>], centers: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let mut cost = 0.0;
    let labels = dataset
        .iter()
        .map(|x| {
            let (best, d) = centers
                .iter()
                .enumerate()
                .map(|(c, mu)| (c, sq_dist(x, mu)))
                .fold((0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
            cost += d;
            best
        })
        .collect();
    (labels, cost)
}

fn update(dataset: &[Vec<f64>], labels: &[usize], centers: &mut [Vec<f64>]) {
    let dim = dataset[0].len();
    let k = centers.len();
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (x, &l) in dataset.iter().zip(labels) {
        counts[l] += 1;
        sums[l].iter_mut().zip(x).for_each(|(s, v)| *s += v);
    }
    for (c, (sum, n)) in sums.iter().zip(&counts).enumerate() {
        if *n > 0 {
            centers[c] = sum.iter().map(|s| s / *n as f64).collect();
        }
    }
    // Empty clusters move to the point farthest from its (updated) center.
    for c in (0..k).filter(|&c| counts[c] == 0) {
        let far = dataset
            .iter()
            .zip(labels)
            .map(|(x, &l)| sq_dist(x, &centers[l]))
            .enumerate()
            .fold((0, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc })
            .0;
        centers[c] = dataset[far].clone();
    }
}

/// Lloyd iteration from explicit initial centers. Stops at an assignment
/// fixpoint or after `max_iters` update steps.
pub fn kmeans_from(dataset: &[Vec<f64>], init: Vec<Vec<f64>>, max_iters: usize) -> Result<KMeansOutcome> {
    if dataset.is_empty() {
        return Err(Error::Empty("dataset"));
    }
    if init.is_empty() {
        return Err(Error::Empty("initial centers"));
    }
    let dim = dataset[0].len();
    for p in dataset.iter().chain(&init) {
        if p.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
        }
    }
    let mut centers = init;
    let (mut labels, mut cost) = assign(dataset, &centers);
    let mut history = vec![cost];
    let mut iterations = 0;
    while iterations < max_iters {
        update(dataset, &labels, &mut centers);
        let (next, next_cost) = assign(dataset, &centers);
        iterations += 1;
        history.push(next_cost);
        cost = next_cost;
        if next == labels {
            break;
        }
        labels = next;
    }
    Ok(KMeansOutcome {
        centers,
        cost,
        iterations,
        cost_history: history,
    })
}

/// k-means with `k` distinct dataset points drawn uniformly (seeded) as the
/// initial centers.
pub fn kmeans_centers(dataset: &[Vec<f64>], k: usize, max_iters: usize, rng_seed: u64) -> Result<KMeansOutcome> {
    if k == 0 || k > dataset.len() {
        return Err(Error::InvalidConfig("need 1 <= k <= number of points"));
    }
    let mut rng = rng::stream(rng_seed, &[0x4B4D]);
    let init = index::sample(&mut rng, dataset.len(), k)
        .into_iter()
        .map(|i| dataset[i].clone())
        .collect();
    kmeans_from(dataset, init, max_iters)
}
