//! Seeded synthetic clustering benchmarks.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::{rng, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlobSpec {
    pub points: usize,
    pub blobs: usize,
    pub dim: usize,
    /// Per-axis standard deviation of every blob.
    pub sigma: f64,
    /// Minimum distance between blob means.
    pub min_separation: f64,
    pub seed: u64,
}

impl BlobSpec {
    /// 300 points in five 3-D blobs, σ = 0.5, means at least 8 apart.
    pub const REGRESSION: Self = Self {
        points: 300,
        blobs: 5,
        dim: 3,
        sigma: 0.5,
        min_separation: 8.0,
        seed: 2024,
    };

    /// 30 points in three blobs separated by 20× their σ; small enough for
    /// exhaustive search over all 3-subsets.
    pub const SMALL: Self = Self {
        points: 30,
        blobs: 3,
        dim: 3,
        sigma: 0.5,
        min_separation: 10.0,
        seed: 30,
    };
}

/// Draws blob means uniformly in a cube (rejecting any closer than
/// `min_separation`) and assigns points to blobs round-robin.
pub fn gaussian_blobs(spec: &BlobSpec) -> Result<Vec<Vec<f64>>> {
    if spec.points == 0 || spec.blobs == 0 || spec.dim == 0 {
        return Err(Error::Empty("blob benchmark"));
    }
    let noise = Normal::new(0.0, spec.sigma).map_err(|_| Error::InvalidConfig("blob sigma"))?;
    let half = spec.min_separation * spec.blobs as f64;
    let mut rng = rng::stream(spec.seed, &[0xB10B]);
    let mut means: Vec<Vec<f64>> = Vec::with_capacity(spec.blobs);
    let mut attempts = 0usize;
    while means.len() < spec.blobs {
        attempts += 1;
        if attempts > 100_000 {
            return Err(Error::InvalidConfig("could not place separated blob means"));
        }
        let cand: Vec<f64> = (0..spec.dim).map(|_| rng.random_range(-half..half)).collect();
        let far_enough = means.iter().all(|m| {
            let d2: f64 = m.iter().zip(&cand).map(|(a, b)| (a - b) * (a - b)).sum();
            libm::sqrt(d2) >= spec.min_separation
        });
        if far_enough {
            means.push(cand);
        }
    }
    Ok((0..spec.points)
        .map(|i| {
            means[i % spec.blobs]
                .iter()
                .map(|m| m + noise.sample(&mut rng))
                .collect()
        })
        .collect())
}

/// Smooth regression target `Σ_d sin(x_d / 2)` over the first three
/// coordinates.
pub fn sine_target(x: &[f64]) -> f64 {
    x.iter().take(3).map(|v| libm::sin(0.5 * v)).sum()
}
