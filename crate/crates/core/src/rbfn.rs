//! Gaussian radial basis function network.
//!
//! Hidden unit `i` responds with `φ_i(x) = exp(-‖x − μ_i‖² / 2σ_i²)` and
//! output `j` is the linear combination `y_j = Σ_i w_ji φ_i(x)`. Weights are
//! trained by per-sample LMS; centers and widths are fixed by the caller
//! (typically ACO or k-means) and only change when training grows the
//! hidden layer.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::{rng, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RbfNetwork {
    input_dim: usize,
    output_dim: usize,
    /// hidden × input_dim, row per unit
    centers: Vec<f64>,
    widths: Vec<f64>,
    /// hidden × output_dim, one weight column per unit
    weights: Vec<f64>,
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Gaussian response of one hidden unit.
pub fn basis_eval(center: &[f64], width: f64, x: &[f64]) -> Result<f64> {
    check_dim(center.len(), x.len())?;
    if !(width > 0.0) {
        return Err(Error::InvalidConfig("basis width must be > 0"));
    }
    Ok(libm::exp(-squared_distance(x, center) / (2.0 * width * width)))
}

/// Common width `d_m / √(2M)` where `d_m` is the largest pairwise distance
/// between the `M` centers.
pub fn widths_from_spread<C: AsRef<[f64]>>(centers: &[C]) -> Result<Vec<f64>> {
    if centers.is_empty() {
        return Err(Error::Empty("centers"));
    }
    let dim = centers[0].as_ref().len();
    let mut max_sq = 0.0f64;
    for (i, a) in centers.iter().enumerate() {
        check_dim(dim, a.as_ref().len())?;
        for b in &centers[i + 1..] {
            max_sq = max_sq.max(squared_distance(a.as_ref(), b.as_ref()));
        }
    }
    if max_sq == 0.0 {
        return Err(Error::DegenerateCenters);
    }
    let m = centers.len() as f64;
    let sigma = libm::sqrt(max_sq) / libm::sqrt(2.0 * m);
    Ok(vec![sigma; centers.len()])
}

impl RbfNetwork {
    /// Network with the given centers and widths and all weights zero.
    pub fn new<C: AsRef<[f64]>>(output_dim: usize, centers: &[C], widths: Vec<f64>) -> Result<Self> {
        let input_dim = centers.first().ok_or(Error::Empty("centers"))?.as_ref().len();
        let mut flat = Vec::with_capacity(centers.len() * input_dim);
        for c in centers {
            check_dim(input_dim, c.as_ref().len())?;
            flat.extend_from_slice(c.as_ref());
        }
        let weights = vec![0.0; centers.len() * output_dim];
        Self::from_parts(input_dim, output_dim, flat, widths, weights)
    }

    /// Zero-weight network whose widths follow the spread rule.
    pub fn with_spread_widths<C: AsRef<[f64]>>(output_dim: usize, centers: &[C]) -> Result<Self> {
        let widths = widths_from_spread(centers)?;
        Self::new(output_dim, centers, widths)
    }

    /// Assembles a network from flat storage: `centers` row-major
    /// (hidden × input_dim) and `weights` one column of `output_dim` per unit.
    pub fn from_parts(
        input_dim: usize,
        output_dim: usize,
        centers: Vec<f64>,
        widths: Vec<f64>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        if input_dim == 0 || output_dim == 0 {
            return Err(Error::InvalidConfig("network dimensions must be positive"));
        }
        let hidden = widths.len();
        if hidden == 0 {
            return Err(Error::Empty("hidden layer"));
        }
        check_dim(hidden * input_dim, centers.len())?;
        check_dim(hidden * output_dim, weights.len())?;
        if widths.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidConfig("basis widths must be positive and finite"));
        }
        Ok(Self {
            input_dim,
            output_dim,
            centers,
            widths,
            weights,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn hidden_count(&self) -> usize {
        self.widths.len()
    }

    pub fn center(&self, i: usize) -> &[f64] {
        &self.centers[i * self.input_dim..(i + 1) * self.input_dim]
    }

    pub fn centers(&self) -> impl Iterator<Item = &[f64]> {
        self.centers.chunks_exact(self.input_dim)
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    /// Flat weights, `output_dim` consecutive entries per hidden unit.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    /// `w_ji`: weight from hidden unit `i` to output `j`.
    pub fn weight(&self, output: usize, hidden: usize) -> f64 {
        self.weights[hidden * self.output_dim + output]
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        check_dim(self.weights.len(), weights.len())?;
        self.weights = weights;
        Ok(self)
    }

    /// Hidden-layer activations `φ_i(x)`.
    pub fn activations(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut phi = vec![0.0; self.hidden_count()];
        self.activations_into(x, &mut phi)?;
        Ok(phi)
    }

    fn activations_into(&self, x: &[f64], phi: &mut [f64]) -> Result<()> {
        check_dim(self.input_dim, x.len())?;
        for ((p, c), w) in phi.iter_mut().zip(self.centers()).zip(&self.widths) {
            *p = libm::exp(-squared_distance(x, c) / (2.0 * w * w));
        }
        Ok(())
    }

    fn combine(&self, phi: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (column, p) in self.weights.chunks_exact(self.output_dim).zip(phi) {
            for (o, w) in out.iter_mut().zip(column) {
                *o += w * p;
            }
        }
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        let phi = self.activations(x)?;
        let mut out = vec![0.0; self.output_dim];
        self.combine(&phi, &mut out);
        Ok(out)
    }

    /// One LMS update toward `target`, in place. Returns the sample error
    /// `½‖y − d‖²` measured before the update.
    pub fn lms_update(&mut self, x: &[f64], target: &[f64], rate: f64) -> Result<f64> {
        check_dim(self.output_dim, target.len())?;
        let phi = self.activations(x)?;
        let mut residual = vec![0.0; self.output_dim];
        self.combine(&phi, &mut residual);
        let mut err = 0.0;
        for (r, d) in residual.iter_mut().zip(target) {
            *r -= d;
            err += 0.5 * *r * *r;
        }
        for (column, p) in self.weights.chunks_exact_mut(self.output_dim).zip(&phi) {
            for (w, r) in column.iter_mut().zip(&residual) {
                *w -= rate * r * p;
            }
        }
        Ok(err)
    }

    fn sample_errors(&self, inputs: &[Vec<f64>], targets: &[Vec<f64>]) -> Result<Vec<f64>> {
        check_dim(inputs.len(), targets.len())?;
        if inputs.is_empty() {
            return Err(Error::Empty("training set"));
        }
        let mut phi = vec![0.0; self.hidden_count()];
        let mut y = vec![0.0; self.output_dim];
        inputs
            .iter()
            .zip(targets)
            .map(|(x, d)| {
                check_dim(self.output_dim, d.len())?;
                self.activations_into(x, &mut phi)?;
                self.combine(&phi, &mut y);
                Ok(y.iter().zip(d).map(|(a, b)| 0.5 * (a - b) * (a - b)).sum())
            })
            .collect()
    }
}

/// `E = ½ Σ (y − d)²` over every sample and output component.
pub fn batch_error(net: &RbfNetwork, inputs: &[Vec<f64>], targets: &[Vec<f64>]) -> Result<f64> {
    Ok(net.sample_errors(inputs, targets)?.iter().sum())
}

/// `∂E/∂w` for the batch error, laid out like [`RbfNetwork::weights`].
pub fn weight_gradient(net: &RbfNetwork, inputs: &[Vec<f64>], targets: &[Vec<f64>]) -> Result<Vec<f64>> {
    check_dim(inputs.len(), targets.len())?;
    let mut grad = vec![0.0; net.weights.len()];
    for (x, d) in inputs.iter().zip(targets) {
        check_dim(net.output_dim, d.len())?;
        let phi = net.activations(x)?;
        let mut y = vec![0.0; net.output_dim];
        net.combine(&phi, &mut y);
        for (column, p) in grad.chunks_exact_mut(net.output_dim).zip(&phi) {
            for ((g, yj), dj) in column.iter_mut().zip(&y).zip(d) {
                *g += (yj - dj) * p;
            }
        }
    }
    Ok(grad)
}

/// Single LMS step `w_ji ← w_ji − α (y_j − d_j) φ_i(x)`; centers and widths
/// are untouched.
pub fn lms_step(net: &RbfNetwork, x: &[f64], target: &[f64], rate: f64) -> Result<RbfNetwork> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::InvalidConfig("learning rate must lie in (0, 1)"));
    }
    let mut next = net.clone();
    next.lms_update(x, target, rate)?;
    Ok(next)
}

/// Adds one hidden unit centered on the worst-fit training input that is
/// not already a center (lowest index on ties). The new weight column is zero, so outputs are unchanged;
/// existing widths are kept and the new unit takes the spread-rule width of
/// the enlarged center set.
pub fn grow_hidden_node(
    net: &RbfNetwork,
    inputs: &[Vec<f64>],
    targets: &[Vec<f64>],
    max_hidden: usize,
) -> Result<RbfNetwork> {
    if net.hidden_count() >= max_hidden {
        return Err(Error::CapReached { max_hidden });
    }
    let errors = net.sample_errors(inputs, targets)?;
    // A sample that already is a center would add a duplicate unit; the
    // worst fits tend to be exactly the ones growth cannot fix, so repeats
    // would otherwise stack there and destabilize LMS.
    let worst = errors
        .iter()
        .enumerate()
        .filter(|(k, _)| net.centers().all(|c| c != inputs[*k].as_slice()))
        .fold(None, |best: Option<(usize, f64)>, (k, e)| match best {
            Some((_, b)) if *e <= b => best,
            _ => Some((k, *e)),
        })
        .map(|(k, _)| k)
        .ok_or(Error::DegenerateCenters)?;

    let mut grown = net.clone();
    grown.centers.extend_from_slice(&inputs[worst]);
    let centers: Vec<&[f64]> = grown.centers().collect();
    let width = widths_from_spread(&centers)?[0];
    grown.widths.push(width);
    grown.weights.extend(core::iter::repeat_n(0.0, net.output_dim));
    Ok(grown)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    /// LMS step size, `0 < α < 1`.
    pub learning_rate: f64,
    /// Stop once the batch error reaches this level.
    pub error_target: f64,
    pub max_hidden: usize,
    pub max_epochs: usize,
    /// Seeds the fixed per-run sample order.
    pub rng_seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            error_target: 1e-3,
            max_hidden: 40,
            max_epochs: 200,
            rng_seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate < 1.0) {
            return Err(Error::InvalidConfig("learning rate must lie in (0, 1)"));
        }
        if !(self.error_target > 0.0) {
            return Err(Error::InvalidConfig("error target must be > 0"));
        }
        if self.max_hidden == 0 {
            return Err(Error::InvalidConfig("max_hidden must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub final_error: f64,
    pub epochs_used: usize,
    /// `(epoch, hidden_count)` at the start and after every growth.
    pub hidden_history: Vec<(usize, usize)>,
    pub converged: bool,
}

/// Online LMS training with hidden-layer growth.
///
/// Each epoch visits every sample once in a seeded order that stays fixed
/// for the whole run. After an epoch whose batch error is still above the
/// target, one hidden unit is added (until `max_hidden`).
pub fn train_lms(
    net: &RbfNetwork,
    inputs: &[Vec<f64>],
    targets: &[Vec<f64>],
    cfg: &TrainConfig,
) -> Result<(RbfNetwork, TrainReport)> {
    cfg.validate()?;
    let mut net = net.clone();
    let mut error = batch_error(&net, inputs, targets)?;
    let mut order: Vec<usize> = (0..inputs.len()).collect();
    order.shuffle(&mut rng::stream(cfg.rng_seed, &[0x4c4d53]));

    let mut history = vec![(0, net.hidden_count())];
    let mut epochs_used = 0;
    while error > cfg.error_target && epochs_used < cfg.max_epochs {
        for &k in &order {
            net.lms_update(&inputs[k], &targets[k], cfg.learning_rate)?;
        }
        epochs_used += 1;
        error = batch_error(&net, inputs, targets)?;
        if !error.is_finite() {
            return Err(Error::Diverged { epoch: epochs_used });
        }
        if error > cfg.error_target && net.hidden_count() < cfg.max_hidden {
            net = grow_hidden_node(&net, inputs, targets, cfg.max_hidden)?;
            history.push((epochs_used, net.hidden_count()));
        }
    }
    let report = TrainReport {
        final_error: error,
        epochs_used,
        hidden_history: history,
        converged: error <= cfg.error_target,
    };
    Ok((net, report))
}
