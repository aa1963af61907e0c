//! Ant colony selection of RBF centers.
//!
//! Candidate vertices are the dataset points themselves. Each ant walks `k`
//! distinct vertices, choosing the next one with probability proportional
//! to the trail on the edge it would traverse; the visited vertices become
//! the proposed centers and the walk's "length" is the quantization cost
//! `Σ_x min_c ‖x − c‖`. Trails evaporate by `ρ` and receive `ρ Σ Q/L_k`
//! from every ant that traversed them.

pub mod benchmark;
pub mod compare;
pub mod kmeans;

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::rng::{self, StreamRng};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcoConfig {
    pub ant_count: usize,
    /// Evaporation factor, `0 < ρ < 1`.
    pub evaporation: f64,
    /// Deposit constant `Q`.
    pub deposit: f64,
    pub max_iterations: usize,
    /// Number of centers each ant picks.
    pub centers: usize,
    pub initial_pheromone: f64,
    pub rng_seed: u64,
}

impl Default for AcoConfig {
    fn default() -> Self {
        Self {
            ant_count: 20,
            evaporation: 0.9,
            deposit: 100.0,
            max_iterations: 100,
            centers: 5,
            initial_pheromone: 1.0,
            rng_seed: 0,
        }
    }
}

impl AcoConfig {
    pub fn validate(&self, n_vertices: usize) -> Result<()> {
        if self.ant_count == 0 {
            return Err(Error::InvalidConfig("ant count must be >= 1"));
        }
        if !(self.evaporation > 0.0 && self.evaporation < 1.0) {
            return Err(Error::InvalidConfig("evaporation must lie in (0, 1)"));
        }
        if !(self.deposit > 0.0) {
            return Err(Error::InvalidConfig("deposit constant must be > 0"));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max iterations must be >= 1"));
        }
        if self.centers == 0 {
            return Err(Error::InvalidConfig("at least one center is required"));
        }
        if self.centers > n_vertices {
            return Err(Error::InvalidConfig("more centers requested than data points"));
        }
        if !(self.initial_pheromone > 0.0) {
            return Err(Error::InvalidConfig("initial pheromone must be > 0"));
        }
        Ok(())
    }
}

/// Trail matrix over ordered vertex pairs plus the cycle counter.
#[derive(Debug, Clone, PartialEq)]
pub struct PheromoneState {
    n: usize,
    trails: Vec<f64>,
    pub iteration: usize,
}

impl PheromoneState {
    pub fn new(n_vertices: usize, initial: f64) -> Result<Self> {
        if n_vertices == 0 {
            return Err(Error::Empty("vertex set"));
        }
        if !(initial > 0.0) {
            return Err(Error::InvalidConfig("initial pheromone must be > 0"));
        }
        Ok(Self {
            n: n_vertices,
            trails: vec![initial; n_vertices * n_vertices],
            iteration: 0,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn trail(&self, from: usize, to: usize) -> f64 {
        self.trails[from * self.n + to]
    }

    pub fn row(&self, from: usize) -> &[f64] {
        &self.trails[from * self.n..(from + 1) * self.n]
    }

    pub fn min_trail(&self) -> f64 {
        self.trails.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub fn init_pheromone(n_vertices: usize, initial: f64) -> Result<PheromoneState> {
    PheromoneState::new(n_vertices, initial)
}

/// Transition probabilities out of `current`; forbidden vertices get 0.
pub fn selection_probabilities(
    state: &PheromoneState,
    current: usize,
    forbidden: &[bool],
) -> Result<Vec<f64>> {
    let row = state.row(current);
    let total: f64 = row
        .iter()
        .zip(forbidden)
        .filter(|(_, f)| !**f)
        .map(|(t, _)| t)
        .sum();
    if total == 0.0 {
        return Err(Error::NoAdmissibleVertex);
    }
    Ok(row
        .iter()
        .zip(forbidden)
        .map(|(t, f)| if *f { 0.0 } else { t / total })
        .collect())
}

/// Roulette draw of the next vertex with `p_ij = τ_ij / Σ_admissible τ_ij`.
/// `forbidden[j]` marks vertices already on the walk.
pub fn select_next<R: Rng + ?Sized>(
    state: &PheromoneState,
    current: usize,
    forbidden: &[bool],
    rng: &mut R,
) -> Result<usize> {
    let row = state.row(current);
    let mut total = 0.0;
    let mut last = None;
    for (j, (t, f)) in row.iter().zip(forbidden).enumerate() {
        if !*f {
            total += t;
            last = Some(j);
        }
    }
    let last = last.ok_or(Error::NoAdmissibleVertex)?;
    let mut ticket = rng.random::<f64>() * total;
    for (j, (t, f)) in row.iter().zip(forbidden).enumerate() {
        if *f {
            continue;
        }
        if ticket < *t {
            return Ok(j);
        }
        ticket -= t;
    }
    // rounding left the ticket past the final bucket
    Ok(last)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AntSolution {
    /// Visit order; consecutive pairs are the traversed edges.
    pub chosen: Vec<usize>,
    pub cost: f64,
}

impl AntSolution {
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.chosen.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn sorted_vertices(&self) -> Vec<usize> {
        let mut v = self.chosen.clone();
        v.sort_unstable();
        v
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// Quantization cost `Σ_x min_c ‖x − c‖`.
pub fn solution_cost<C: AsRef<[f64]>, P: AsRef<[f64]>>(centers: &[C], dataset: &[P]) -> f64 {
    dataset
        .iter()
        .map(|x| {
            centers
                .iter()
                .map(|c| distance(x.as_ref(), c.as_ref()))
                .fold(f64::INFINITY, f64::min)
        })
        .sum()
}

/// One ant's walk: a uniform start vertex followed by `k − 1` pheromone-guided
/// steps without repeats.
pub fn construct_solution<P: AsRef<[f64]>, R: Rng + ?Sized>(
    state: &PheromoneState,
    candidates: &[P],
    k: usize,
    rng: &mut R,
) -> Result<AntSolution> {
    let n = candidates.len();
    if n != state.vertex_count() {
        return Err(Error::DimensionMismatch {
            expected: state.vertex_count(),
            found: n,
        });
    }
    if k == 0 || k > n {
        return Err(Error::InvalidConfig("need 1 <= k <= number of candidates"));
    }
    let mut visited = vec![false; n];
    let mut chosen = Vec::with_capacity(k);
    let mut current = rng.random_range(0..n);
    visited[current] = true;
    chosen.push(current);
    while chosen.len() < k {
        current = select_next(state, current, &visited, rng)?;
        visited[current] = true;
        chosen.push(current);
    }
    let centers: Vec<&[f64]> = chosen.iter().map(|&i| candidates[i].as_ref()).collect();
    let cost = solution_cost(&centers, candidates);
    Ok(AntSolution { chosen, cost })
}

/// Global update `τ ← (1 − ρ) τ + ρ Δτ`, `Δτ_ij = Σ Q / L_k` over the ants
/// whose walk traversed `(i, j)`.
///
/// A zero-cost solution is optimal and would divide by zero; it is reported
/// as [`Error::ZeroCostSolution`] and the trails are left untouched.
pub fn update_pheromone(
    state: &mut PheromoneState,
    solutions: &[AntSolution],
    evaporation: f64,
    deposit: f64,
) -> Result<()> {
    if let Some(ant) = solutions.iter().position(|s| !(s.cost > 0.0)) {
        return Err(Error::ZeroCostSolution { ant });
    }
    let n = state.n;
    let mut delta = vec![0.0; n * n];
    for s in solutions {
        let amount = deposit / s.cost;
        for (i, j) in s.edges() {
            delta[i * n + j] += amount;
        }
    }
    for (t, d) in state.trails.iter_mut().zip(&delta) {
        *t = (1.0 - evaporation) * *t + evaporation * d;
    }
    state.iteration += 1;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcoOutcome {
    pub centers: Vec<Vec<f64>>,
    /// Dataset indices of the best solution, in visit order.
    pub indices: Vec<usize>,
    pub best_cost: f64,
    pub iterations: usize,
    /// Best-so-far cost after each iteration.
    pub best_history: Vec<f64>,
}

fn ant_rng(seed: u64, iteration: usize, ant: usize) -> StreamRng {
    rng::stream(seed, &[0xAC0, iteration as u64, ant as u64])
}

/// Runs the colony until `max_iterations`, until every ant picks the same
/// vertex set in one cycle, or until some ant reaches zero cost.
pub fn run_aco_centers<P: AsRef<[f64]>>(dataset: &[P], cfg: &AcoConfig) -> Result<AcoOutcome> {
    if dataset.is_empty() {
        return Err(Error::Empty("dataset"));
    }
    cfg.validate(dataset.len())?;
    let mut state = init_pheromone(dataset.len(), cfg.initial_pheromone)?;
    let mut best: Option<AntSolution> = None;
    let mut history = Vec::new();

    for cycle in 0..cfg.max_iterations {
        let solutions = (0..cfg.ant_count)
            .map(|ant| {
                let mut rng = ant_rng(cfg.rng_seed, cycle, ant);
                construct_solution(&state, dataset, cfg.centers, &mut rng)
            })
            .collect::<Result<Vec<_>>>()?;

        for s in &solutions {
            if best.as_ref().is_none_or(|b| s.cost < b.cost) {
                best = Some(s.clone());
            }
        }
        history.push(best.as_ref().map_or(f64::INFINITY, |b| b.cost));

        let first = solutions[0].sorted_vertices();
        let converged = solutions[1..].iter().all(|s| s.sorted_vertices() == first);

        match update_pheromone(&mut state, &solutions, cfg.evaporation, cfg.deposit) {
            Ok(()) => {}
            Err(Error::ZeroCostSolution { .. }) => break,
            Err(e) => return Err(e),
        }
        if converged {
            break;
        }
    }

    let best = best.ok_or(Error::Empty("ant solutions"))?;
    Ok(AcoOutcome {
        centers: best.chosen.iter().map(|&i| dataset[i].as_ref().to_vec()).collect(),
        indices: best.chosen,
        best_cost: best.cost,
        iterations: history.len(),
        best_history: history,
    })
}
