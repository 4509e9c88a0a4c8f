//! Seeded trajectory simulation: hitting times, cover times and the
//! reset-rate sweep.
//!
//! Every trial draws from its own ChaCha8 stream derived from
//! `(master_seed, stream_index)`, so serial and rayon-parallel runs produce
//! bitwise-identical ensembles and any trial can be replayed in isolation.
//! Steps are sampled by inverse CDF over precomputed cumulative rows of the
//! (reset) transition matrix.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::hypergraph::TransitionMatrix;
use crate::spectral::{assemble_pi, ResetWalkSpec};

/// Hard per-trial step budget; reset probabilities near 1 produce
/// astronomically long walks.
pub const STEP_CAP: u64 = 100_000_000;

/// Seeded ensemble of per-trial step counts.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialEnsemble {
    pub master_seed: u64,
    /// Steps per trial, in trial order; capped trials hold [`STEP_CAP`].
    pub values: Vec<u64>,
    /// Number of trials that hit the step cap before finishing.
    pub capped_trials: usize,
}

impl TrialEnsemble {
    pub fn trial_count(&self) -> usize {
        self.values.len()
    }

    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().map(|&v| v as f64).sum::<f64>() / self.values.len() as f64
    }

    /// Standard error of the mean (sample standard deviation over sqrt n).
    pub fn stderr(&self) -> f64 {
        let n = self.values.len();
        if n < 2 {
            return 0.0;
        }
        let mean = self.mean();
        let var = self
            .values
            .iter()
            .map(|&v| {
                let d = v as f64 - mean;
                d * d
            })
            .sum::<f64>()
            / (n - 1) as f64;
        (var / n as f64).sqrt()
    }
}

fn trial_rng(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// First index whose cumulative mass exceeds `u`; rounding at the top end
/// falls back to the last index with positive mass.
fn sample_cumulative(cum: &[f64], u: f64) -> usize {
    let k = cum.partition_point(|&c| c <= u);
    if k < cum.len() {
        return k;
    }
    for k in (1..cum.len()).rev() {
        if cum[k] > cum[k - 1] {
            return k;
        }
    }
    0
}

/// Samples the next node from one stochastic row by inverse CDF.
pub fn step_sampler(row: &[f64], rng: &mut impl Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let cum: Vec<f64> = row
        .iter()
        .map(|&p| {
            acc += p;
            acc
        })
        .collect();
    sample_cumulative(&cum, u)
}

/// Transition matrix with per-row cumulative sums, ready for sampling.
struct CumulativeRows {
    cum: Vec<Vec<f64>>,
}

impl CumulativeRows {
    fn new(matrix: &nalgebra::DMatrix<f64>) -> Self {
        let n = matrix.nrows();
        let cum = (0..n)
            .map(|i| {
                let mut acc = 0.0;
                (0..n)
                    .map(|j| {
                        acc += matrix[(i, j)];
                        acc
                    })
                    .collect()
            })
            .collect();
        Self { cum }
    }

    fn step(&self, node: usize, u: f64) -> usize {
        sample_cumulative(&self.cum[node], u)
    }
}

/// Empirical first-passage (first-return when `source == target`) times of
/// the resetting walk; `gamma = 0` gives the simple walk.
pub fn simulate_hitting_time(
    w: &TransitionMatrix,
    spec: &ResetWalkSpec,
    source: usize,
    target: usize,
    trials: usize,
    master_seed: u64,
) -> TrialEnsemble {
    let rows = CumulativeRows::new(&assemble_pi(w, spec));
    let results: Vec<(u64, bool)> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(master_seed, trial);
            let mut node = source;
            let mut steps = 0u64;
            loop {
                node = rows.step(node, rng.random());
                steps += 1;
                if node == target {
                    return (steps, false);
                }
                if steps >= STEP_CAP {
                    return (steps, true);
                }
            }
        })
        .collect();
    collect_ensemble(master_seed, results)
}

/// Empirical cover times of the resetting walk started at the reset node,
/// which counts as visited at time 0.
pub fn cover_time(
    w: &TransitionMatrix,
    spec: &ResetWalkSpec,
    trials: usize,
    master_seed: u64,
) -> TrialEnsemble {
    let rows = CumulativeRows::new(&assemble_pi(w, spec));
    let results = cover_trials(&rows, w.node_count(), spec.reset_node(), trials, master_seed, 0);
    collect_ensemble(master_seed, results)
}

fn cover_trials(
    rows: &CumulativeRows,
    n: usize,
    start: usize,
    trials: usize,
    master_seed: u64,
    stream_offset: u64,
) -> Vec<(u64, bool)> {
    (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(master_seed, stream_offset + trial);
            let mut visited = vec![false; n];
            visited[start] = true;
            let mut remaining = n - 1;
            let mut node = start;
            let mut steps = 0u64;
            while remaining > 0 {
                node = rows.step(node, rng.random());
                steps += 1;
                if !visited[node] {
                    visited[node] = true;
                    remaining -= 1;
                }
                if steps >= STEP_CAP {
                    return (steps, true);
                }
            }
            (steps, false)
        })
        .collect()
}

fn collect_ensemble(master_seed: u64, results: Vec<(u64, bool)>) -> TrialEnsemble {
    let capped_trials = results.iter().filter(|&&(_, capped)| capped).count();
    TrialEnsemble {
        master_seed,
        values: results.into_iter().map(|(v, _)| v).collect(),
        capped_trials,
    }
}

/// One point of the cover-time sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub gamma: f64,
    pub mean_cover: f64,
    pub stderr: f64,
    pub trials: usize,
    pub capped_trials: usize,
}

/// Mean cover time for each reset probability in `gamma_grid`, walking from
/// (and resetting to) `reset_node`. Trials at grid index `k` use streams
/// `k * trials ..`, so the whole sweep is reproducible from one seed.
pub fn gamma_sweep_cover(
    w: &TransitionMatrix,
    reset_node: usize,
    gamma_grid: &[f64],
    trials: usize,
    master_seed: u64,
) -> Result<Vec<SweepPoint>> {
    let n = w.node_count();
    let mut points = Vec::with_capacity(gamma_grid.len());
    for (k, &gamma) in gamma_grid.iter().enumerate() {
        let spec = ResetWalkSpec::new(reset_node, gamma, n)?;
        let rows = CumulativeRows::new(&assemble_pi(w, &spec));
        let results = cover_trials(
            &rows,
            n,
            reset_node,
            trials,
            master_seed,
            (k * trials) as u64,
        );
        let ensemble = collect_ensemble(master_seed, results);
        points.push(SweepPoint {
            gamma,
            mean_cover: ensemble.mean(),
            stderr: ensemble.stderr(),
            trials,
            capped_trials: ensemble.capped_trials,
        });
    }
    Ok(points)
}
