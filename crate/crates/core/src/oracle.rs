//! Analytic running-time bounds for the 2-slot tree construction and the
//! restricted process that attains them.
//!
//! The restricted process runs 2-slot under one scheduling intervention:
//! whenever two tree nodes each have exactly one child, a leaf child of one
//! is moved to the other. This pins the number of available nodes (nodes
//! with an open slot) of a tree of size `s` to `⌊s/2⌋ + 1`, so epoch `i`
//! (tree size `i`) succeeds per step with probability
//! `p_i = 2·α(i)·(n − i) / (n(n − 1))`.

use rand::Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Configuration, NodeState};
use crate::protocols::{initial_configuration, two_slot};
use crate::runner::{derive_seed, sample_pair, scheduler_rng};

/// Available nodes of a restricted 2-slot tree with `tree_size` nodes.
pub fn available_nodes(tree_size: u64) -> Result<u64> {
    if tree_size < 1 {
        return Err(Error::InvalidParameter("tree size must be at least 1".into()));
    }
    Ok(tree_size / 2 + 1)
}

/// Neumaier-compensated sum.
fn compensated_sum(terms: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

fn success_probability(n: u64, i: u64) -> f64 {
    let alpha = (i / 2 + 1) as f64;
    2.0 * alpha * (n - i) as f64 / (n as f64 * (n - 1) as f64)
}

/// Exact expected steps of the restricted process, an upper bound on the
/// expected steps of unrestricted 2-slot:
/// `n(n−1)/2 · Σ_{i=1}^{n−1} 1/((⌊i/2⌋+1)(n−i))`.
pub fn expected_steps_upper(n: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need n >= 2, got {n}")));
    }
    let pairs = n as f64 * (n - 1) as f64 / 2.0;
    let sum = compensated_sum((1..n).map(|i| 1.0 / (((i / 2 + 1) as f64) * (n - i) as f64)));
    Ok(pairs * sum)
}

/// One sample of the restricted process, simulated per epoch: the length
/// of epoch `i` is geometric with success probability `p_i`.
pub fn run_restricted_process(n: u64, seed: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need n >= 2, got {n}")));
    }
    let mut rng = scheduler_rng(seed);
    let mut steps = 0u64;
    for i in 1..n {
        let p = success_probability(n, i).min(1.0);
        let failures = Geometric::new(p).expect("0 < p <= 1").sample(&mut rng);
        steps += failures + 1;
    }
    Ok(steps)
}

/// Step-level reference for [`run_restricted_process`]: runs 2-slot on a
/// real configuration and performs the leaf moves explicitly.
/// `after_attach` sees the configuration after each attachment and its
/// rebalancing.
pub fn run_restricted_process_stepwise<F>(n: usize, seed: u64, mut after_attach: F) -> Result<u64>
where
    F: FnMut(&Configuration),
{
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need n >= 2, got {n}")));
    }
    let protocol = two_slot();
    let mut config = initial_configuration(n, &protocol, 0)?;
    let mut rng = scheduler_rng(seed);
    let mut parent = vec![usize::MAX; n];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    // tree nodes with exactly one child; at most two at any time
    let mut single: Vec<usize> = Vec::new();
    let mut steps = 0u64;

    while config.free_count() > 0 {
        let (u, v) = sample_pair(n, &mut rng);
        let coin = rng.random::<bool>();
        steps += 1;
        let newcomer = if config.state(u).is_free() { u } else { v };
        if !config.apply_encounter(&protocol, u, v, coin)? {
            continue;
        }
        let host = if newcomer == u { v } else { u };
        parent[newcomer] = host;
        children[host].push(newcomer);
        match children[host].len() {
            1 => single.push(host),
            _ => single.retain(|&x| x != host),
        }
        if let [x, y] = single[..] {
            let cx = children[x][0];
            let cy = children[y][0];
            let (from, to, leaf) = match (children[cx].is_empty(), children[cy].is_empty()) {
                (true, true) if rng.random::<bool>() => (y, x, cy),
                (true, _) => (x, y, cx),
                (false, true) => (y, x, cy),
                (false, false) => unreachable!("a newly single parent always holds a leaf"),
            };
            move_leaf(&mut config, leaf, from, to);
            children[from].clear();
            children[to].push(leaf);
            parent[leaf] = to;
            single.clear();
        }
        after_attach(&config);
    }
    Ok(steps)
}

fn move_leaf(config: &mut Configuration, leaf: usize, from: usize, to: usize) {
    let bump = |s: NodeState, d: i32| s.with_counter((s.counter().expect("tree node") as i32 + d) as u32);
    config.set_edge(from, leaf, false);
    config.set_edge(to, leaf, true);
    config.set_state(from, bump(config.state(from), -1));
    config.set_state(to, bump(config.state(to), 1));
}

/// Expected number of empty bins after throwing `balls` balls uniformly
/// into `bins` bins: `bins · (1 − 1/bins)^balls`.
pub fn balls_bins_empty_expectation(bins: u64, balls: u64) -> f64 {
    let b = bins as f64;
    b * (1.0 - 1.0 / b).powf(balls as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleResult {
    pub n: u64,
    pub analytic_expected_steps: f64,
    pub simulated_mean_steps: f64,
    /// Standard error of the simulated mean.
    pub standard_error: f64,
    pub reps: usize,
    pub relative_error: f64,
    pub seed: u64,
}

/// Sample mean and standard error.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

/// Compares the restricted process's Monte-Carlo mean against
/// [`expected_steps_upper`]. Rep `r` uses seed `derive_seed(seed, [n, r])`.
pub fn check_restricted_process(n: u64, reps: usize, seed: u64) -> Result<OracleResult> {
    if reps == 0 {
        return Err(Error::InvalidParameter("reps must be at least 1".into()));
    }
    let analytic = expected_steps_upper(n)?;
    let samples: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|r| run_restricted_process(n, derive_seed(seed, &[n, r as u64])).map(|s| s as f64))
        .collect::<Result<_>>()?;
    let (mean, se) = mean_and_se(&samples);
    Ok(OracleResult {
        n,
        analytic_expected_steps: analytic,
        simulated_mean_steps: mean,
        standard_error: se,
        reps,
        relative_error: (mean - analytic).abs() / analytic,
        seed,
    })
}
