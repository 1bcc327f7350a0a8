//! Executions under the uniform random scheduler.

use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{pair_count, pair_from_index, Configuration, Protocol, ProtocolKind};
use crate::protocols::{self, StabilityTracker};

/// The scheduler's random source. Fixed so that a seed names the same
/// execution on every platform.
pub type SchedulerRng = ChaCha8Rng;

pub fn scheduler_rng(seed: u64) -> SchedulerRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixes a base seed with cell coordinates (splitmix64 finalizer per part).
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    parts.iter().fold(mix(base), |acc, &p| mix(acc ^ mix(p)))
}

/// Draws one of the n(n-1)/2 unordered pairs uniformly.
#[inline]
pub fn sample_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (usize, usize) {
    pair_from_index(rng.random_range(0..pair_count(n)))
}

/// One scheduler step: a uniform pair, an orientation coin, one encounter.
pub fn step<R: Rng + ?Sized>(config: &mut Configuration, protocol: &Protocol, rng: &mut R) -> Result<bool> {
    if config.n() < 2 {
        return Err(Error::InvalidState(format!("cannot schedule pairs on {} node(s)", config.n())));
    }
    Ok(step_unchecked(config, protocol, rng))
}

#[inline]
fn step_unchecked<R: Rng + ?Sized>(config: &mut Configuration, protocol: &Protocol, rng: &mut R) -> bool {
    let (u, v) = sample_pair(config.n(), rng);
    let coin = rng.random::<bool>();
    config.apply_unchecked(protocol, u, v, coin)
}

/// Largest k for which a cross-edges run is expected to stay polylogarithmic.
pub fn polylog_k_threshold(n: usize) -> u32 {
    let ll = (n.max(4) as f64).log2().log2().floor() as u32;
    ll.max(3)
}

/// Default step budget: 200·n·(ln n)³ in the polylogarithmic regimes and
/// 50·n² for cross-edges runs with k above [`polylog_k_threshold`].
pub fn default_max_steps(protocol: &Protocol, n: usize) -> u64 {
    let nf = n as f64;
    if protocol.kind() == ProtocolKind::CrossEdgesTree && protocol.k() > polylog_k_threshold(n) {
        50 * (n as u64) * (n as u64)
    } else {
        (200.0 * nf * nf.ln().powi(3)).ceil().max(1.0) as u64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub protocol: String,
    pub k: u32,
    pub n: usize,
    pub seed: u64,
    pub steps: u64,
    pub parallel_time: f64,
    pub stabilized: bool,
    pub wall_ms: f64,
}

impl RunRecord {
    pub const CSV_HEADER: &'static str = "protocol,k,n,seed,steps,parallel_time,stabilized,wall_ms";

    /// Equality on everything but wall-clock time.
    pub fn same_outcome(&self, other: &RunRecord) -> bool {
        RunRecord { wall_ms: 0.0, ..self.clone() } == RunRecord { wall_ms: 0.0, ..other.clone() }
    }

    /// One CSV row. Without `timing` the wall_ms field is left empty so that
    /// output depends only on the inputs.
    pub fn csv_row(&self, timing: bool) -> String {
        let mut s = format!(
            "{},{},{},{},{},{},{},",
            self.protocol, self.k, self.n, self.seed, self.steps, self.parallel_time, self.stabilized
        );
        if timing {
            write!(s, "{:.3}", self.wall_ms).unwrap();
        }
        s
    }
}

/// A single execution in progress: configuration, scheduler RNG, step count
/// and the incremental stability tracker.
pub struct Execution<'p> {
    protocol: &'p Protocol,
    config: Configuration,
    rng: SchedulerRng,
    tracker: Box<dyn StabilityTracker>,
    steps: u64,
    seed: u64,
}

impl<'p> Execution<'p> {
    pub fn new(protocol: &'p Protocol, n: usize, seed: u64) -> Result<Execution<'p>> {
        validate_run(protocol, n)?;
        let strategy = protocols::strategy_for(protocol)?;
        let config = protocols::initial_configuration(n, protocol, 0)?;
        let tracker = strategy.tracker(&config, protocol.k());
        Ok(Execution { protocol, config, rng: scheduler_rng(seed), tracker, steps: 0, seed })
    }

    pub fn config(&self) -> &Configuration {
        &self.config
    }

    pub fn into_config(self) -> Configuration {
        self.config
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn protocol(&self) -> &Protocol {
        self.protocol
    }

    /// Performs one scheduler step; returns the touched pair when a rule fired.
    #[inline]
    pub fn advance(&mut self) -> Option<(usize, usize)> {
        let (u, v) = sample_pair(self.config.n(), &mut self.rng);
        let coin = self.rng.random::<bool>();
        self.steps += 1;
        if self.config.apply_unchecked(self.protocol, u, v, coin) {
            self.tracker.observe(&self.config, [u, v]);
            Some((u, v))
        } else {
            None
        }
    }

    pub fn is_stable(&self) -> bool {
        self.tracker.is_stable(&self.config)
    }

    /// Steps until stable or until `max_steps` steps have been taken in
    /// total. `on_effective` sees the configuration after each effective step.
    pub fn run_until_stable<F>(&mut self, max_steps: u64, mut on_effective: F) -> bool
    where
        F: FnMut(&Configuration, u64),
    {
        // stability can only change on an effective step
        let mut stable = self.is_stable();
        while !stable && self.steps < max_steps {
            if self.advance().is_some() {
                on_effective(&self.config, self.steps);
                stable = self.is_stable();
            }
        }
        if stable {
            debug_assert!(self.config.is_stable_naive(self.protocol), "fast stability disagrees with exhaustive check");
        }
        stable
    }

    fn record(&self, stabilized: bool, wall_ms: f64) -> RunRecord {
        let n = self.config.n();
        RunRecord {
            protocol: self.protocol.name().to_string(),
            k: self.protocol.k(),
            n,
            seed: self.seed,
            steps: self.steps,
            parallel_time: self.steps as f64 / n as f64,
            stabilized,
            wall_ms,
        }
    }
}

fn validate_run(protocol: &Protocol, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("runs need n >= 2, got {n}")));
    }
    if protocol.kind() == ProtocolKind::CrossEdgesTree {
        if n <= 3 {
            return Err(Error::InvalidParameter(format!("cross-edges runs need n > 3, got {n}")));
        }
        if protocol.k() as usize >= n {
            return Err(Error::InvalidParameter(format!(
                "cross-edges runs need k < n, got k = {} n = {n}",
                protocol.k()
            )));
        }
    }
    Ok(())
}

/// Runs to stabilization and returns the record together with the final
/// configuration.
pub fn run_with_config(protocol: &Protocol, n: usize, seed: u64, max_steps: u64) -> Result<(RunRecord, Configuration)> {
    let start = Instant::now();
    let mut exec = Execution::new(protocol, n, seed)?;
    let stabilized = exec.run_until_stable(max_steps, |_, _| {});
    let record = exec.record(stabilized, start.elapsed().as_secs_f64() * 1e3);
    Ok((record, exec.into_config()))
}

/// Runs to stabilization. `steps` counts every scheduler interaction up to
/// and including the one that made the configuration stable; hitting
/// `max_steps` first yields `stabilized = false`.
pub fn run_to_stabilization(protocol: &Protocol, n: usize, seed: u64, max_steps: u64) -> Result<RunRecord> {
    run_with_config(protocol, n, seed, max_steps).map(|(r, _)| r)
}
