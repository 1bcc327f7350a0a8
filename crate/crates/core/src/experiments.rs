//! Running-time sweeps over population sizes, degree-trace instrumentation
//! and growth-class diagnostics.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::protocols::{self, cross_edges_tree};
use crate::runner::{self, derive_seed, Execution, RunRecord};

/// How the protocol parameter k grows with n. Logarithms are base 2 with
/// floor; every non-constant schedule is clamped to `[3, n − 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KSchedule {
    Const(u32),
    LogLog,
    Log,
    Sqrt,
}

impl KSchedule {
    pub fn value(self, n: usize) -> Result<u32> {
        if n < 4 {
            return Err(Error::InvalidParameter(format!("k schedules need n >= 4, got {n}")));
        }
        let nf = n as f64;
        let raw = match self {
            KSchedule::Const(c) => return Ok(c),
            KSchedule::LogLog => nf.log2().log2().floor() as u32,
            KSchedule::Log => nf.log2().floor() as u32,
            KSchedule::Sqrt => integer_sqrt(n) as u32,
        };
        Ok(raw.max(3).min(n as u32 - 1))
    }
}

fn integer_sqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

pub fn k_schedule_value(schedule: KSchedule, n: usize) -> Result<u32> {
    schedule.value(n)
}

impl fmt::Display for KSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KSchedule::Const(c) => write!(f, "const:{c}"),
            KSchedule::LogLog => write!(f, "loglog"),
            KSchedule::Log => write!(f, "log"),
            KSchedule::Sqrt => write!(f, "sqrt"),
        }
    }
}

impl FromStr for KSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<KSchedule> {
        match s {
            "loglog" => Ok(KSchedule::LogLog),
            "log" => Ok(KSchedule::Log),
            "sqrt" => Ok(KSchedule::Sqrt),
            _ => {
                s.strip_prefix("const:").and_then(|c| c.parse().ok()).map(KSchedule::Const).ok_or_else(|| {
                    Error::InvalidInput(format!("unknown k schedule {s:?} (const:<c>, loglog, log, sqrt)"))
                })
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaxSteps {
    /// [`runner::default_max_steps`] per cell.
    Auto,
    Fixed(u64),
}

impl fmt::Display for MaxSteps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaxSteps::Auto => write!(f, "auto"),
            MaxSteps::Fixed(m) => write!(f, "{m}"),
        }
    }
}

impl FromStr for MaxSteps {
    type Err = Error;

    fn from_str(s: &str) -> Result<MaxSteps> {
        if s == "auto" {
            return Ok(MaxSteps::Auto);
        }
        s.parse()
            .map(MaxSteps::Fixed)
            .map_err(|_| Error::InvalidInput(format!("max_steps must be `auto` or an integer, got {s:?}")))
    }
}

/// `n = 10 + 6t` for `t` in `0..points`.
pub fn linear_grid(start: usize, step: usize, max: usize) -> Vec<usize> {
    (0..).map(|t| start + step * t).take_while(|&n| n <= max).collect()
}

pub fn default_grid() -> Vec<usize> {
    linear_grid(10, 6, 10 + 6 * 199)
}

/// Geometric grid from `min` to `max` with `per_octave` points per doubling,
/// rounded and de-duplicated.
pub fn geometric_grid(min: usize, max: usize, per_octave: usize) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    let steps = ((max as f64 / min as f64).log2() * per_octave as f64).round() as usize;
    for j in 0..=steps {
        let n = (min as f64 * 2f64.powf(j as f64 / per_octave as f64)).round() as usize;
        if n <= max && out.last().is_none_or(|&l| l < n) {
            out.push(n);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub protocol: String,
    pub k_schedule: KSchedule,
    pub n_grid: Vec<usize>,
    pub reps: usize,
    pub base_seed: u64,
    pub max_steps: MaxSteps,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            protocol: "cross-edges".into(),
            k_schedule: KSchedule::Const(3),
            n_grid: default_grid(),
            reps: 10,
            base_seed: 0,
            max_steps: MaxSteps::Auto,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let strategy = protocols::registry().get(&self.protocol)?;
        if self.reps == 0 {
            return Err(Error::InvalidParameter("reps must be at least 1".into()));
        }
        if self.n_grid.is_empty() || self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("n grid must be non-empty and strictly increasing".into()));
        }
        if strategy.fixed_k().is_none() {
            if self.n_grid[0] < 4 {
                return Err(Error::InvalidParameter("k schedules need n >= 4".into()));
            }
            if let KSchedule::Const(c) = self.k_schedule {
                if c < strategy.min_k() {
                    return Err(Error::InvalidParameter(format!(
                        "{} requires k >= {}, got const:{c}",
                        self.protocol,
                        strategy.min_k()
                    )));
                }
            }
        } else if self.n_grid[0] < 2 {
            return Err(Error::InvalidParameter("runs need n >= 2".into()));
        }
        Ok(())
    }

    /// The k used at population size `n`.
    pub fn k_for(&self, n: usize) -> Result<u32> {
        match protocols::registry().get(&self.protocol)?.fixed_k() {
            Some(k) => Ok(k),
            None => self.k_schedule.value(n),
        }
    }

    /// Parses the `key = value` sweep file format. Blank lines and `#`
    /// comments are ignored. Keys: protocol, k_schedule, n_grid (comma
    /// list), or n_min / n_step / n_max, reps, base_seed, max_steps.
    pub fn parse_config(text: &str) -> Result<SweepSpec> {
        let mut spec = SweepSpec::default();
        let (mut n_min, mut n_step, mut n_max) = (None, None, None);
        let mut explicit_grid = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: i + 1, msg };
            let (key, value) = line.split_once('=').ok_or_else(|| err("expected key = value".into()))?;
            let (key, value) = (key.trim(), value.trim());
            let int = |v: &str| v.parse::<u64>().map_err(|_| err(format!("{key}: expected an integer, got {v:?}")));
            match key {
                "protocol" => spec.protocol = value.to_string(),
                "k_schedule" => spec.k_schedule = value.parse().map_err(|e: Error| err(e.to_string()))?,
                "n_grid" => {
                    explicit_grid =
                        Some(value.split(',').map(|v| int(v.trim()).map(|x| x as usize)).collect::<Result<Vec<_>>>()?)
                }
                "n_min" => n_min = Some(int(value)? as usize),
                "n_step" => n_step = Some(int(value)? as usize),
                "n_max" => n_max = Some(int(value)? as usize),
                "reps" => spec.reps = int(value)? as usize,
                "base_seed" => spec.base_seed = int(value)?,
                "max_steps" => spec.max_steps = value.parse().map_err(|e: Error| err(e.to_string()))?,
                _ => return Err(err(format!("unknown key {key:?}"))),
            }
        }
        if let Some(g) = explicit_grid {
            spec.n_grid = g;
        } else if n_min.is_some() || n_step.is_some() || n_max.is_some() {
            spec.n_grid = linear_grid(n_min.unwrap_or(10), n_step.unwrap_or(6).max(1), n_max.unwrap_or(1204));
        }
        spec.validate()?;
        Ok(spec)
    }

    fn describe(&self) -> String {
        let grid: Vec<String> = self.n_grid.iter().map(|n| n.to_string()).collect();
        format!(
            "protocol={} k_schedule={} reps={} base_seed={} max_steps={} n_grid={}",
            self.protocol,
            self.k_schedule,
            self.reps,
            self.base_seed,
            self.max_steps,
            grid.join(",")
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepCell {
    pub n: usize,
    pub rep: usize,
    pub k: u32,
    pub seed: u64,
    pub outcome: std::result::Result<RunRecord, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Aggregate {
    pub n: usize,
    pub k: u32,
    /// Stabilized runs included in the statistics.
    pub reps: usize,
    pub mean_parallel_time: f64,
    pub std_parallel_time: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub cells: Vec<SweepCell>,
    pub aggregates: Vec<Aggregate>,
}

fn run_cell(spec: &SweepSpec, n: usize, rep: usize) -> SweepCell {
    let seed = derive_seed(spec.base_seed, &[n as u64, rep as u64]);
    let k = spec.k_for(n).unwrap_or(0);
    let outcome = (|| {
        let protocol = protocols::build(&spec.protocol, Some(spec.k_for(n)?))?;
        let max_steps = match spec.max_steps {
            MaxSteps::Auto => runner::default_max_steps(&protocol, n),
            MaxSteps::Fixed(m) => m,
        };
        runner::run_to_stabilization(&protocol, n, seed, max_steps)
    })()
    .map_err(|e| e.to_string());
    SweepCell { n, rep, k, seed, outcome }
}

/// Runs every (n, rep) cell, in parallel on the current rayon pool. Cell
/// seeds are `derive_seed(base_seed, [n, rep])`; results come back in
/// (n, rep) order whatever the completion order.
pub fn sweep_running_time(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let jobs: Vec<(usize, usize)> = spec.n_grid.iter().flat_map(|&n| (0..spec.reps).map(move |r| (n, r))).collect();
    let cells: Vec<SweepCell> = jobs.par_iter().map(|&(n, r)| run_cell(spec, n, r)).collect();
    let aggregates = spec
        .n_grid
        .iter()
        .map(|&n| {
            let times: Vec<f64> = cells
                .iter()
                .filter(|c| c.n == n)
                .filter_map(|c| c.outcome.as_ref().ok())
                .filter(|r| r.stabilized)
                .map(|r| r.parallel_time)
                .collect();
            let (mean, std) = mean_std(&times);
            Aggregate {
                n,
                k: spec.k_for(n).unwrap_or(0),
                reps: times.len(),
                mean_parallel_time: mean,
                std_parallel_time: std,
            }
        })
        .collect();
    Ok(SweepResult { spec: spec.clone(), cells, aggregates })
}

/// Mean and sample standard deviation; NaN mean for an empty slice.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    let std = if xs.len() > 1 { (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt() } else { 0.0 };
    (mean, std)
}

impl SweepResult {
    /// Run-level CSV with `# spec:` metadata lines. Without `timing` the
    /// output is a pure function of the spec.
    pub fn runs_csv(&self, timing: bool) -> String {
        let mut out = String::new();
        writeln!(out, "# spec: {}", self.spec.describe()).unwrap();
        writeln!(out, "# spec: k = schedule(n), log base 2 with floor, clamped to [3, n-1]").unwrap();
        writeln!(out, "{}", RunRecord::CSV_HEADER).unwrap();
        for c in &self.cells {
            match &c.outcome {
                Ok(r) => writeln!(out, "{}", r.csv_row(timing)).unwrap(),
                Err(e) => writeln!(out, "# error n={} rep={} k={} seed={}: {e}", c.n, c.rep, c.k, c.seed).unwrap(),
            }
        }
        out
    }

    pub fn aggregate_csv(&self) -> String {
        let mut out = String::from("n,k,reps,mean_parallel_time,std_parallel_time\n");
        for a in &self.aggregates {
            writeln!(out, "{},{},{},{},{}", a.n, a.k, a.reps, a.mean_parallel_time, a.std_parallel_time).unwrap();
        }
        out
    }

    /// (n, mean parallel time) for cells with at least one stabilized run.
    pub fn growth_points(&self) -> Vec<(f64, f64)> {
        self.aggregates.iter().filter(|a| a.reps > 0).map(|a| (a.n as f64, a.mean_parallel_time)).collect()
    }

    pub fn failures(&self) -> usize {
        self.cells.iter().filter(|c| !matches!(&c.outcome, Ok(r) if r.stabilized)).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceRow {
    pub step: u64,
    /// Node counts at the tracked degrees, in [`DegreeTrace::tracked`] order.
    pub counts: [usize; 5],
    pub free_count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeTrace {
    pub n: usize,
    pub k: u32,
    pub seed: u64,
    pub record_every: u64,
    /// Degrees 0, 1, ⌊k/2⌋, k − 1, k.
    pub tracked: [u32; 5],
    pub rows: Vec<TraceRow>,
    pub stabilized: bool,
    pub steps: u64,
}

/// Every effective step for n ≤ 500, else every n effective steps.
pub fn default_record_every(n: usize) -> u64 {
    if n <= 500 {
        1
    } else {
        n as u64
    }
}

/// Runs cross-edges(k) on n nodes, recording how many nodes sit at each
/// tracked degree: once initially, after every `record_every` effective
/// steps, and at the final step.
pub fn degree_trace(n: usize, k: u32, seed: u64, record_every: u64) -> Result<DegreeTrace> {
    if k < 3 || n <= k as usize {
        return Err(Error::InvalidParameter(format!("degree traces need n > k >= 3, got n = {n}, k = {k}")));
    }
    if record_every == 0 {
        return Err(Error::InvalidParameter("record_every must be at least 1".into()));
    }
    let protocol = cross_edges_tree(k)?;
    let max_steps = runner::default_max_steps(&protocol, n);
    let mut exec = Execution::new(&protocol, n, seed)?;
    let tracked = [0, 1, k / 2, k - 1, k];
    // hist[d] = nodes of active degree d
    let mut hist = vec![0usize; k as usize + 2];
    hist[0] = n;
    let row = |hist: &[usize], step: u64, free: usize| TraceRow {
        step,
        counts: tracked.map(|d| hist[d as usize]),
        free_count: free,
    };
    let mut rows = vec![row(&hist, 0, exec.config().free_count())];
    let mut effective = 0u64;
    let mut last_recorded = 0u64;
    let mut stable = exec.is_stable();
    while !stable && exec.steps() < max_steps {
        let Some((u, v)) = exec.advance() else { continue };
        // every shipped rule activates the encounter edge
        for w in [u, v] {
            let d = exec.config().degree(w) as usize;
            hist[d - 1] -= 1;
            hist[d] += 1;
        }
        effective += 1;
        stable = exec.is_stable();
        if effective.is_multiple_of(record_every) || stable {
            rows.push(row(&hist, exec.steps(), exec.config().free_count()));
            last_recorded = effective;
        }
    }
    if last_recorded != effective {
        rows.push(row(&hist, exec.steps(), exec.config().free_count()));
    }
    Ok(DegreeTrace { n, k, seed, record_every, tracked, rows, stabilized: stable, steps: exec.steps() })
}

impl DegreeTrace {
    pub fn csv(&self) -> String {
        let mut out = String::new();
        let tracked: Vec<String> = self.tracked.iter().map(|d| d.to_string()).collect();
        writeln!(
            out,
            "# n={} k={} seed={} record_every={} tracked_degrees={} stabilized={} steps={}",
            self.n,
            self.k,
            self.seed,
            self.record_every,
            tracked.join(","),
            self.stabilized,
            self.steps
        )
        .unwrap();
        writeln!(out, "step,count_d0,count_d1,count_dhalf,count_dkm1,count_dk,free_count").unwrap();
        for r in &self.rows {
            let [a, b, c, d, e] = r.counts;
            writeln!(out, "{},{a},{b},{c},{d},{e},{}", r.step, r.free_count).unwrap();
        }
        out
    }

    /// Fraction of nodes at tracked column `col` in the last row recorded at
    /// or before `fraction` of the run's total steps.
    pub fn fraction_at(&self, fraction: f64, col: usize) -> f64 {
        let cutoff = (self.steps as f64 * fraction) as u64;
        let row = self.rows.iter().take_while(|r| r.step <= cutoff).last().unwrap_or(&self.rows[0]);
        row.counts[col] as f64 / self.n as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GrowthClass {
    Polylog,
    Polynomial,
}

/// Least-squares fit of `t ≈ a·x^b` in log space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerFit {
    pub a: f64,
    pub b: f64,
    /// Sum of squared residuals of ln t.
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    /// `t ≈ a·(log₂ n)^b`.
    pub polylog: PowerFit,
    /// `t ≈ a·n^b`.
    pub polynomial: PowerFit,
    pub class: GrowthClass,
}

fn fit_power(xs: &[f64], ts: &[f64]) -> PowerFit {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let lt: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let m = xs.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let mt = lt.iter().sum::<f64>() / m;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxt: f64 = lx.iter().zip(&lt).map(|(x, t)| (x - mx) * (t - mt)).sum();
    let b = sxt / sxx;
    let ln_a = mt - b * mx;
    let residual = lx.iter().zip(&lt).map(|(x, t)| (t - ln_a - b * x).powi(2)).sum();
    PowerFit { a: ln_a.exp(), b, residual }
}

/// Fits both growth models to `(n, mean parallel time)` points and labels
/// the better fit; ties go to polylog. Needs at least 10 points spanning two
/// octaves of n, all with n ≥ 3 and t > 0.
pub fn classify_growth(points: &[(f64, f64)]) -> Result<GrowthReport> {
    if points.len() < 10 {
        return Err(Error::InvalidInput(format!("need at least 10 points, got {}", points.len())));
    }
    let (lo, hi) = points.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &(n, _)| (lo.min(n), hi.max(n)));
    if hi <= lo {
        return Err(Error::InvalidInput("n values are constant".into()));
    }
    if hi < 4.0 * lo {
        return Err(Error::InvalidInput("n values must span at least two octaves".into()));
    }
    if points.iter().any(|&(n, t)| !(n >= 3.0 && t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidInput("points need n >= 3 and finite t > 0".into()));
    }
    let ts: Vec<f64> = points.iter().map(|p| p.1).collect();
    let logs: Vec<f64> = points.iter().map(|p| p.0.log2()).collect();
    let ns: Vec<f64> = points.iter().map(|p| p.0).collect();
    let polylog = fit_power(&logs, &ts);
    let polynomial = fit_power(&ns, &ts);
    let class =
        if polylog.residual <= polynomial.residual + 1e-12 { GrowthClass::Polylog } else { GrowthClass::Polynomial };
    Ok(GrowthReport { polylog, polynomial, class })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_values() {
        assert_eq!(KSchedule::Sqrt.value(100).unwrap(), 10);
        assert_eq!(KSchedule::LogLog.value(256).unwrap(), 3);
        assert_eq!(KSchedule::Log.value(1024).unwrap(), 10);
        assert_eq!(KSchedule::Const(3).value(4).unwrap(), 3);
        assert_eq!(KSchedule::Const(3).value(5000).unwrap(), 3);
        assert_eq!(KSchedule::LogLog.value(1 << 16).unwrap(), 4);
        assert_eq!(KSchedule::Sqrt.value(4).unwrap(), 3);
        assert_eq!(KSchedule::Sqrt.value(99).unwrap(), 9);
        assert!(KSchedule::Sqrt.value(3).is_err());
        assert_eq!(integer_sqrt(1 << 40), 1 << 20);
    }

    #[test]
    fn schedule_parse_roundtrip() {
        for s in [KSchedule::Const(7), KSchedule::LogLog, KSchedule::Log, KSchedule::Sqrt] {
            assert_eq!(s.to_string().parse::<KSchedule>().unwrap(), s);
        }
        assert!("cubic".parse::<KSchedule>().is_err());
    }

    #[test]
    fn grids() {
        let g = default_grid();
        assert_eq!(g.len(), 200);
        assert_eq!((g[0], g[199]), (10, 1204));
        let geo = geometric_grid(64, 4096, 2);
        assert_eq!(geo.first(), Some(&64));
        assert_eq!(geo.last(), Some(&4096));
        assert_eq!(geo.len(), 13);
    }

    #[test]
    fn spec_validation() {
        let mut s = SweepSpec { n_grid: vec![10, 20], ..Default::default() };
        s.validate().unwrap();
        s.k_schedule = KSchedule::Const(2);
        assert!(s.validate().is_err());
        s.k_schedule = KSchedule::Const(3);
        s.n_grid = vec![20, 10];
        assert!(s.validate().is_err());
        s.n_grid = vec![10];
        s.reps = 0;
        assert!(s.validate().is_err());
        let two = SweepSpec { protocol: "two-slot".into(), n_grid: vec![2, 3], reps: 2, ..Default::default() };
        two.validate().unwrap();
        assert_eq!(two.k_for(2).unwrap(), 2);
    }

    #[test]
    fn config_file_parsing() {
        let text = "# sweep\nprotocol = cross-edges\nk_schedule = sqrt\nn_min = 16\nn_step = 8\nn_max = 40\nreps = 3\nbase_seed = 9\nmax_steps = auto\n";
        let s = SweepSpec::parse_config(text).unwrap();
        assert_eq!(s.n_grid, vec![16, 24, 32, 40]);
        assert_eq!(s.k_schedule, KSchedule::Sqrt);
        assert_eq!((s.reps, s.base_seed), (3, 9));
        let s = SweepSpec::parse_config("protocol=k-slot\nk_schedule=const:4\nn_grid=8,16\nmax_steps=5000").unwrap();
        assert_eq!(s.n_grid, vec![8, 16]);
        assert_eq!(s.max_steps, MaxSteps::Fixed(5000));
        assert!(matches!(SweepSpec::parse_config("colour = red"), Err(Error::Parse { line: 1, .. })));
        assert!(SweepSpec::parse_config("reps = many").is_err());
    }

    #[test]
    fn sweep_small_and_reproducible() {
        let spec = SweepSpec {
            protocol: "two-slot".into(),
            n_grid: vec![8, 16, 32],
            reps: 4,
            base_seed: 42,
            ..Default::default()
        };
        let a = sweep_running_time(&spec).unwrap();
        let b = sweep_running_time(&spec).unwrap();
        assert_eq!(a.runs_csv(false), b.runs_csv(false));
        assert_eq!(a.aggregate_csv(), b.aggregate_csv());
        assert_eq!(a.cells.len(), 12);
        assert_eq!(a.failures(), 0);
        assert!(a.cells.windows(2).all(|w| (w[0].n, w[0].rep) < (w[1].n, w[1].rep)));
        assert!(a.runs_csv(false).starts_with("# spec: protocol=two-slot"));
        assert_eq!(a.aggregates[0].reps, 4);
    }

    #[test]
    fn failed_cells_are_recorded() {
        let spec = SweepSpec {
            protocol: "cross-edges".into(),
            n_grid: vec![6, 200],
            reps: 2,
            max_steps: MaxSteps::Fixed(50),
            ..Default::default()
        };
        let r = sweep_running_time(&spec).unwrap();
        assert!(r.failures() >= 2);
        assert_eq!(r.aggregates[1].reps, 0);
    }

    #[test]
    fn trace_rows_track_effective_steps() {
        let t = degree_trace(20, 3, 5, 1).unwrap();
        assert!(t.stabilized);
        let effective = t.rows.len() - 1;
        // cross-edges adds one edge per effective step
        let protocol = cross_edges_tree(3).unwrap();
        let (rec, cfg) = runner::run_with_config(&protocol, 20, 5, u64::MAX).unwrap();
        assert_eq!(rec.steps, t.steps);
        assert_eq!(cfg.edge_count(), effective);
        let last = t.rows.last().unwrap();
        assert_eq!(last.counts[0], 0);
        assert_eq!(last.free_count, 0);
        assert!(t.rows.windows(2).all(|w| w[1].counts[0] <= w[0].counts[0]));
        assert!(t.rows.iter().all(|r| r.counts.iter().all(|&c| c <= 20)));
        assert!(degree_trace(3, 3, 0, 1).is_err());
    }

    #[test]
    fn trace_cadence_and_csv() {
        let t = degree_trace(40, 4, 1, 7).unwrap();
        let csv = t.csv();
        assert!(csv.starts_with("# n=40 k=4 seed=1 record_every=7 tracked_degrees=0,1,2,3,4"));
        assert!(csv.lines().nth(1).unwrap() == "step,count_d0,count_d1,count_dhalf,count_dkm1,count_dk,free_count");
        assert_eq!(t.rows.last().unwrap().step, t.steps);
        assert!(t.fraction_at(0.5, 3) <= 1.0);
    }

    #[test]
    fn growth_on_synthetic_data() {
        let ns = geometric_grid(64, 4096, 2);
        let pts = |f: &dyn Fn(f64) -> f64| ns.iter().map(|&n| (n as f64, f(n as f64))).collect::<Vec<_>>();
        let r = classify_growth(&pts(&|n| n.log2().powi(2))).unwrap();
        assert_eq!(r.class, GrowthClass::Polylog);
        assert!((r.polylog.b - 2.0).abs() < 0.1);
        let r = classify_growth(&pts(&|n| n / 10.0)).unwrap();
        assert_eq!(r.class, GrowthClass::Polynomial);
        assert!((r.polynomial.b - 1.0).abs() < 0.05);
        let r = classify_growth(&pts(&|_| 7.0)).unwrap();
        assert_eq!(r.class, GrowthClass::Polylog);
        assert!(r.polylog.b.abs() < 1e-9);
        let flat: Vec<_> = (0..12).map(|_| (100.0, 3.0)).collect();
        assert!(matches!(classify_growth(&flat), Err(Error::InvalidInput(_))));
        assert!(classify_growth(&pts(&|n| n)[..5]).is_err());
    }
}
