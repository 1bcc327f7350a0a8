//! The `netcon` command line: `run`, `sweep`, `degrees`, `oracle`, `validate`.
//!
//! Exit codes: 0 on success, 1 when a run fails (cutoff hit, snapshot not
//! stable, I/O failure on output), 2 on usage errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::Rng;
use serde::Serialize;

use crate::error::Error;
use crate::experiments::{self, KSchedule, MaxSteps, SweepSpec};
use crate::model::snapshot;
use crate::oracle;
use crate::protocols;
use crate::runner;
use crate::validators::{self, StabilityReport};

#[derive(Debug, Parser)]
#[command(name = "netcon", version, about = "Network constructors under a uniform random scheduler")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one execution to stabilization and print its record as JSON.
    Run(RunArgs),
    /// Sweep running time over a grid of population sizes.
    Sweep(SweepArgs),
    /// Record per-degree node counts along one cross-edges run.
    Degrees(DegreesArgs),
    /// Compare the restricted process's simulated mean with its exact expectation.
    Oracle(OracleArgs),
    /// Check a configuration snapshot and print its stability report as JSON.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Protocol: two-slot, k-slot or cross-edges.
    #[arg(long, default_value = "two-slot")]
    pub protocol: String,
    /// Protocol parameter; defaults to the smallest valid value.
    #[arg(long)]
    pub k: Option<u32>,
    /// Population size.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Scheduler seed; a random one is drawn and printed to stderr if omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Step budget; defaults to 200·n·(ln n)³, or 50·n² for cross-edges with k above max(3, ⌊log₂log₂ n⌋).
    #[arg(long)]
    pub max_steps: Option<u64>,
    /// Also write the final configuration snapshot here.
    #[arg(long)]
    pub snapshot: Option<PathBuf>,
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Sweep definition file (key = value lines); replaces the grid and protocol flags.
    #[arg(long, conflicts_with_all = ["protocol", "k_schedule", "n_list", "n_min", "n_step", "n_max", "per_octave", "reps", "seed", "max_steps"])]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "cross-edges")]
    pub protocol: String,
    /// k as a function of n: const:<c>, loglog, log or sqrt (base-2 logs, floored, clamped to [3, n-1]).
    #[arg(long, default_value = "const:3")]
    pub k_schedule: String,
    /// Explicit comma-separated grid of n values.
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    #[arg(long, default_value_t = 10)]
    pub n_min: usize,
    #[arg(long, default_value_t = 6)]
    pub n_step: usize,
    #[arg(long, default_value_t = 1204)]
    pub n_max: usize,
    /// Use a geometric grid from n-min to n-max with this many points per doubling.
    #[arg(long)]
    pub per_octave: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub reps: usize,
    /// Base seed; a random one is drawn and printed to stderr if omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Per-run step budget: `auto` or an integer.
    #[arg(long, default_value = "auto")]
    pub max_steps: String,
    /// Run-level CSV output (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Aggregate CSV output; defaults to `<out>.agg.csv` when --out is given.
    #[arg(long)]
    pub agg_out: Option<PathBuf>,
    /// Include wall-clock milliseconds in the run CSV (makes output non-reproducible).
    #[arg(long)]
    pub timing: bool,
    /// Concurrent sweep cells (default: available parallelism).
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DegreesArgs {
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub k: u32,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Record every this many effective steps (default: 1 for n ≤ 500, else n).
    #[arg(long)]
    pub record_every: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 128)]
    pub n: u64,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Snapshot file written by `run --snapshot`.
    pub snapshot: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Usage(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

struct Io<'a> {
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Io<'_> {
    fn emit(&mut self, out: Option<&Path>, text: &str) -> Outcome {
        match out {
            Some(p) => fs::write(p, text).map_err(|e| Failure::Run(format!("writing {}: {e}", p.display()))),
            None => self.stdout.write_all(text.as_bytes()).map_err(|e| Failure::Run(e.to_string())),
        }
    }

    fn note(&mut self, msg: &str) {
        let _ = writeln!(self.stderr, "{msg}");
    }

    fn seed(&mut self, seed: Option<u64>) -> u64 {
        seed.unwrap_or_else(|| {
            let s = rand::rng().random();
            self.note(&format!("seed: {s}"));
            s
        })
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

/// Parses `args` (including the program name) and executes the command,
/// writing to the given streams. Returns the process exit code.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
            } else {
                let _ = stdout.write_all(text.as_bytes());
            }
            return e.exit_code();
        }
    };
    execute(cli.command, stdout, stderr)
}

/// Dispatches a parsed command. Returns the process exit code.
pub fn execute(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let mut io = Io { stdout, stderr };
    let result = match command {
        Command::Run(a) => cmd_run(a, &mut io),
        Command::Sweep(a) => cmd_sweep(a, &mut io),
        Command::Degrees(a) => cmd_degrees(a, &mut io),
        Command::Oracle(a) => cmd_oracle(a, &mut io),
        Command::Validate(a) => cmd_validate(a, &mut io),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Run(msg)) => {
            io.note(&format!("error: {msg}"));
            1
        }
        Err(Failure::Usage(msg)) => {
            io.note(&format!("error: {msg}"));
            2
        }
    }
}

fn cmd_run(a: RunArgs, io: &mut Io) -> Outcome {
    let protocol = protocols::build(&a.protocol, a.k)?;
    let seed = io.seed(a.seed);
    let max_steps = a.max_steps.unwrap_or_else(|| runner::default_max_steps(&protocol, a.n));
    let (record, config) = runner::run_with_config(&protocol, a.n, seed, max_steps)?;
    if let Some(p) = &a.snapshot {
        fs::write(p, snapshot::render(&config, protocol.name(), protocol.k()))
            .map_err(|e| Failure::Run(format!("writing {}: {e}", p.display())))?;
    }
    io.emit(a.out.as_deref(), &json(&record))?;
    if !record.stabilized {
        return Err(Failure::Run(format!("no stabilization within {max_steps} steps")));
    }
    Ok(())
}

fn sweep_spec(a: &SweepArgs, io: &mut Io) -> std::result::Result<SweepSpec, Failure> {
    if let Some(path) = &a.config {
        let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("reading {}: {e}", path.display())))?;
        return Ok(SweepSpec::parse_config(&text)?);
    }
    let n_grid = match (&a.n_list, a.per_octave) {
        (Some(list), _) => list.clone(),
        (None, Some(per)) if per > 0 => experiments::geometric_grid(a.n_min, a.n_max, per),
        (None, Some(_)) => return Err(Failure::Usage("--per-octave must be positive".into())),
        (None, None) if a.n_step > 0 => experiments::linear_grid(a.n_min, a.n_step, a.n_max),
        (None, None) => return Err(Failure::Usage("--n-step must be positive".into())),
    };
    let spec = SweepSpec {
        protocol: a.protocol.clone(),
        k_schedule: a.k_schedule.parse::<KSchedule>()?,
        n_grid,
        reps: a.reps,
        base_seed: io.seed(a.seed),
        max_steps: a.max_steps.parse::<MaxSteps>()?,
    };
    spec.validate()?;
    Ok(spec)
}

fn cmd_sweep(a: SweepArgs, io: &mut Io) -> Outcome {
    let spec = sweep_spec(&a, io)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Failure::Run(e.to_string()))?;
    let result = pool.install(|| experiments::sweep_running_time(&spec))?;
    io.emit(a.out.as_deref(), &result.runs_csv(a.timing))?;
    let agg_path = a.agg_out.clone().or_else(|| a.out.as_ref().map(|p| p.with_extension("agg.csv")));
    if let Some(p) = agg_path {
        io.emit(Some(&p), &result.aggregate_csv())?;
    }
    let points = result.growth_points();
    if let Ok(report) = experiments::classify_growth(&points) {
        io.note(&format!("growth: {}", serde_json::to_string(&report).expect("plain data")));
    }
    let failures = result.failures();
    io.note(&format!("{} runs, {failures} failed", result.cells.len()));
    if failures > 0 {
        return Err(Failure::Run(format!("{failures} run(s) did not stabilize")));
    }
    Ok(())
}

fn cmd_degrees(a: DegreesArgs, io: &mut Io) -> Outcome {
    let seed = io.seed(a.seed);
    let every = a.record_every.unwrap_or_else(|| experiments::default_record_every(a.n));
    let trace = experiments::degree_trace(a.n, a.k, seed, every)?;
    io.emit(a.out.as_deref(), &trace.csv())?;
    io.note(&format!("fraction at degree k-1 at half time: {:.4}", trace.fraction_at(0.5, 3)));
    if !trace.stabilized {
        return Err(Failure::Run(format!("no stabilization within {} steps", trace.steps)));
    }
    Ok(())
}

fn cmd_oracle(a: OracleArgs, io: &mut Io) -> Outcome {
    let seed = io.seed(a.seed);
    let result = oracle::check_restricted_process(a.n, a.reps, seed)?;
    io.emit(a.out.as_deref(), &json(&result))
}

#[derive(Serialize)]
struct Validation {
    protocol: String,
    stable: bool,
    in_language: bool,
    invariant_error: Option<String>,
    #[serde(flatten)]
    report: StabilityReport,
}

fn cmd_validate(a: ValidateArgs, io: &mut Io) -> Outcome {
    let text = fs::read_to_string(&a.snapshot)
        .map_err(|e| Failure::Usage(format!("reading {}: {e}", a.snapshot.display())))?;
    let snap = snapshot::parse(&text)?;
    let protocol = protocols::build(&snap.protocol, Some(snap.k))?;
    let strategy = protocols::strategy_for(&protocol)?;
    let config = &snap.config;
    let stable = strategy.is_stable(config, protocol.k());
    let mut invariant_error = strategy.check_invariants(config, protocol.k()).err().map(|e| e.to_string());
    let report = if protocol.kind() == crate::model::ProtocolKind::CrossEdgesTree && stable && config.n() > 3 {
        validators::stability_invariants(config, protocol.k()).unwrap_or_else(|e| {
            invariant_error.get_or_insert(e.to_string());
            validators::stability_report(config, protocol.k())
        })
    } else {
        validators::stability_report(config, protocol.k())
    };
    let in_language = stable && strategy.in_language(&config.output_graph(&protocol), protocol.k());
    let v = Validation { protocol: snap.protocol.clone(), stable, in_language, invariant_error, report };
    io.emit(a.out.as_deref(), &json(&v))?;
    if !stable {
        return Err(Failure::Run("snapshot is not stable".into()));
    }
    if let Some(e) = &v.invariant_error {
        return Err(Failure::Run(e.clone()));
    }
    Ok(())
}
