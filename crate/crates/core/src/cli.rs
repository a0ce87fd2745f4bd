//! Command-line front end.
//!
//! Every command resolves a scenario (built-in defaults, then the scenario
//! file, then flag overrides), prints the resolved TOML to the diagnostic
//! stream, and then runs. Exit status is 0 on success, 2 on usage errors and
//! 1 on runtime errors.
//!
//! Scenario paths that do not exist relative to the working directory are
//! looked up in `$RISLAB_SCENARIO_DIR`. Without `--scenario`,
//! `$RISLAB_SCENARIO_DIR/default.scn` is used when present, otherwise the
//! built-in defaults.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::harness::{
    oracle_check, remeasure, remeasure_elements, run_trials, sweep_elements, sweep_iterations, wallclock_report,
    ExportFormat, HarnessError, Metadata, TrialPlan, ARTIFACT_VERSION, COMPLEXITY_NOTE,
};
use crate::optimizers::Algorithm;
use crate::scenario::{EvaluatorSource, Scenario, ScenarioError};

pub const SCENARIO_DIR_ENV: &str = "RISLAB_SCENARIO_DIR";

/// Largest `N` the oracle check accepts without `--force`.
pub const ORACLE_MAX_ELEMENTS: usize = 16;

const BUILTIN_DEFAULT: &str = include_str!("../scenarios/default.scn");

#[derive(Debug, Parser)]
#[command(name = "rislab", version, about = "Binary RIS phase optimization laboratory")]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimize one channel realization and print the result and its trace.
    Run(RunArgs),
    /// Mean best-so-far SNR against evaluations spent.
    SweepIters(SweepArgs),
    /// SNR statistics and hardening ratio against the number of elements.
    SweepN(SweepNArgs),
    /// Cross-entropy against the exhaustive optimum on a small surface.
    OracleCheck(OracleArgs),
    /// Wall-clock time per optimizer run.
    Timing(SweepArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct ScenarioArgs {
    /// Scenario file (TOML).
    #[arg(long, value_name = "PATH")]
    pub scenario: Option<PathBuf>,
    /// Algorithms: ce, sa, mh, random, exhaustive, none.
    #[arg(long, value_delimiter = ',', value_name = "ALGO,...")]
    pub algo: Vec<Algorithm>,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of RIS elements (a list for sweep-n and timing).
    #[arg(long, value_delimiter = ',', value_name = "N,...")]
    pub n: Vec<usize>,
    /// Cross-entropy iterations.
    #[arg(long = "t", value_name = "T")]
    pub t: Option<usize>,
    /// Cross-entropy samples per iteration.
    #[arg(long = "k", value_name = "K")]
    pub k: Option<usize>,
    /// Elite fraction, in (0, 1].
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Iterations for sa, mh and random (default T·K).
    #[arg(long)]
    pub iters: Option<usize>,
    /// Initial annealing temperature, dB.
    #[arg(long = "t0", allow_negative_numbers = true)]
    pub t0: Option<f64>,
    /// Annealing cooling factor per step.
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Metropolis-Hastings temperature, dB.
    #[arg(long, allow_negative_numbers = true)]
    pub temp: Option<f64>,
    /// Independent channel trials.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Iteration-sweep checkpoints, in cross-entropy iterations.
    #[arg(long, value_delimiter = ',', value_name = "T,...")]
    pub checkpoints: Vec<usize>,
    /// Measurement noise standard deviation, dB.
    #[arg(long = "noise-std", allow_negative_numbers = true)]
    pub noise_std: Option<f64>,
    /// SNR source: `simulated` or `recorded:PATH`.
    #[arg(long)]
    pub evaluator: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "csv", value_parser = ["csv", "json"])]
    pub format: String,
}

impl OutputArgs {
    fn format(&self) -> ExportFormat {
        self.format.parse().expect("restricted by clap")
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Trace CSV destination; standard output when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Re-read the returned configuration R times through the evaluator.
    #[arg(long, value_name = "R")]
    pub remeasure: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepNArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Repeated-measurement reading: one optimization per (N, algorithm),
    /// re-read R times.
    #[arg(long, value_name = "R")]
    pub remeasure: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Cross-entropy seeds to try.
    #[arg(long, default_value_t = 100)]
    pub seeds: u64,
    /// Optimality threshold, dB.
    #[arg(long, default_value_t = 0.2)]
    pub threshold: f64,
    /// Success fraction needed to pass.
    #[arg(long = "min-fraction", default_value_t = 0.9)]
    pub min_fraction: f64,
    /// Allow N above the oracle guard.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match CliConfig::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return e.exit_code();
        }
    };
    match dispatch(&cli.command, out, err) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(CliError::Runtime(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn dispatch(cmd: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Run(a) => cmd_run(a, out, err),
        Command::SweepIters(a) => cmd_sweep_iters(a, out, err),
        Command::SweepN(a) => cmd_sweep_n(a, out, err),
        Command::OracleCheck(a) => cmd_oracle(a, out, err),
        Command::Timing(a) => cmd_timing(a, out, err),
    }
}

/// How a command reads `--n`.
#[derive(Clone, Copy, PartialEq)]
enum ElementsFlag {
    Single,
    List,
}

fn locate(path: &Path) -> Option<PathBuf> {
    if path.exists() {
        return Some(path.to_path_buf());
    }
    if path.is_relative() {
        if let Some(dir) = std::env::var_os(SCENARIO_DIR_ENV) {
            let candidate = Path::new(&dir).join(path);
            if candidate.exists() {
                return Some(candidate);
            }
        }
    }
    None
}

fn base_scenario(args: &ScenarioArgs) -> Result<Scenario, CliError> {
    let runtime = |e: ScenarioError| CliError::Runtime(e.to_string());
    match &args.scenario {
        Some(path) => match locate(path) {
            Some(found) => Scenario::load(&found).map_err(runtime),
            None if path.as_os_str() == "default.scn" => Scenario::from_toml_str(BUILTIN_DEFAULT).map_err(runtime),
            None => Err(CliError::Runtime(format!("cannot find scenario {}", path.display()))),
        },
        None => {
            let from_env = std::env::var_os(SCENARIO_DIR_ENV).map(|d| Path::new(&d).join("default.scn"));
            match from_env.filter(|p| p.exists()) {
                Some(p) => Scenario::load(&p).map_err(runtime),
                None => Ok(Scenario::default()),
            }
        }
    }
}

/// Applies one override and validates, so a failure names the flag.
fn apply(s: &mut Scenario, flag: &str, f: impl FnOnce(&mut Scenario)) -> Result<(), CliError> {
    f(s);
    s.validate().map_err(|e| CliError::Usage(format!("{flag}: {e}")))
}

/// Drops derived iteration counts and checkpoints so they follow a new
/// `T` or `K`.
fn forget_derived(s: &mut Scenario) {
    let (t, k) = (s.optimizer.t, s.optimizer.k);
    if s.optimizer.iters == Some(t * k) {
        s.optimizer.iters = None;
    }
    if s.run.checkpoints.as_deref() == Some(&(0..=t).collect::<Vec<_>>()[..]) {
        s.run.checkpoints = None;
    }
}

fn resolve_scenario(args: &ScenarioArgs, elements: ElementsFlag) -> Result<Scenario, CliError> {
    let mut s = base_scenario(args)?;
    s.validate().map_err(|e| CliError::Runtime(e.to_string()))?;
    if !args.algo.is_empty() {
        apply(&mut s, "--algo", |s| s.optimizer.algorithms = args.algo.clone())?;
    }
    if let Some(seed) = args.seed {
        apply(&mut s, "--seed", |s| s.run.seed = seed)?;
    }
    if !args.n.is_empty() {
        match elements {
            ElementsFlag::Single => {
                if args.n.len() != 1 {
                    return Err(CliError::Usage("--n: this command takes a single element count".into()));
                }
                apply(&mut s, "--n", |s| {
                    s.ris.elements = args.n[0];
                    s.ris.grid = None;
                })?;
            }
            ElementsFlag::List => apply(&mut s, "--n", |s| s.run.n_values = args.n.clone())?,
        }
    }
    if let Some(t) = args.t {
        apply(&mut s, "--t", |s| {
            forget_derived(s);
            s.optimizer.t = t;
        })?;
    }
    if let Some(k) = args.k {
        apply(&mut s, "--k", |s| {
            forget_derived(s);
            s.optimizer.k = k;
        })?;
    }
    if let Some(beta) = args.beta {
        apply(&mut s, "--beta", |s| s.optimizer.beta = beta)?;
    }
    if let Some(iters) = args.iters {
        apply(&mut s, "--iters", |s| s.optimizer.iters = Some(iters))?;
    }
    if let Some(t0) = args.t0 {
        apply(&mut s, "--t0", |s| s.optimizer.t0 = t0)?;
    }
    if let Some(gamma) = args.gamma {
        apply(&mut s, "--gamma", |s| s.optimizer.gamma = gamma)?;
    }
    if let Some(temp) = args.temp {
        apply(&mut s, "--temp", |s| s.optimizer.temp = temp)?;
    }
    if let Some(trials) = args.trials {
        apply(&mut s, "--trials", |s| s.run.trials = trials)?;
    }
    if !args.checkpoints.is_empty() {
        apply(&mut s, "--checkpoints", |s| s.run.checkpoints = Some(args.checkpoints.clone()))?;
    }
    if let Some(std) = args.noise_std {
        apply(&mut s, "--noise-std", |s| s.evaluator.noise_std_db = std)?;
    }
    if let Some(ev) = &args.evaluator {
        let source = EvaluatorSource::try_from(ev.clone()).map_err(|e| CliError::Usage(format!("--evaluator: {e}")))?;
        apply(&mut s, "--evaluator", |s| s.evaluator.source = source)?;
    }
    Ok(s.resolved())
}

fn print_scenario(s: &Scenario, err: &mut dyn Write) -> Result<(), CliError> {
    writeln!(err, "# resolved scenario, sha256 {}", s.hash_hex())?;
    err.write_all(s.to_toml_string().as_bytes())?;
    writeln!(err, "# end of scenario")?;
    Ok(())
}

fn emit(bytes: &[u8], path: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => {
            std::fs::write(p, bytes).map_err(|e| CliError::Runtime(format!("{}: {e}", p.display())))?;
            writeln!(out, "wrote {}", p.display())?;
        }
        None => out.write_all(bytes)?,
    }
    Ok(())
}

fn single_algorithm(s: &Scenario) -> Result<Algorithm, CliError> {
    match s.optimizer.algorithms.as_slice() {
        [a] => Ok(*a),
        _ => Err(CliError::Usage("--algo: run takes exactly one algorithm".into())),
    }
}

fn cmd_run(a: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let s = resolve_scenario(&a.scenario, ElementsFlag::Single)?;
    let algo = single_algorithm(&s)?;
    if a.remeasure == Some(0) {
        return Err(CliError::Usage("--remeasure: must be >= 1".into()));
    }
    print_scenario(&s, err)?;
    let mut plan = TrialPlan::from_scenario(&s);
    plan.trials = 1;
    plan.n_values = vec![s.ris.elements.max(1)];
    let outcome = run_trials(&plan, algo, s.ris.elements)?.remove(0);

    writeln!(out, "algorithm        {algo}")?;
    writeln!(out, "N                {}", s.ris.elements)?;
    writeln!(out, "seed             {}", s.run.seed)?;
    writeln!(out, "evaluations      {}", outcome.evaluations)?;
    writeln!(out, "achieved_snr_db  {:.4}", outcome.achieved_snr_db)?;
    if let Some(res) = &outcome.result {
        writeln!(out, "returned_snr_db  {:.4}", res.returned_snr_db)?;
        writeln!(out, "best_snr_db      {:.4}", res.best_snr_db)?;
        writeln!(out, "termination      {:?}", res.termination)?;
        writeln!(out, "returned_config  {}", res.returned_config.to_hex())?;
        writeln!(out, "best_config      {}", res.best_config.to_hex())?;
    }
    if let Some(r) = a.remeasure {
        let m = remeasure(&s, algo, r)?;
        let st = m.statistics;
        writeln!(out, "remeasured       {} reads: mean {:.4} dB, q10 {:.4} dB, q90 {:.4} dB, ratio {:.6}", st.count, st.mean_db, st.q10_db, st.q90_db, st.ratio)?;
    }
    if let Some(res) = &outcome.result {
        let meta = Metadata {
            kind: "trace".into(),
            scenario_hash: s.hash_hex(),
            master_seed: s.run.seed,
            artifact_version: ARTIFACT_VERSION.into(),
        };
        let mut bytes = meta.comment_line().into_bytes();
        bytes.push(b'\n');
        res.trace.write_csv(&mut bytes).map_err(|e| CliError::Runtime(e.to_string()))?;
        if a.out.is_none() {
            writeln!(out)?;
        }
        emit(&bytes, a.out.as_deref(), out)?;
    }
    Ok(())
}

fn cmd_sweep_iters(a: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let s = resolve_scenario(&a.scenario, ElementsFlag::Single)?;
    print_scenario(&s, err)?;
    let k = s.optimizer.k as u64;
    let checkpoints: Vec<u64> = s.checkpoints().iter().map(|&t| t as u64 * k).collect();
    let table = sweep_iterations(&TrialPlan::from_scenario(&s), &checkpoints)?;
    emit(&table.to_bytes(a.output.format()), a.output.out.as_deref(), out)
}

fn cmd_sweep_n(a: &SweepNArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let s = resolve_scenario(&a.scenario, ElementsFlag::List)?;
    if a.remeasure == Some(0) {
        return Err(CliError::Usage("--remeasure: must be >= 1".into()));
    }
    print_scenario(&s, err)?;
    let plan = TrialPlan::from_scenario(&s);
    let table = match a.remeasure {
        Some(r) => remeasure_elements(&plan, r)?,
        None => sweep_elements(&plan)?,
    };
    emit(&table.to_bytes(a.output.format()), a.output.out.as_deref(), out)
}

fn cmd_oracle(a: &OracleArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let mut args = a.scenario.clone();
    if args.n.is_empty() {
        args.n = vec![12];
    }
    let s = resolve_scenario(&args, ElementsFlag::Single)?;
    let n = s.ris.elements;
    if n > ORACLE_MAX_ELEMENTS && !a.force {
        return Err(CliError::Usage(format!(
            "--n: the oracle check enumerates 2^N configurations and is limited to N <= {ORACLE_MAX_ELEMENTS}; pass --force to override"
        )));
    }
    if a.threshold.is_nan() || a.threshold < 0.0 {
        return Err(CliError::Usage(format!("--threshold: must be >= 0, got {}", a.threshold)));
    }
    print_scenario(&s, err)?;
    let report = oracle_check(&s, a.seeds, a.threshold)?;
    let hits = report.seeds.iter().filter(|r| r.success).count();
    let worst = report.seeds.iter().map(|r| r.gap_db).fold(0.0, f64::max);
    let pass = report.success_fraction >= a.min_fraction;
    writeln!(out, "N                 {n}")?;
    writeln!(out, "optimum_snr_db    {:.4}", report.optimum_db)?;
    writeln!(out, "threshold_db      {}", report.threshold_db)?;
    writeln!(out, "successes         {hits}/{}", report.seeds.len())?;
    writeln!(out, "success_fraction  {:.4}", report.success_fraction)?;
    writeln!(out, "worst_gap_db      {worst:.4}")?;
    writeln!(out, "{} (needs >= {})", if pass { "PASS" } else { "FAIL" }, a.min_fraction)?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Runtime(format!("success fraction {:.4} below {}", report.success_fraction, a.min_fraction)))
    }
}

fn cmd_timing(a: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let mut args = a.scenario.clone();
    if args.trials.is_none() {
        args.trials = Some(10);
    }
    let mut s = resolve_scenario(&args, ElementsFlag::List)?;
    if a.scenario.n.is_empty() {
        s.run.n_values = vec![s.ris.elements];
        s = s.resolved();
    }
    print_scenario(&s, err)?;
    let rows = wallclock_report(&TrialPlan::from_scenario(&s))?;
    let bytes = match a.output.format() {
        ExportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &rows {
                w.serialize(r).map_err(|e| CliError::Runtime(e.to_string()))?;
            }
            w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))?
        }
        ExportFormat::Json => {
            let v = serde_json::json!({ "complexity": COMPLEXITY_NOTE, "rows": rows });
            let mut b = serde_json::to_vec_pretty(&v).map_err(|e| CliError::Runtime(e.to_string()))?;
            b.push(b'\n');
            b
        }
    };
    writeln!(err, "# {COMPLEXITY_NOTE}")?;
    emit(&bytes, a.output.out.as_deref(), out)
}
