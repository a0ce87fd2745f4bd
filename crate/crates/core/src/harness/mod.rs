//! Repeated-trial experiments: per-trial optimization, statistics over
//! trials, iteration and element-count sweeps, export and timing.
//!
//! Trial `r` draws its channel from the `(master seed, r)` channel substream
//! and runs its optimizer from the matching optimizer substream, so every
//! algorithm in a comparison sees the same channel at trial `r`. Trials run
//! on the rayon pool and are reduced in trial order.

mod export;
mod oracle;
mod stats;
mod sweep;
mod timing;

use std::path::PathBuf;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

pub use export::{ExportFormat, Metadata, ARTIFACT_VERSION};
pub use oracle::{oracle_check, OracleReport, OracleSeed};
pub use stats::{linear_mean_db, nearest_rank, quantile_sorted, statistics, CurveKind, ReferenceCurve, TrialStatistics};
pub use sweep::{remeasure_elements, sweep_elements, sweep_iterations, ElementRow, ElementTable, IterationRow, IterationTable};
pub use timing::{wallclock_report, TimingRow, COMPLEXITY_NOTE};

use crate::channel::{ChannelModel, ChannelRealization};
use crate::configuration::RisConfiguration;
use crate::objective::{NoisyObjective, Objective, ObjectiveError, RecordedObjective, RecordedTable, SimulatedObjective};
use crate::optimizers::{Algorithm, OptimizerError, OptimizerResult};
use crate::scenario::{EvaluatorSource, Scenario, ScenarioError};
use crate::seed::{trial_rng, Stream};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("trial {trial} ({algorithm}, N = {n}): {source}")]
    Optimizer {
        trial: usize,
        algorithm: Algorithm,
        n: usize,
        #[source]
        source: OptimizerError,
    },
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
    #[error("statistics need at least one sample")]
    EmptySample,
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

/// What to run: a resolved scenario, the algorithms to compare, surface
/// sizes and the trial count.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialPlan {
    pub scenario: Scenario,
    pub algorithms: Vec<Algorithm>,
    /// Element counts for [`sweep_elements`] and [`wallclock_report`].
    pub n_values: Vec<usize>,
    pub trials: usize,
    pub master_seed: u64,
}

impl TrialPlan {
    /// Plan from the scenario's `[optimizer]` and `[run]` sections.
    pub fn from_scenario(scenario: &Scenario) -> Self {
        let scenario = scenario.resolved();
        Self {
            algorithms: scenario.optimizer.algorithms.clone(),
            n_values: scenario.run.n_values.clone(),
            trials: scenario.run.trials,
            master_seed: scenario.run.seed,
            scenario,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        self.scenario.validate()?;
        if self.trials == 0 {
            return Err(HarnessError::InvalidPlan("trial count must be >= 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(HarnessError::InvalidPlan("no algorithms selected".into()));
        }
        if self.n_values.is_empty() {
            return Err(HarnessError::InvalidPlan("N list is empty".into()));
        }
        if self.n_values.contains(&0) || self.n_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(HarnessError::InvalidPlan("N values must be positive and strictly ascending".into()));
        }
        Ok(())
    }

    /// Surface size used by [`sweep_iterations`]: the scenario's own `N`.
    pub fn elements(&self) -> usize {
        self.scenario.ris.elements
    }
}

/// One optimized trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub trial: usize,
    pub algorithm: Algorithm,
    pub n: usize,
    /// Noise-free SNR of the returned configuration; the direct-link SNR for
    /// the no-RIS baseline.
    pub achieved_snr_db: f64,
    /// Objective calls as counted by the evaluator.
    pub evaluations: u64,
    /// `None` for the no-RIS baseline.
    pub result: Option<OptimizerResult>,
}

impl TrialOutcome {
    /// Best-so-far after `evals` evaluations; constant for the baseline.
    pub fn best_at(&self, evals: u64) -> f64 {
        self.result
            .as_ref()
            .and_then(|r| r.trace.best_at(evals))
            .unwrap_or(self.achieved_snr_db)
    }
}

/// Per-plan state shared by every trial at one surface size.
pub(crate) struct TrialContext {
    scenario: Scenario,
    model: ChannelModel,
    table: Option<Arc<RecordedTable>>,
    master_seed: u64,
}

impl TrialContext {
    pub(crate) fn new(scenario: &Scenario, master_seed: u64) -> Result<Self, HarnessError> {
        let scenario = scenario.resolved();
        let model = scenario.channel_model()?;
        let table = match &scenario.evaluator.source {
            EvaluatorSource::Simulated => None,
            EvaluatorSource::Recorded(path) => {
                let table = RecordedTable::read_csv(path)?;
                if let Some(dim) = table.dimension() {
                    if dim != scenario.ris.elements {
                        return Err(HarnessError::InvalidPlan(format!(
                            "recorded table has N = {dim} but the scenario uses N = {}",
                            scenario.ris.elements
                        )));
                    }
                }
                Some(Arc::new(table))
            }
        };
        Ok(Self { scenario, model, table, master_seed })
    }

    pub(crate) fn n(&self) -> usize {
        self.scenario.ris.elements
    }

    pub(crate) fn draw_channel(&self, trial: usize) -> ChannelRealization {
        self.model.draw(&mut trial_rng(self.master_seed, trial as u64, Stream::Channel))
    }

    /// The objective an optimizer sees at `trial`, measurement noise included.
    pub(crate) fn objective(&self, channel: &ChannelRealization, trial: usize) -> Result<Box<dyn Objective>, HarnessError> {
        let clean: Box<dyn Objective> = match &self.table {
            None => Box::new(SimulatedObjective::new(channel.clone())),
            Some(table) => Box::new(RecordedObjective::new(Arc::clone(table))?),
        };
        self.with_noise(clean, trial)
    }

    pub(crate) fn with_noise(&self, clean: Box<dyn Objective>, trial: usize) -> Result<Box<dyn Objective>, HarnessError> {
        let std_db = self.scenario.evaluator.noise_std_db;
        if std_db == 0.0 {
            return Ok(clean);
        }
        let rng = trial_rng(self.master_seed, trial as u64, Stream::Noise);
        Ok(Box::new(NoisyObjective::new(clean, std_db, rng)?))
    }

    /// Noise-free reading of `x`.
    pub(crate) fn truth(&self, channel: &ChannelRealization, x: &RisConfiguration) -> Result<f64, HarnessError> {
        match &self.table {
            None => Ok(channel.snr_db(x).map_err(ObjectiveError::Channel)?),
            Some(table) => table
                .get(x)
                .ok_or_else(|| HarnessError::Objective(ObjectiveError::MissingRecord(x.to_bit_string()))),
        }
    }

    pub(crate) fn run_one(&self, algorithm: Algorithm, trial: usize) -> Result<TrialOutcome, HarnessError> {
        let channel = self.draw_channel(trial);
        let Some(spec) = self.scenario.optimizer_spec(algorithm) else {
            let direct = channel.without_ris();
            let snr = direct.snr_db(&RisConfiguration::zeros(0)).map_err(ObjectiveError::Channel)?;
            return Ok(TrialOutcome {
                trial,
                algorithm,
                n: self.n(),
                achieved_snr_db: snr,
                evaluations: 0,
                result: None,
            });
        };
        let obj = self.objective(&channel, trial)?;
        let mut rng = trial_rng(self.master_seed, trial as u64, Stream::Optimizer);
        let result = spec.run(&*obj, &mut rng).map_err(|source| HarnessError::Optimizer {
            trial,
            algorithm,
            n: self.n(),
            source,
        })?;
        let achieved_snr_db = self.truth(&channel, &result.returned_config)?;
        Ok(TrialOutcome {
            trial,
            algorithm,
            n: self.n(),
            achieved_snr_db,
            evaluations: obj.evaluation_count(),
            result: Some(result),
        })
    }

    /// Runs every trial in parallel and maps each outcome through `reduce`,
    /// returning results in trial order. The first failing trial (by index)
    /// wins.
    pub(crate) fn map_trials<T, F>(&self, algorithm: Algorithm, trials: usize, reduce: F) -> Result<Vec<T>, HarnessError>
    where
        T: Send,
        F: Fn(TrialOutcome) -> T + Sync,
    {
        let results: Vec<Result<T, HarnessError>> = (0..trials)
            .into_par_iter()
            .map(|r| self.run_one(algorithm, r).map(&reduce))
            .collect();
        results.into_iter().collect()
    }
}

/// Runs `plan.trials` independent trials of `algorithm` at `N = n`.
pub fn run_trials(plan: &TrialPlan, algorithm: Algorithm, n: usize) -> Result<Vec<TrialOutcome>, HarnessError> {
    plan.validate()?;
    let ctx = TrialContext::new(&plan.scenario.with_elements(n), plan.master_seed)?;
    ctx.map_trials(algorithm, plan.trials, |o| o)
}

/// The configuration returned at trial 0, read `repeats` more times through
/// the (noisy) evaluator. For the no-RIS baseline the direct link is read.
#[derive(Debug, Clone, PartialEq)]
pub struct Remeasurement {
    pub result: Option<OptimizerResult>,
    pub samples_db: Vec<f64>,
    pub statistics: TrialStatistics,
}

pub fn remeasure(scenario: &Scenario, algorithm: Algorithm, repeats: usize) -> Result<Remeasurement, HarnessError> {
    if repeats == 0 {
        return Err(HarnessError::InvalidPlan("remeasure count must be >= 1".into()));
    }
    let scenario = scenario.resolved();
    let ctx = TrialContext::new(&scenario, scenario.run.seed)?;
    let channel = ctx.draw_channel(0);
    let (obj, config, result) = match scenario.optimizer_spec(algorithm) {
        None => {
            let direct: Box<dyn Objective> = Box::new(SimulatedObjective::new(channel.without_ris()));
            (ctx.with_noise(direct, 0)?, RisConfiguration::zeros(0), None)
        }
        Some(spec) => {
            let obj = ctx.objective(&channel, 0)?;
            let mut rng = trial_rng(scenario.run.seed, 0, Stream::Optimizer);
            let result = spec
                .run(&*obj, &mut rng)
                .map_err(|source| HarnessError::Optimizer { trial: 0, algorithm, n: ctx.n(), source })?;
            (obj, result.returned_config.clone(), Some(result))
        }
    };
    let samples_db = (0..repeats).map(|_| obj.evaluate(&config)).collect::<Result<Vec<_>, _>>()?;
    let statistics = statistics(&samples_db)?;
    Ok(Remeasurement { result, samples_db, statistics })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_plan(n: usize, trials: usize) -> TrialPlan {
        let mut s = Scenario::default();
        s.optimizer.t = 3;
        s.optimizer.k = 20;
        s.run.trials = trials;
        s.run.n_values = vec![n];
        TrialPlan::from_scenario(&s.with_elements(n))
    }

    #[test]
    fn repeated_runs_are_identical() {
        let plan = small_plan(8, 1);
        let a = run_trials(&plan, Algorithm::CrossEntropy, 8).unwrap();
        let b = run_trials(&plan, Algorithm::CrossEntropy, 8).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn baseline_has_no_optimizer() {
        let plan = small_plan(8, 5);
        let out = run_trials(&plan, Algorithm::NoRis, 8).unwrap();
        assert_eq!(out.len(), 5);
        assert!(out.iter().all(|o| o.result.is_none() && o.evaluations == 0));
        assert_ne!(out[0].achieved_snr_db, out[1].achieved_snr_db);
    }

    #[test]
    fn algorithms_share_channels_and_first_sample() {
        let plan = small_plan(10, 4);
        let ce = run_trials(&plan, Algorithm::CrossEntropy, 10).unwrap();
        let sa = run_trials(&plan, Algorithm::SimulatedAnnealing, 10).unwrap();
        for (a, b) in ce.iter().zip(&sa) {
            assert_eq!(a.best_at(0), b.best_at(0));
        }
    }

    #[test]
    fn budgets_are_exact() {
        let plan = small_plan(10, 3);
        for alg in [Algorithm::SimulatedAnnealing, Algorithm::MetropolisHastings, Algorithm::RandomSearch] {
            for o in run_trials(&plan, alg, 10).unwrap() {
                assert_eq!(o.evaluations, 60);
            }
        }
        for o in run_trials(&plan, Algorithm::CrossEntropy, 10).unwrap() {
            assert!(o.evaluations <= 61);
        }
    }

    #[test]
    fn optimizer_errors_carry_the_trial() {
        let plan = small_plan(30, 2);
        let err = run_trials(&plan, Algorithm::Exhaustive, 30).unwrap_err();
        assert!(matches!(err, HarnessError::Optimizer { trial: 0, n: 30, .. }), "{err}");
    }

    #[test]
    fn remeasure_spreads_with_noise() {
        let mut s = small_plan(8, 1).scenario;
        s.evaluator.noise_std_db = 1.0;
        let r = remeasure(&s, Algorithm::NoRis, 200).unwrap();
        assert!(r.result.is_none());
        assert!(r.statistics.quantile_gap_db() > 1.0);
    }

    #[test]
    fn remeasure_without_noise_is_constant() {
        let mut s = small_plan(8, 1).scenario;
        s.evaluator.noise_std_db = 0.0;
        let r = remeasure(&s, Algorithm::CrossEntropy, 5).unwrap();
        assert_eq!(r.samples_db.len(), 5);
        assert_eq!(r.statistics.ratio, 0.0);
        assert_eq!(r.samples_db[0], r.result.unwrap().returned_snr_db);
    }
}
