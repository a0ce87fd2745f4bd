//! Binary-configuration optimizers that talk to the world only through
//! [`Objective`].
//!
//! * [`ce_optimize`]: the cross-entropy method over independent Bernoulli
//!   policies, the main algorithm.
//! * [`sa_optimize`], [`mh_optimize`]: single-bit-flip simulated annealing and
//!   constant-temperature Metropolis–Hastings benchmarks.
//! * [`random_search`], [`exhaustive`]: a sanity baseline and a ground-truth
//!   oracle for small surfaces.
//!
//! Every run records an [`OptimizerTrace`] with one entry per evaluation.

mod anneal;
mod baseline;
mod ce;
mod trace;

pub use anneal::{acceptance_probability, mh_optimize, sa_optimize, MhParams, SaParams};
pub use baseline::{exhaustive, random_search, EXHAUSTIVE_MAX_ELEMENTS};
pub use ce::{binarize, ce_optimize, ce_sample, ce_update, elite_count, select_elite, BernoulliPolicy, CeParams};
pub use trace::{OptimizerTrace, TraceEntry};

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::configuration::RisConfiguration;
use crate::objective::{Objective, ObjectiveError};

#[derive(Debug, Error)]
pub enum OptimizerError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("exhaustive search refused for N = {n} (limit {max})")]
    TooLarge { n: usize, max: usize },
    #[error("evaluation budget exceeded: {used} > {budget}")]
    BudgetExceeded { used: u64, budget: u64 },
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TerminationReason {
    /// The cross-entropy policy became binary.
    Converged,
    /// The evaluation budget ran out.
    BudgetExhausted,
    /// Cross-entropy reached its last iteration and thresholded the policy.
    PostProcessed,
}

/// Algorithm identifiers used by scenario files, the harness and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "ce")]
    CrossEntropy,
    #[serde(rename = "sa")]
    SimulatedAnnealing,
    #[serde(rename = "mh")]
    MetropolisHastings,
    #[serde(rename = "random")]
    RandomSearch,
    #[serde(rename = "exhaustive")]
    Exhaustive,
    /// Direct link only, the lower bound.
    #[serde(rename = "none")]
    NoRis,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::CrossEntropy,
        Algorithm::SimulatedAnnealing,
        Algorithm::MetropolisHastings,
        Algorithm::RandomSearch,
        Algorithm::Exhaustive,
        Algorithm::NoRis,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Algorithm::CrossEntropy => "ce",
            Algorithm::SimulatedAnnealing => "sa",
            Algorithm::MetropolisHastings => "mh",
            Algorithm::RandomSearch => "random",
            Algorithm::Exhaustive => "exhaustive",
            Algorithm::NoRis => "none",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.id() == s)
            .ok_or_else(|| format!("unknown algorithm `{s}` (expected one of ce, sa, mh, random, exhaustive, none)"))
    }
}

/// A fully parameterized optimizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OptimizerSpec {
    CrossEntropy(CeParams),
    SimulatedAnnealing(SaParams),
    MetropolisHastings(MhParams),
    RandomSearch { iters: usize },
    Exhaustive,
}

impl OptimizerSpec {
    pub fn algorithm(&self) -> Algorithm {
        match self {
            OptimizerSpec::CrossEntropy(_) => Algorithm::CrossEntropy,
            OptimizerSpec::SimulatedAnnealing(_) => Algorithm::SimulatedAnnealing,
            OptimizerSpec::MetropolisHastings(_) => Algorithm::MetropolisHastings,
            OptimizerSpec::RandomSearch { .. } => Algorithm::RandomSearch,
            OptimizerSpec::Exhaustive => Algorithm::Exhaustive,
        }
    }

    pub fn run<O, R>(&self, obj: &O, rng: &mut R) -> Result<OptimizerResult, OptimizerError>
    where
        O: Objective + ?Sized,
        R: Rng + ?Sized,
    {
        match self {
            OptimizerSpec::CrossEntropy(p) => ce_optimize(obj, p, rng),
            OptimizerSpec::SimulatedAnnealing(p) => sa_optimize(obj, p, rng),
            OptimizerSpec::MetropolisHastings(p) => mh_optimize(obj, p, rng),
            OptimizerSpec::RandomSearch { iters } => random_search(obj, *iters, rng),
            OptimizerSpec::Exhaustive => exhaustive(obj),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerResult {
    pub algorithm: Algorithm,
    /// Best configuration ever evaluated.
    pub best_config: RisConfiguration,
    pub best_snr_db: f64,
    /// What the algorithm hands back. For cross-entropy this is the
    /// thresholded final policy; for the others it equals `best_config`.
    pub returned_config: RisConfiguration,
    pub returned_snr_db: f64,
    pub evaluations: u64,
    pub termination: TerminationReason,
    pub trace: OptimizerTrace,
}

/// Evaluates through the objective while keeping the trace, the best-so-far
/// and the budget.
pub(crate) struct Tracker<'a, O: ?Sized> {
    obj: &'a O,
    budget: u64,
    trace: OptimizerTrace,
    best: Option<(RisConfiguration, f64)>,
}

impl<'a, O: Objective + ?Sized> Tracker<'a, O> {
    pub(crate) fn new(obj: &'a O, budget: u64) -> Self {
        Self { obj, budget, trace: OptimizerTrace::default(), best: None }
    }

    pub(crate) fn evaluate(&mut self, x: &RisConfiguration) -> Result<f64, OptimizerError> {
        let used = self.trace.len() as u64 + 1;
        if used > self.budget {
            return Err(OptimizerError::BudgetExceeded { used, budget: self.budget });
        }
        let snr = self.obj.evaluate(x)?;
        let improved = self.best.as_ref().is_none_or(|(_, b)| snr > *b);
        if improved {
            self.best = Some((x.clone(), snr));
        }
        let best_db = self.best.as_ref().map(|(_, b)| *b).unwrap_or(snr);
        self.trace.push(TraceEntry {
            eval_idx: used - 1,
            config_hex: x.to_hex(),
            snr_db: snr,
            best_db,
            state_db: None,
        });
        Ok(snr)
    }

    pub(crate) fn set_state(&mut self, state_db: f64) {
        if let Some(last) = self.trace.entries.last_mut() {
            last.state_db = Some(state_db);
        }
    }

    pub(crate) fn push_policy(&mut self, p: &BernoulliPolicy) {
        self.trace.policies.push(p.clone());
    }

    /// Reading of an already evaluated configuration, if any.
    pub(crate) fn lookup(&self, x: &RisConfiguration) -> Option<f64> {
        let hex = x.to_hex();
        self.trace.entries.iter().find(|e| e.config_hex == hex).map(|e| e.snr_db)
    }

    pub(crate) fn evaluations(&self) -> u64 {
        self.trace.len() as u64
    }

    pub(crate) fn finish(
        self,
        algorithm: Algorithm,
        returned: Option<(RisConfiguration, f64)>,
        termination: TerminationReason,
    ) -> OptimizerResult {
        let (best_config, best_snr_db) = self.best.expect("at least one evaluation");
        let (returned_config, returned_snr_db) = returned.unwrap_or_else(|| (best_config.clone(), best_snr_db));
        OptimizerResult {
            algorithm,
            best_config,
            best_snr_db,
            returned_config,
            returned_snr_db,
            evaluations: self.trace.len() as u64,
            termination,
            trace: self.trace,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_ids_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.id().parse::<Algorithm>().unwrap(), a);
        }
        assert!("cem".parse::<Algorithm>().is_err());
    }
}
