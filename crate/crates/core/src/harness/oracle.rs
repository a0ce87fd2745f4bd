use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{HarnessError, TrialContext};
use crate::objective::SimulatedObjective;
use crate::optimizers::{exhaustive, Algorithm, OptimizerSpec};
use crate::scenario::Scenario;
use crate::seed::{trial_rng, Stream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSeed {
    pub seed: u64,
    /// Noise-free SNR of the cross-entropy return.
    pub ce_db: f64,
    /// Optimum minus `ce_db`.
    pub gap_db: f64,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub n: usize,
    pub threshold_db: f64,
    pub optimum_db: f64,
    pub seeds: Vec<OracleSeed>,
    pub success_fraction: f64,
}

/// Cross-entropy against the exhaustive optimum on one fixed channel (trial
/// 0 of the scenario seed). Seed `s` runs cross-entropy from the optimizer
/// substream of trial `s`. Success means the returned configuration is
/// within `threshold_db` of the optimum.
pub fn oracle_check(scenario: &Scenario, seeds: u64, threshold_db: f64) -> Result<OracleReport, HarnessError> {
    if seeds == 0 {
        return Err(HarnessError::InvalidPlan("oracle check needs at least one seed".into()));
    }
    let scenario = scenario.resolved();
    let master = scenario.run.seed;
    let ctx = TrialContext::new(&scenario, master)?;
    let n = ctx.n();
    let channel = ctx.draw_channel(0);
    let oracle = exhaustive(&SimulatedObjective::new(channel.clone()))
        .map_err(|source| HarnessError::Optimizer { trial: 0, algorithm: Algorithm::Exhaustive, n, source })?;
    let optimum_db = oracle.best_snr_db;
    let spec = OptimizerSpec::CrossEntropy(scenario.ce_params());

    let per_seed: Vec<Result<OracleSeed, HarnessError>> = (0..seeds)
        .into_par_iter()
        .map(|seed| {
            let obj = ctx.objective(&channel, seed as usize)?;
            let mut rng = trial_rng(master, seed, Stream::Optimizer);
            let res = spec.run(&*obj, &mut rng).map_err(|source| HarnessError::Optimizer {
                trial: seed as usize,
                algorithm: Algorithm::CrossEntropy,
                n,
                source,
            })?;
            let ce_db = ctx.truth(&channel, &res.returned_config)?;
            let gap_db = optimum_db - ce_db;
            Ok(OracleSeed { seed, ce_db, gap_db, success: gap_db <= threshold_db })
        })
        .collect();
    let seeds_out = per_seed.into_iter().collect::<Result<Vec<_>, _>>()?;
    let hits = seeds_out.iter().filter(|s| s.success).count();
    Ok(OracleReport {
        n,
        threshold_db,
        optimum_db,
        success_fraction: hits as f64 / seeds_out.len() as f64,
        seeds: seeds_out,
    })
}
