use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{HarnessError, TrialContext, TrialPlan};
use crate::optimizers::Algorithm;
use crate::seed::{trial_rng, Stream};

pub const COMPLEXITY_NOTE: &str = "O(T·K·N): every algorithm spends T·K evaluations, each an O(N) inner product";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub algo: Algorithm,
    /// Mean wall-clock seconds per full optimizer run.
    pub mean_seconds: f64,
    pub runs: usize,
}

/// Times whole optimizer runs, sequentially, for every `(N, algorithm)` in
/// the plan. Channel draws are outside the timed region. Within a trial the
/// algorithms run back to back on the same channel, after one untimed
/// warm-up run each, so load spikes and cold caches do not land on one
/// algorithm only. A plan with zero trials yields an empty report.
pub fn wallclock_report(plan: &TrialPlan) -> Result<Vec<TimingRow>, HarnessError> {
    if plan.trials == 0 {
        return Ok(Vec::new());
    }
    plan.validate()?;
    let mut rows = Vec::new();
    for &n in &plan.n_values {
        let ctx = TrialContext::new(&plan.scenario.with_elements(n), plan.master_seed)?;
        let specs: Vec<_> = plan
            .algorithms
            .iter()
            .filter_map(|&algo| ctx.scenario.optimizer_spec(algo).map(|spec| (algo, spec)))
            .collect();
        let mut totals = vec![0.0; specs.len()];
        for trial in 0..plan.trials {
            let channel = ctx.draw_channel(trial);
            for (i, (algo, spec)) in specs.iter().enumerate() {
                let run = || {
                    let obj = ctx.objective(&channel, trial)?;
                    let mut rng = trial_rng(plan.master_seed, trial as u64, Stream::Optimizer);
                    let start = Instant::now();
                    spec.run(&*obj, &mut rng)
                        .map_err(|source| HarnessError::Optimizer { trial, algorithm: *algo, n, source })?;
                    Ok::<f64, HarnessError>(start.elapsed().as_secs_f64())
                };
                if trial == 0 {
                    run()?;
                }
                totals[i] += run()?;
            }
        }
        for ((algo, _), total) in specs.iter().zip(totals) {
            rows.push(TimingRow { n, algo: *algo, mean_seconds: total / plan.trials as f64, runs: plan.trials });
        }
    }
    Ok(rows)
}
