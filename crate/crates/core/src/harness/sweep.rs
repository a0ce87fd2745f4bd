use serde::{Deserialize, Serialize};

use super::export::Metadata;
use super::stats::{linear_mean_db, statistics, CurveKind, ReferenceCurve};
use super::{remeasure, HarnessError, TrialContext, TrialPlan};
use crate::channel::db_to_linear;
use crate::optimizers::Algorithm;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRow {
    pub evals: u64,
    pub algo: Algorithm,
    pub mean_best_db: f64,
    pub n_trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTable {
    pub metadata: Metadata,
    pub rows: Vec<IterationRow>,
}

impl IterationTable {
    pub fn rows_for(&self, algo: Algorithm) -> impl Iterator<Item = &IterationRow> {
        self.rows.iter().filter(move |r| r.algo == algo)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub algo: Algorithm,
    pub mean_db: f64,
    pub q10_db: f64,
    pub q90_db: f64,
    pub ratio: f64,
    pub n_trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementTable {
    pub metadata: Metadata,
    pub rows: Vec<ElementRow>,
    /// N² mean curve and scaled 1/N ratio curve, anchored at the largest N's
    /// cross-entropy row. Empty when cross-entropy is not in the plan.
    pub reference_curves: Vec<ReferenceCurve>,
}

impl ElementTable {
    pub fn row(&self, n: usize, algo: Algorithm) -> Option<&ElementRow> {
        self.rows.iter().find(|r| r.n == n && r.algo == algo)
    }

    pub fn curve(&self, kind: CurveKind) -> Option<&ReferenceCurve> {
        self.reference_curves.iter().find(|c| c.kind == kind)
    }
}

/// Mean best-so-far SNR after each checkpoint (in evaluations), at the
/// scenario's own `N`, for every algorithm in the plan.
pub fn sweep_iterations(plan: &TrialPlan, checkpoints: &[u64]) -> Result<IterationTable, HarnessError> {
    plan.validate()?;
    let budget = plan.scenario.optimizer.t as u64 * plan.scenario.optimizer.k as u64;
    let budget = budget.max(plan.scenario.local_iters() as u64);
    if let Some(bad) = checkpoints.iter().find(|&&c| c > budget) {
        return Err(HarnessError::InvalidPlan(format!("checkpoint {bad} exceeds the budget of {budget} evaluations")));
    }
    let ctx = TrialContext::new(&plan.scenario, plan.master_seed)?;
    let mut rows = Vec::with_capacity(plan.algorithms.len() * checkpoints.len());
    for &algo in &plan.algorithms {
        let per_trial = ctx.map_trials(algo, plan.trials, |o| checkpoints.iter().map(|&c| o.best_at(c)).collect::<Vec<_>>())?;
        for (j, &evals) in checkpoints.iter().enumerate() {
            let column: Vec<f64> = per_trial.iter().map(|v| v[j]).collect();
            rows.push(IterationRow { evals, algo, mean_best_db: linear_mean_db(&column), n_trials: column.len() });
        }
    }
    Ok(IterationTable { metadata: Metadata::new("sweep_iterations", plan), rows })
}

/// Statistics of the achieved SNR over all trials, per `(N, algorithm)`.
pub fn sweep_elements(plan: &TrialPlan) -> Result<ElementTable, HarnessError> {
    plan.validate()?;
    let mut rows = Vec::with_capacity(plan.n_values.len() * plan.algorithms.len());
    for &n in &plan.n_values {
        let ctx = TrialContext::new(&plan.scenario.with_elements(n), plan.master_seed)?;
        for &algo in &plan.algorithms {
            let snr = ctx.map_trials(algo, plan.trials, |o| o.achieved_snr_db)?;
            let s = statistics(&snr)?;
            rows.push(ElementRow {
                n,
                algo,
                mean_db: s.mean_db,
                q10_db: s.q10_db,
                q90_db: s.q90_db,
                ratio: s.ratio,
                n_trials: s.count,
            });
        }
    }
    let reference_curves = anchored_curves(&rows, *plan.n_values.last().expect("validated nonempty"));
    Ok(ElementTable { metadata: Metadata::new("sweep_elements", plan), rows, reference_curves })
}

/// Element sweep under the repeated-measurement reading: per `(N,
/// algorithm)`, one optimization at trial 0 whose returned configuration is
/// read `repeats` times through the noisy evaluator.
pub fn remeasure_elements(plan: &TrialPlan, repeats: usize) -> Result<ElementTable, HarnessError> {
    plan.validate()?;
    let mut base = plan.scenario.clone();
    base.run.seed = plan.master_seed;
    let mut rows = Vec::with_capacity(plan.n_values.len() * plan.algorithms.len());
    for &n in &plan.n_values {
        let scenario = base.with_elements(n);
        for &algo in &plan.algorithms {
            let s = remeasure(&scenario, algo, repeats)?.statistics;
            rows.push(ElementRow {
                n,
                algo,
                mean_db: s.mean_db,
                q10_db: s.q10_db,
                q90_db: s.q90_db,
                ratio: s.ratio,
                n_trials: s.count,
            });
        }
    }
    let reference_curves = anchored_curves(&rows, *plan.n_values.last().expect("validated nonempty"));
    Ok(ElementTable { metadata: Metadata::new("sweep_elements_remeasured", plan), rows, reference_curves })
}

pub(crate) fn anchored_curves(rows: &[ElementRow], anchor_n: usize) -> Vec<ReferenceCurve> {
    rows.iter()
        .find(|r| r.n == anchor_n && r.algo == Algorithm::CrossEntropy)
        .map(|r| {
            vec![
                ReferenceCurve { kind: CurveKind::NSquared, anchor_n, anchor_value: db_to_linear(r.mean_db) },
                ReferenceCurve { kind: CurveKind::ScaledInverseN, anchor_n, anchor_value: r.ratio },
            ]
        })
        .unwrap_or_default()
}
