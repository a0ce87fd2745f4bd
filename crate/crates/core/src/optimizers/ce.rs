//! Cross-entropy optimization of a binary configuration.
//!
//! Each iteration draws `K` configurations from independent Bernoulli bits
//! with probabilities `P`, evaluates them, keeps the best `J = ⌈βK⌉` and
//! sets `P` to the elite's per-bit mean. The loop stops early once `P` is
//! exactly binary; otherwise after `T` iterations `P` is thresholded at
//! `P_i > 0.5`.


use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Algorithm, OptimizerError, OptimizerResult, TerminationReason, Tracker};
use crate::configuration::{BernoulliThreshold, RisConfiguration};
use crate::objective::Objective;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CeParams {
    /// `T`, maximum number of iterations.
    pub iterations: usize,
    /// `K`, samples per iteration.
    pub samples: usize,
    /// `β`, elite fraction in `(0, 1]`.
    pub elite_fraction: f64,
}

impl Default for CeParams {
    fn default() -> Self {
        Self { iterations: 15, samples: 100, elite_fraction: 0.1 }
    }
}

impl CeParams {
    pub fn validate(&self) -> Result<(), OptimizerError> {
        if self.iterations == 0 {
            return Err(OptimizerError::InvalidParameter("T must be >= 1".into()));
        }
        if self.samples == 0 {
            return Err(OptimizerError::InvalidParameter("K must be >= 1".into()));
        }
        if !(self.elite_fraction > 0.0 && self.elite_fraction <= 1.0) {
            return Err(OptimizerError::InvalidParameter(format!(
                "beta must be in (0, 1], got {}",
                self.elite_fraction
            )));
        }
        Ok(())
    }

    /// `J = ⌈βK⌉`.
    pub fn elite_count(&self) -> usize {
        elite_count(self.elite_fraction, self.samples)
    }

    /// `T·K`.
    pub fn budget(&self) -> u64 {
        (self.iterations * self.samples) as u64
    }
}

/// `⌈βK⌉`, clamped to `[1, K]`. Products within `1e-9` of an integer are
/// taken as that integer so `0.07 · 100` gives 7, not 8.
pub fn elite_count(beta: f64, k: usize) -> usize {
    let raw = beta * k as f64;
    let j = if (raw - raw.round()).abs() < 1e-9 { raw.round() } else { raw.ceil() };
    (j as usize).clamp(1, k.max(1))
}

/// Independent Bernoulli probabilities, one per RIS element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernoulliPolicy {
    probs: Vec<f64>,
}

impl BernoulliPolicy {
    pub fn new(probs: Vec<f64>) -> Result<Self, OptimizerError> {
        if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(OptimizerError::InvalidParameter(format!("probability {p} outside [0, 1]")));
        }
        Ok(Self { probs })
    }

    /// All entries 0.5.
    pub fn uniform(n: usize) -> Self {
        Self { probs: vec![0.5; n] }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Every entry exactly 0 or 1.
    pub fn is_binary(&self) -> bool {
        self.probs.iter().all(|&p| p == 0.0 || p == 1.0)
    }
}

/// `P_i > 0.5 → 1`, else `0`.
pub fn binarize(policy: &BernoulliPolicy) -> RisConfiguration {
    RisConfiguration::new(policy.probs.iter().map(|&p| p > 0.5).collect())
}

/// `K` configurations, bit `i` drawn as `u < P_i` with `u ~ U[0, 1)`.
pub fn ce_sample<R: Rng + ?Sized>(policy: &BernoulliPolicy, k: usize, rng: &mut R) -> Vec<RisConfiguration> {
    let thresholds: Vec<BernoulliThreshold> = policy.probs.iter().map(|&p| BernoulliThreshold::new(p)).collect();
    (0..k)
        .map(|_| RisConfiguration::new(thresholds.iter().map(|t| t.draw(rng)).collect()))
        .collect()
}

/// Indices of the `⌈βK⌉` highest scores, best first. Equal scores keep sample
/// order; NaN ranks last.
pub fn select_elite(scores: &[f64], beta: f64) -> Vec<usize> {
    let key = |v: f64| if v.is_nan() { f64::NEG_INFINITY } else { v };
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| key(scores[b]).total_cmp(&key(scores[a])));
    order.truncate(elite_count(beta, scores.len()));
    order
}

/// Per-bit mean of the elite, no smoothing.
pub fn ce_update(elite: &[&RisConfiguration]) -> Result<BernoulliPolicy, OptimizerError> {
    let first = elite
        .first()
        .ok_or_else(|| OptimizerError::InvalidParameter("elite set is empty".into()))?;
    let n = first.len();
    if elite.iter().any(|x| x.len() != n) {
        return Err(OptimizerError::InvalidParameter("elite configurations differ in length".into()));
    }
    let j = elite.len() as f64;
    let probs = (0..n)
        .map(|i| elite.iter().filter(|x| x.get(i)).count() as f64 / j)
        .collect();
    Ok(BernoulliPolicy { probs })
}

pub fn ce_optimize<O, R>(obj: &O, params: &CeParams, rng: &mut R) -> Result<OptimizerResult, OptimizerError>
where
    O: Objective + ?Sized,
    R: Rng + ?Sized,
{
    params.validate()?;
    let n = obj.dimension();
    // one extra evaluation for a thresholded policy that was never sampled
    let mut tracker = Tracker::new(obj, params.budget() + 1);
    let mut policy = BernoulliPolicy::uniform(n);
    tracker.push_policy(&policy);

    let mut termination = TerminationReason::PostProcessed;
    for _ in 0..params.iterations {
        let samples = ce_sample(&policy, params.samples, rng);
        let mut scores = Vec::with_capacity(samples.len());
        for x in &samples {
            scores.push(tracker.evaluate(x)?);
        }
        let elite: Vec<&RisConfiguration> =
            select_elite(&scores, params.elite_fraction).into_iter().map(|i| &samples[i]).collect();
        policy = ce_update(&elite)?;
        tracker.push_policy(&policy);
        if policy.is_binary() {
            termination = TerminationReason::Converged;
            break;
        }
    }

    let returned = binarize(&policy);
    let returned_snr = match tracker.lookup(&returned) {
        Some(v) => v,
        None => tracker.evaluate(&returned)?,
    };
    debug_assert!(tracker.evaluations() <= params.budget() + 1);
    Ok(tracker.finish(Algorithm::CrossEntropy, Some((returned, returned_snr)), termination))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::FnObjective;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn degenerate_policies_sample_constants() {
        let zeros = BernoulliPolicy::new(vec![0.0; 6]).unwrap();
        let ones = BernoulliPolicy::new(vec![1.0; 6]).unwrap();
        for x in ce_sample(&zeros, 20, &mut rng(1)) {
            assert_eq!(x, RisConfiguration::zeros(6));
        }
        for x in ce_sample(&ones, 20, &mut rng(1)) {
            assert_eq!(x, RisConfiguration::ones(6));
        }
    }

    #[test]
    fn fair_policy_sample_mean() {
        // binomial 3-sigma: 3 * sqrt(0.25 / 1e4) = 0.015
        let samples = ce_sample(&BernoulliPolicy::uniform(8), 10_000, &mut rng(2));
        for i in 0..8 {
            let mean = samples.iter().filter(|x| x.get(i)).count() as f64 / 1e4;
            assert!((mean - 0.5).abs() <= 0.015, "bit {i}: {mean}");
        }
    }

    #[test]
    fn elite_sizes() {
        assert_eq!(elite_count(0.1, 100), 10);
        assert_eq!(elite_count(0.5, 3), 2);
        assert_eq!(elite_count(0.07, 100), 7);
        assert_eq!(elite_count(0.001, 10), 1);
        assert_eq!(elite_count(1.0, 10), 10);
    }

    #[test]
    fn elite_takes_highest_scores() {
        assert_eq!(select_elite(&[1.0, 5.0, 3.0], 0.5), vec![1, 2]);
        assert_eq!(select_elite(&[2.0; 5], 0.4), vec![0, 1]);
        assert_eq!(select_elite(&[f64::NAN, 1.0, 0.0], 0.5), vec![1, 2]);
    }

    #[test]
    fn update_is_column_mean() {
        let a = RisConfiguration::from_bits(&[1, 0, 1]);
        let b = RisConfiguration::from_bits(&[1, 1, 0]);
        let p = ce_update(&[&a, &b]).unwrap();
        assert_eq!(p.probs(), &[1.0, 0.5, 0.5]);
        assert!(!p.is_binary());

        let single = ce_update(&[&a]).unwrap();
        assert_eq!(single.probs(), &[1.0, 0.0, 1.0]);
        assert!(single.is_binary());

        let same = ce_update(&[&b, &b, &b]).unwrap();
        assert!(same.is_binary());
        assert_eq!(binarize(&same), b);

        assert!(ce_update(&[]).is_err());
    }

    #[test]
    fn binarize_is_strict() {
        let p = BernoulliPolicy::new(vec![0.7, 0.3, 0.5]).unwrap();
        assert_eq!(binarize(&p), RisConfiguration::from_bits(&[1, 0, 0]));
        assert_eq!(binarize(&BernoulliPolicy::uniform(4)), RisConfiguration::zeros(4));
        let b = BernoulliPolicy::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(binarize(&b), RisConfiguration::from_bits(&[1, 0]));
        assert!(BernoulliPolicy::new(vec![1.2]).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(CeParams { elite_fraction: 1.5, ..Default::default() }.validate().is_err());
        assert!(CeParams { elite_fraction: 0.0, ..Default::default() }.validate().is_err());
        assert!(CeParams { iterations: 0, ..Default::default() }.validate().is_err());
        assert!(CeParams { samples: 0, ..Default::default() }.validate().is_err());
        assert!(CeParams::default().validate().is_ok());
    }

    #[test]
    fn separable_objective_reaches_all_ones() {
        let params = CeParams { iterations: 10, samples: 50, elite_fraction: 0.1 };
        let hits = (0..100)
            .filter(|&seed| {
                let obj = FnObjective::new(10, |x: &RisConfiguration| x.count_ones() as f64);
                let res = ce_optimize(&obj, &params, &mut rng(seed)).unwrap();
                res.returned_config == RisConfiguration::ones(10)
            })
            .count();
        assert!(hits >= 95, "{hits}/100");
    }

    #[test]
    fn single_element_returns_better_choice() {
        for seed in 0..50 {
            let obj = FnObjective::new(1, |x: &RisConfiguration| if x.get(0) { -2.0 } else { 4.0 });
            let res = ce_optimize(&obj, &CeParams::default(), &mut rng(seed)).unwrap();
            assert_eq!(res.returned_config, RisConfiguration::zeros(1));
            assert_eq!(res.returned_snr_db, 4.0);
        }
    }

    #[test]
    fn budget_and_termination() {
        let obj = FnObjective::new(12, |x: &RisConfiguration| x.count_ones() as f64);
        let params = CeParams::default();
        let res = ce_optimize(&obj, &params, &mut rng(7)).unwrap();
        assert!(res.evaluations <= params.budget() + 1);
        assert_eq!(obj.evaluation_count(), res.evaluations);
        assert!(res.trace.is_monotone());
        assert_eq!(Some(res.best_snr_db), res.trace.max_snr());
        assert!(res.best_snr_db >= res.returned_snr_db);
        match res.termination {
            TerminationReason::Converged => assert!(res.trace.policies.last().unwrap().is_binary()),
            TerminationReason::PostProcessed => assert_eq!(res.trace.policies.len(), params.iterations + 1),
            TerminationReason::BudgetExhausted => panic!("ce never reports budget exhaustion"),
        }
    }

    #[test]
    fn deterministic_for_a_seed() {
        let obj = || FnObjective::new(20, |x: &RisConfiguration| (x.count_ones() as f64 - 7.0).abs());
        let a = ce_optimize(&obj(), &CeParams::default(), &mut rng(11)).unwrap();
        let b = ce_optimize(&obj(), &CeParams::default(), &mut rng(11)).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn policy_entries_have_denominator_j(
            seed in any::<u64>(), n in 1usize..24, k in 2usize..40, beta in 0.05f64..1.0,
        ) {
            let obj = FnObjective::new(n, move |x: &RisConfiguration| {
                x.bits().iter().enumerate().map(|(i, &b)| if b { (i % 3) as f64 - 0.7 } else { 0.0 }).sum()
            });
            let params = CeParams { iterations: 5, samples: k, elite_fraction: beta };
            let j = params.elite_count() as f64;
            let res = ce_optimize(&obj, &params, &mut rng(seed)).unwrap();
            for p in res.trace.policies.iter().skip(1) {
                for &v in p.probs() {
                    prop_assert!((v * j - (v * j).round()).abs() < 1e-9);
                }
            }
            prop_assert!(res.trace.is_monotone());
            prop_assert!(res.evaluations <= params.budget() + 1);
        }
    }
}
