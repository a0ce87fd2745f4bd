use rand::Rng;

use super::{Algorithm, OptimizerError, OptimizerResult, TerminationReason, Tracker};
use crate::configuration::RisConfiguration;
use crate::objective::Objective;

/// Largest surface [`exhaustive`] will enumerate.
pub const EXHAUSTIVE_MAX_ELEMENTS: usize = 24;

/// `iters` i.i.d. uniform configurations, keep the best.
pub fn random_search<O, R>(obj: &O, iters: usize, rng: &mut R) -> Result<OptimizerResult, OptimizerError>
where
    O: Objective + ?Sized,
    R: Rng + ?Sized,
{
    if iters == 0 {
        return Err(OptimizerError::InvalidParameter("iters must be >= 1".into()));
    }
    let n = obj.dimension();
    let mut tracker = Tracker::new(obj, iters as u64);
    for _ in 0..iters {
        tracker.evaluate(&RisConfiguration::random(n, rng))?;
    }
    Ok(tracker.finish(Algorithm::RandomSearch, None, TerminationReason::BudgetExhausted))
}

/// Evaluates all `2^N` configurations in increasing integer order (element 0
/// is the least significant bit). Ties keep the lowest value.
pub fn exhaustive<O>(obj: &O) -> Result<OptimizerResult, OptimizerError>
where
    O: Objective + ?Sized,
{
    let n = obj.dimension();
    if n > EXHAUSTIVE_MAX_ELEMENTS {
        return Err(OptimizerError::TooLarge { n, max: EXHAUSTIVE_MAX_ELEMENTS });
    }
    let total = 1u64 << n;
    let mut tracker = Tracker::new(obj, total);
    for v in 0..total {
        tracker.evaluate(&RisConfiguration::from_index(v, n))?;
    }
    Ok(tracker.finish(Algorithm::Exhaustive, None, TerminationReason::BudgetExhausted))
}
