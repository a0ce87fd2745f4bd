//! Single-bit-flip local search with Metropolis acceptance: simulated
//! annealing (geometric cooling) and Metropolis–Hastings (fixed temperature).
//!
//! Temperatures are in dB and act on SNR differences in dB. One iteration is
//! one evaluation; the initial random state costs the first one.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Algorithm, OptimizerError, OptimizerResult, TerminationReason, Tracker};
use crate::configuration::RisConfiguration;
use crate::objective::Objective;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaParams {
    pub iters: usize,
    /// Initial temperature, dB.
    pub t0: f64,
    /// Per-step cooling factor.
    pub gamma: f64,
}

impl Default for SaParams {
    fn default() -> Self {
        Self { iters: 1500, t0: 1.0, gamma: 0.995 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MhParams {
    pub iters: usize,
    /// Fixed temperature, dB.
    pub temp: f64,
}

impl Default for MhParams {
    fn default() -> Self {
        Self { iters: 1500, temp: 1.0 }
    }
}

/// `min(1, exp(Δ/T))`.
pub fn acceptance_probability(delta_db: f64, temp_db: f64) -> f64 {
    if delta_db >= 0.0 {
        1.0
    } else {
        (delta_db / temp_db).exp()
    }
}

pub fn sa_optimize<O, R>(obj: &O, params: &SaParams, rng: &mut R) -> Result<OptimizerResult, OptimizerError>
where
    O: Objective + ?Sized,
    R: Rng + ?Sized,
{
    if params.iters == 0 {
        return Err(OptimizerError::InvalidParameter("iters must be >= 1".into()));
    }
    if !(params.t0 > 0.0 && params.t0.is_finite()) {
        return Err(OptimizerError::InvalidParameter(format!("T0 must be > 0, got {}", params.t0)));
    }
    if !(params.gamma > 0.0 && params.gamma < 1.0) {
        return Err(OptimizerError::InvalidParameter(format!("gamma must be in (0, 1), got {}", params.gamma)));
    }
    let (t0, gamma) = (params.t0, params.gamma);
    local_search(obj, params.iters, |k| t0 * gamma.powi(k as i32), Algorithm::SimulatedAnnealing, rng)
}

pub fn mh_optimize<O, R>(obj: &O, params: &MhParams, rng: &mut R) -> Result<OptimizerResult, OptimizerError>
where
    O: Objective + ?Sized,
    R: Rng + ?Sized,
{
    if params.iters == 0 {
        return Err(OptimizerError::InvalidParameter("iters must be >= 1".into()));
    }
    if !(params.temp > 0.0 && params.temp.is_finite()) {
        return Err(OptimizerError::InvalidParameter(format!("temp must be > 0, got {}", params.temp)));
    }
    let temp = params.temp;
    local_search(obj, params.iters, |_| temp, Algorithm::MetropolisHastings, rng)
}

fn local_search<O, R>(
    obj: &O,
    iters: usize,
    temperature: impl Fn(usize) -> f64,
    algorithm: Algorithm,
    rng: &mut R,
) -> Result<OptimizerResult, OptimizerError>
where
    O: Objective + ?Sized,
    R: Rng + ?Sized,
{
    let n = obj.dimension();
    let mut tracker = Tracker::new(obj, iters as u64);
    let mut state = RisConfiguration::random(n, rng);
    let mut current = tracker.evaluate(&state)?;
    tracker.set_state(current);

    for k in 0..iters - 1 {
        let proposal = if n == 0 { state.clone() } else { state.flipped(rng.random_range(0..n)) };
        let candidate = tracker.evaluate(&proposal)?;
        let delta = candidate - current;
        let accept = delta >= 0.0 || rng.random::<f64>() < acceptance_probability(delta, temperature(k));
        if accept {
            state = proposal;
            current = candidate;
        }
        tracker.set_state(current);
    }
    Ok(tracker.finish(algorithm, None, TerminationReason::BudgetExhausted))
}
