//! CE, SA, MH and random search on the same 20 channels, equal budgets.

use rislab::harness::{run_trials, statistics, TrialPlan};
use rislab::optimizers::Algorithm;
use rislab::scenario::Scenario;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 152;
    let mut s = Scenario::default();
    s.run.trials = 20;
    s.optimizer.algorithms = vec![
        Algorithm::NoRis,
        Algorithm::RandomSearch,
        Algorithm::MetropolisHastings,
        Algorithm::SimulatedAnnealing,
        Algorithm::CrossEntropy,
    ];
    let plan = TrialPlan::from_scenario(&s.with_elements(n));

    println!("{:<6} {:>10} {:>10} {:>10} {:>8}", "algo", "mean dB", "q10 dB", "q90 dB", "evals");
    for &alg in &plan.algorithms {
        let outcomes = run_trials(&plan, alg, n)?;
        let snr: Vec<f64> = outcomes.iter().map(|o| o.achieved_snr_db).collect();
        let st = statistics(&snr)?;
        let evals = outcomes.iter().map(|o| o.evaluations).max().unwrap_or(0);
        println!("{:<6} {:>10.2} {:>10.2} {:>10.2} {:>8}", alg.id(), st.mean_db, st.q10_db, st.q90_db, evals);
    }
    Ok(())
}
