//! Wall-clock cost of one full optimizer run per algorithm and N.

use rislab::harness::{wallclock_report, TrialPlan, COMPLEXITY_NOTE};
use rislab::optimizers::Algorithm;
use rislab::scenario::Scenario;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut s = Scenario::default();
    s.run.trials = 5;
    s.run.n_values = vec![38, 152, 304];
    s.optimizer.algorithms = vec![Algorithm::CrossEntropy, Algorithm::SimulatedAnnealing, Algorithm::MetropolisHastings];
    let plan = TrialPlan::from_scenario(&s.with_elements(304));

    for row in wallclock_report(&plan)? {
        println!("N = {:>3}  {:<3} {:>8.3} ms  ({} runs)", row.n, row.algo.id(), row.mean_seconds * 1e3, row.runs);
    }
    println!("{COMPLEXITY_NOTE}");
    Ok(())
}
