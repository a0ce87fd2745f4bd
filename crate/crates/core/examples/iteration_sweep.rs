//! Mean best-so-far SNR after each cross-entropy iteration's worth of
//! evaluations, for CE and SA.

use rislab::harness::{sweep_iterations, TrialPlan};
use rislab::optimizers::Algorithm;
use rislab::scenario::Scenario;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut s = Scenario::default();
    s.run.trials = 16;
    s.optimizer.algorithms = vec![Algorithm::CrossEntropy, Algorithm::SimulatedAnnealing];
    let s = s.with_elements(76);
    let plan = TrialPlan::from_scenario(&s);
    let k = s.optimizer.k as u64;
    let checkpoints: Vec<u64> = s.checkpoints().iter().map(|&t| t as u64 * k).collect();

    let table = sweep_iterations(&plan, &checkpoints)?;
    let ce: Vec<_> = table.rows_for(Algorithm::CrossEntropy).collect();
    let sa: Vec<_> = table.rows_for(Algorithm::SimulatedAnnealing).collect();
    println!("{:>6} {:>10} {:>10}", "evals", "ce dB", "sa dB");
    for (c, a) in ce.iter().zip(&sa) {
        println!("{:>6} {:>10.2} {:>10.2}", c.evals, c.mean_best_db, a.mean_best_db);
    }
    Ok(())
}
