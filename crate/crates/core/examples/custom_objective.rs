//! Any closure can stand in for the channel. Here: a planted 40-bit target,
//! scored by the number of matching bits.

use rislab::configuration::RisConfiguration;
use rislab::objective::{FnObjective, Objective};
use rislab::optimizers::{ce_optimize, sa_optimize, CeParams, SaParams};
use rislab::seed::{trial_rng, Stream};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 40;
    let target = RisConfiguration::random(n, &mut trial_rng(11, 0, Stream::Channel));
    let score = |x: &RisConfiguration| (0..n).filter(|&i| x.get(i) == target.get(i)).count() as f64;

    let ce_obj = FnObjective::new(n, score);
    let ce = ce_optimize(&ce_obj, &CeParams { iterations: 10, samples: 60, elite_fraction: 0.1 }, &mut trial_rng(11, 0, Stream::Optimizer))?;
    let sa_obj = FnObjective::new(n, score);
    let sa = sa_optimize(&sa_obj, &SaParams { iters: 600, ..SaParams::default() }, &mut trial_rng(11, 0, Stream::Optimizer))?;

    println!("ce: {}/{n} bits after {} calls", ce.returned_snr_db, ce_obj.evaluation_count());
    println!("sa: {}/{n} bits after {} calls", sa.returned_snr_db, sa_obj.evaluation_count());
    Ok(())
}
