//! One cross-entropy run on one simulated channel at the default N = 304.

use rislab::configuration::RisConfiguration;
use rislab::objective::SimulatedObjective;
use rislab::optimizers::ce_optimize;
use rislab::scenario::Scenario;
use rislab::seed::{trial_rng, Stream};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = Scenario::default().resolved();
    let channel = scenario.channel_model()?.draw(&mut trial_rng(7, 0, Stream::Channel));
    let obj = SimulatedObjective::new(channel.clone());

    let res = ce_optimize(&obj, &scenario.ce_params(), &mut trial_rng(7, 0, Stream::Optimizer))?;
    let direct = channel.without_ris().snr_db(&RisConfiguration::zeros(0))?;

    println!("N = {}, {} evaluations ({:?})", channel.n(), res.evaluations, res.termination);
    println!("no RIS       {direct:8.2} dB");
    println!("best sampled {:8.2} dB", res.best_snr_db);
    println!("returned     {:8.2} dB", res.returned_snr_db);
    println!("final policy has {} of {} elements at bit 1", res.returned_config.count_ones(), channel.n());
    Ok(())
}
