//! Optimize through a 1 dB noisy evaluator, then read the returned
//! configuration 200 more times.

use rislab::harness::remeasure;
use rislab::optimizers::Algorithm;
use rislab::scenario::Scenario;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut s = Scenario::default();
    s.evaluator.noise_std_db = 1.0;
    let s = s.with_elements(76);

    for alg in [Algorithm::CrossEntropy, Algorithm::SimulatedAnnealing, Algorithm::NoRis] {
        let m = remeasure(&s, alg, 200)?;
        let st = &m.statistics;
        let claimed = m.result.as_ref().map(|r| format!("{:.2}", r.returned_snr_db)).unwrap_or_else(|| "-".into());
        println!(
            "{:<6} claimed {claimed:>7} dB, remeasured mean {:.2} dB, q10..q90 {:.2}..{:.2} dB",
            alg.id(),
            st.mean_db,
            st.q10_db,
            st.q90_db
        );
    }
    Ok(())
}
