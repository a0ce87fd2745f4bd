//! Cross-entropy against exhaustive search on a 12-element surface.

use rislab::harness::oracle_check;
use rislab::scenario::Scenario;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let report = oracle_check(&Scenario::default().with_elements(12), 100, 0.2)?;
    let worst = report.seeds.iter().map(|s| s.gap_db).fold(0.0, f64::max);
    println!("optimum {:.3} dB over 2^{} configurations", report.optimum_db, report.n);
    println!(
        "{:.0}% of seeds within {} dB, worst gap {worst:.3} dB",
        100.0 * report.success_fraction,
        report.threshold_db
    );
    Ok(())
}
