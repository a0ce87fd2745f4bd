//! Achieved SNR against surface size, with the N² and 1/N reference curves,
//! exported as CSV and JSON to a temporary directory.

use rislab::harness::{sweep_elements, CurveKind, ExportFormat, TrialPlan};
use rislab::optimizers::Algorithm;
use rislab::scenario::Scenario;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut s = Scenario::default();
    s.run.trials = 30;
    s.run.n_values = vec![16, 32, 64, 128];
    s.optimizer.algorithms = vec![Algorithm::CrossEntropy, Algorithm::NoRis];
    let plan = TrialPlan::from_scenario(&s.with_elements(128));

    let table = sweep_elements(&plan)?;
    let n2 = table.curve(CurveKind::NSquared).expect("CE is in the plan");
    let inv = table.curve(CurveKind::ScaledInverseN).expect("CE is in the plan");
    println!("{:>5} {:>6} {:>9} {:>9} {:>9} {:>9}", "N", "algo", "mean dB", "N² dB", "ratio", "c/N");
    for r in &table.rows {
        println!(
            "{:>5} {:>6} {:>9.2} {:>9.2} {:>9.4} {:>9.4}",
            r.n,
            r.algo.id(),
            r.mean_db,
            n2.value_db(r.n),
            r.ratio,
            inv.value(r.n)
        );
    }

    let dir = std::env::temp_dir().join("rislab-element-sweep");
    std::fs::create_dir_all(&dir)?;
    for format in [ExportFormat::Csv, ExportFormat::Json] {
        let path = dir.join(format!("sweep_n.{format}"));
        table.export(format, &path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
