//! Record every configuration one optimizer run touches, write the table to
//! CSV, read it back and replay the same run against the recording.

use std::sync::Arc;

use rislab::objective::{Objective, RecordedObjective, RecordedTable, Recorder, SimulatedObjective};
use rislab::optimizers::{sa_optimize, SaParams};
use rislab::scenario::Scenario;
use rislab::seed::{trial_rng, Stream};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = Scenario::default().with_elements(64);
    let channel = scenario.channel_model()?.draw(&mut trial_rng(3, 0, Stream::Channel));
    let params = SaParams { iters: 400, ..SaParams::default() };

    let recorder = Recorder::new(SimulatedObjective::new(channel));
    let live = sa_optimize(&recorder, &params, &mut trial_rng(3, 0, Stream::Optimizer))?;
    let table = recorder.into_table();

    let path = std::env::temp_dir().join("rislab-recorded.csv");
    table.write_csv(&path)?;
    let replay = RecordedObjective::new(Arc::new(RecordedTable::read_csv(&path)?))?;
    let again = sa_optimize(&replay, &params, &mut trial_rng(3, 0, Stream::Optimizer))?;

    println!("{} distinct configurations recorded to {}", table.len(), path.display());
    println!("live   {:.3} dB after {} evaluations", live.best_snr_db, live.evaluations);
    println!("replay {:.3} dB after {} evaluations", again.best_snr_db, replay.evaluation_count());
    assert_eq!(live.best_config, again.best_config);
    Ok(())
}
