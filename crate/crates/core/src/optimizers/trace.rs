use std::io::Write;

use serde::{Deserialize, Serialize};

use super::BernoulliPolicy;

/// One objective evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    /// 0-based position in the run.
    pub eval_idx: u64,
    /// Hex-packed configuration, element 0 in the least significant bit.
    pub config_hex: String,
    pub snr_db: f64,
    pub best_db: f64,
    /// SNR of the chain state after this step (local-search optimizers only).
    pub state_db: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OptimizerTrace {
    pub entries: Vec<TraceEntry>,
    /// Cross-entropy only: the initial policy followed by one snapshot per
    /// update.
    pub policies: Vec<BernoulliPolicy>,
}

#[derive(Serialize)]
struct TraceRow<'a> {
    eval_idx: u64,
    snr_db: f64,
    best_db: f64,
    config_bits: &'a str,
}

impl OptimizerTrace {
    pub(crate) fn push(&mut self, entry: TraceEntry) {
        self.entries.push(entry);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Best-so-far after `evals` evaluations. Checkpoint 0 reads the first
    /// evaluation; checkpoints past the end read the final value.
    pub fn best_at(&self, evals: u64) -> Option<f64> {
        if self.entries.is_empty() {
            return None;
        }
        let idx = (evals.max(1) as usize).min(self.entries.len()) - 1;
        Some(self.entries[idx].best_db)
    }

    pub fn max_snr(&self) -> Option<f64> {
        self.entries.iter().map(|e| e.snr_db).reduce(f64::max)
    }

    pub fn is_monotone(&self) -> bool {
        self.entries.windows(2).all(|w| w[1].best_db >= w[0].best_db)
    }

    /// CSV with columns `eval_idx,snr_db,best_db,config_bits`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for e in &self.entries {
            w.serialize(TraceRow {
                eval_idx: e.eval_idx,
                snr_db: e.snr_db,
                best_db: e.best_db,
                config_bits: &e.config_hex,
            })?;
        }
        w.flush()?;
        Ok(())
    }
}
