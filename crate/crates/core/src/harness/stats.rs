use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::channel::{db_to_linear, linear_to_db};

/// Summary of a set of collected SNRs.
///
/// The mean and the variance/mean² ratio are computed on linear powers; the
/// mean is reported back in dB. Quantiles are nearest-rank on the dB values
/// (rank `⌈q·n⌉`), which is the same in either domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialStatistics {
    pub mean_db: f64,
    pub q10_db: f64,
    pub q90_db: f64,
    /// Unbiased sample variance over squared mean, linear domain.
    pub ratio: f64,
    pub count: usize,
}

impl TrialStatistics {
    /// `q90 − q10` in dB.
    pub fn quantile_gap_db(&self) -> f64 {
        self.q90_db - self.q10_db
    }
}

/// 1-based nearest rank `⌈q·n⌉`, clamped to `[1, n]`.
pub fn nearest_rank(q: f64, n: usize) -> usize {
    let raw = q * n as f64;
    let r = if (raw - raw.round()).abs() < 1e-9 { raw.round() } else { raw.ceil() };
    (r as usize).clamp(1, n.max(1))
}

/// Nearest-rank quantile of already sorted values.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    sorted[nearest_rank(q, sorted.len()) - 1]
}

pub fn statistics(snr_db: &[f64]) -> Result<TrialStatistics, HarnessError> {
    if snr_db.is_empty() {
        return Err(HarnessError::EmptySample);
    }
    let n = snr_db.len();
    let linear: Vec<f64> = snr_db.iter().map(|&v| db_to_linear(v)).collect();
    let mean = linear.iter().sum::<f64>() / n as f64;
    let variance = if n > 1 {
        linear.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    let ratio = if mean > 0.0 { variance / (mean * mean) } else { 0.0 };
    let mut sorted = snr_db.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(TrialStatistics {
        mean_db: linear_to_db(mean),
        q10_db: quantile_sorted(&sorted, 0.1),
        q90_db: quantile_sorted(&sorted, 0.9),
        ratio,
        count: n,
    })
}

/// Mean of dB values taken in the linear domain, returned in dB.
pub fn linear_mean_db(snr_db: &[f64]) -> f64 {
    let mean = snr_db.iter().map(|&v| db_to_linear(v)).sum::<f64>() / snr_db.len() as f64;
    linear_to_db(mean)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    /// `value(N) = value₀·(N/N₀)²`, for mean SNR (linear).
    NSquared,
    /// `value(N) = value₀·N₀/N`, for the variance/mean² ratio.
    ScaledInverseN,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceCurve {
    pub kind: CurveKind,
    pub anchor_n: usize,
    /// Linear value at `anchor_n`.
    pub anchor_value: f64,
}

impl ReferenceCurve {
    pub fn value(&self, n: usize) -> f64 {
        let scale = n as f64 / self.anchor_n as f64;
        match self.kind {
            CurveKind::NSquared => self.anchor_value * scale * scale,
            CurveKind::ScaledInverseN => self.anchor_value / scale,
        }
    }

    pub fn value_db(&self, n: usize) -> f64 {
        linear_to_db(self.value(n))
    }
}
