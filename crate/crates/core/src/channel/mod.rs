//! RIS-aided channel model.
//!
//! The composite channel is `h = h_bu + H_br·Φ·h_ru` where the direct and
//! RIS–UE links are correlated Ricean vectors, the BS–RIS link is a rank-1
//! line-of-sight matrix and `Φ = diag(±1)` carries the binary phases. The
//! model exists to drive simulations; the optimizers never see it.
//!
//! Powers are linear (mW) internally; dB and dBm appear only at the edges.

mod geometry;
mod link;
mod model;
mod realization;

pub use geometry::{
    correlation_matrix, psd_sqrt, sinc, steering_vector, ArrayGrid, CorrelationSpec, SteeringSpec,
};
pub use link::{
    complex_gaussian, draw_bs_ris, draw_ricean, path_gain, PathLossMode, PathLossSpec, RiceanLink,
    RiceanLinkSpec,
};
pub use model::ChannelModel;
pub use realization::{effective_channel, snr, ChannelRealization};

use thiserror::Error;

pub type Complex64 = nalgebra::Complex<f64>;

/// SNR reported for an exactly zero channel. Stands in for −∞ so that
/// comparisons and arithmetic stay finite.
pub const ZERO_CHANNEL_SNR_DB: f64 = -1e9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("correlation matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPositiveSemidefinite(f64),
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}
