use nalgebra::{DMatrix, DVector};

use super::{linear_to_db, ChannelError, Complex64, ZERO_CHANNEL_SNR_DB};
use crate::configuration::RisConfiguration;

/// One draw of the three links plus the radio constants. Fixed for the whole
/// optimization run, so the SNR of a configuration is deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    h_bu: DVector<Complex64>,
    h_br: DMatrix<Complex64>,
    h_ru: DVector<Complex64>,
    p_dbm: f64,
    sigma2_dbm: f64,
    /// `H_br · diag(h_ru)`; column `n` is element `n`'s reflected contribution.
    cascade: DMatrix<Complex64>,
}

impl ChannelRealization {
    pub fn new(
        h_bu: DVector<Complex64>,
        h_br: DMatrix<Complex64>,
        h_ru: DVector<Complex64>,
        p_dbm: f64,
        sigma2_dbm: f64,
    ) -> Result<Self, ChannelError> {
        if h_br.nrows() != h_bu.len() || h_br.ncols() != h_ru.len() {
            return Err(ChannelError::DimensionMismatch(format!(
                "H_br is {}x{} but h_bu has {} and h_ru has {} entries",
                h_br.nrows(),
                h_br.ncols(),
                h_bu.len(),
                h_ru.len()
            )));
        }
        if !p_dbm.is_finite() || !sigma2_dbm.is_finite() {
            return Err(ChannelError::InvalidParameter("radio powers must be finite".into()));
        }
        let cascade = DMatrix::from_fn(h_br.nrows(), h_br.ncols(), |m, n| h_br[(m, n)] * h_ru[n]);
        Ok(Self { h_bu, h_br, h_ru, p_dbm, sigma2_dbm, cascade })
    }

    /// Same direct link and radio, reflected path removed (`N = 0`).
    pub fn without_ris(&self) -> Self {
        let m = self.h_bu.len();
        Self {
            h_bu: self.h_bu.clone(),
            h_br: DMatrix::zeros(m, 0),
            h_ru: DVector::zeros(0),
            p_dbm: self.p_dbm,
            sigma2_dbm: self.sigma2_dbm,
            cascade: DMatrix::zeros(m, 0),
        }
    }

    /// Same channel with the transmit power replaced.
    pub fn with_power(&self, p_dbm: f64) -> Self {
        Self { p_dbm, ..self.clone() }
    }

    pub fn h_bu(&self) -> &DVector<Complex64> {
        &self.h_bu
    }

    pub fn h_br(&self) -> &DMatrix<Complex64> {
        &self.h_br
    }

    pub fn h_ru(&self) -> &DVector<Complex64> {
        &self.h_ru
    }

    pub fn p_dbm(&self) -> f64 {
        self.p_dbm
    }

    pub fn sigma2_dbm(&self) -> f64 {
        self.sigma2_dbm
    }

    /// BS antennas.
    pub fn m(&self) -> usize {
        self.h_bu.len()
    }

    /// RIS elements.
    pub fn n(&self) -> usize {
        self.h_ru.len()
    }

    pub fn effective_channel(&self, x: &RisConfiguration) -> Result<DVector<Complex64>, ChannelError> {
        self.check_len(x)?;
        let mut h = self.h_bu.clone();
        for (n, col) in self.cascade.column_iter().enumerate() {
            let s = x.sign(n);
            for (hm, c) in h.iter_mut().zip(col.iter()) {
                *hm += c * s;
            }
        }
        Ok(h)
    }

    /// Received SNR in dB, `p‖h‖²/σ²`. A zero channel maps to
    /// [`ZERO_CHANNEL_SNR_DB`].
    pub fn snr_db(&self, x: &RisConfiguration) -> Result<f64, ChannelError> {
        let gain: f64 = self.effective_channel(x)?.iter().map(|v| v.norm_sqr()).sum();
        Ok(self.snr_from_gain(gain))
    }

    pub(crate) fn snr_from_gain(&self, gain: f64) -> f64 {
        if gain > 0.0 {
            self.p_dbm - self.sigma2_dbm + linear_to_db(gain)
        } else {
            ZERO_CHANNEL_SNR_DB
        }
    }

    fn check_len(&self, x: &RisConfiguration) -> Result<(), ChannelError> {
        if x.len() != self.n() {
            return Err(ChannelError::DimensionMismatch(format!(
                "configuration has {} bits, channel has {} RIS elements",
                x.len(),
                self.n()
            )));
        }
        Ok(())
    }
}

/// `h = h_bu + H_br·Φ(x)·h_ru`.
pub fn effective_channel(
    real: &ChannelRealization,
    x: &RisConfiguration,
) -> Result<DVector<Complex64>, ChannelError> {
    real.effective_channel(x)
}

pub fn snr(real: &ChannelRealization, x: &RisConfiguration) -> Result<f64, ChannelError> {
    real.snr_db(x)
}
