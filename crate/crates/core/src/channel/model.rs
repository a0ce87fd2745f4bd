use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::geometry::{steering_vector, SteeringSpec};
use super::link::{draw_bs_ris, RiceanLink, RiceanLinkSpec};
use super::{ChannelError, ChannelRealization, Complex64};

/// Prepared generator of channel realizations for one geometry.
///
/// Steering vectors, correlation square roots and the deterministic BS–RIS
/// matrix are computed once; [`ChannelModel::draw`] only samples the two
/// Ricean links (direct link first, then RIS–UE).
#[derive(Debug, Clone)]
pub struct ChannelModel {
    direct: RiceanLink,
    reflected: Option<ReflectedPath>,
    p_dbm: f64,
    sigma2_dbm: f64,
}

#[derive(Debug, Clone)]
struct ReflectedPath {
    ris_ue: RiceanLink,
    bs_ris: DMatrix<Complex64>,
}

impl ChannelModel {
    /// `ris` is `None` for a system without a surface. Otherwise it carries the
    /// RIS–UE link, the BS–RIS path gain and the two steering specs of the
    /// rank-1 BS–RIS matrix (BS side, RIS side).
    pub fn new(
        direct: &RiceanLinkSpec,
        ris: Option<(&RiceanLinkSpec, f64, &SteeringSpec, &SteeringSpec)>,
        p_dbm: f64,
        sigma2_dbm: f64,
    ) -> Result<Self, ChannelError> {
        let direct = RiceanLink::new(direct)?;
        let reflected = match ris {
            None => None,
            Some((ru, beta_br, bs_side, ris_side)) => {
                if !(beta_br > 0.0 && beta_br.is_finite()) {
                    return Err(ChannelError::InvalidParameter(format!(
                        "BS-RIS path gain must be positive, got {beta_br}"
                    )));
                }
                let ris_ue = RiceanLink::new(ru)?;
                let a_b = steering_vector(bs_side)?;
                let a_r = steering_vector(ris_side)?;
                if a_b.len() != direct.len() || a_r.len() != ris_ue.len() {
                    return Err(ChannelError::DimensionMismatch(format!(
                        "BS-RIS steering is {}x{} but links have M={} and N={}",
                        a_b.len(),
                        a_r.len(),
                        direct.len(),
                        ris_ue.len()
                    )));
                }
                Some(ReflectedPath { ris_ue, bs_ris: draw_bs_ris(beta_br, &a_b, &a_r) })
            }
        };
        Ok(Self { direct, reflected, p_dbm, sigma2_dbm })
    }

    pub fn m(&self) -> usize {
        self.direct.len()
    }

    pub fn n(&self) -> usize {
        self.reflected.as_ref().map_or(0, |r| r.ris_ue.len())
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> ChannelRealization {
        let h_bu = self.direct.draw(rng);
        let (h_br, h_ru) = match &self.reflected {
            Some(r) => (r.bs_ris.clone(), r.ris_ue.draw(rng)),
            None => (DMatrix::zeros(self.m(), 0), DVector::zeros(0)),
        };
        ChannelRealization::new(h_bu, h_br, h_ru, self.p_dbm, self.sigma2_dbm)
            .expect("model dimensions are checked at construction")
    }
}
