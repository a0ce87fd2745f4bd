//! Link budgets and random link draws.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::geometry::{correlation_matrix, psd_sqrt, steering_vector, CorrelationSpec, SteeringSpec};
use super::{db_to_linear, ChannelError, Complex64};

/// How the `alpha` field of a [`PathLossSpec`] is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PathLossMode {
    /// `β(dB) = C(dB) − 10·α·log10(d)`, `α` a dimensionless exponent.
    Exponent,
    /// `β(dB) = C(dB) + α(dB)`, `α` an additive link term in dB.
    #[default]
    DirectDb,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossSpec {
    pub mode: PathLossMode,
    /// Reference gain at 1 m, dB.
    pub c_db: f64,
    pub d_m: f64,
    pub alpha: f64,
}

impl PathLossSpec {
    pub fn gain_db(&self) -> Result<f64, ChannelError> {
        if !(self.d_m > 0.0 && self.d_m.is_finite()) {
            return Err(ChannelError::InvalidParameter(format!(
                "link distance must be positive, got {} m",
                self.d_m
            )));
        }
        if !self.c_db.is_finite() || !self.alpha.is_finite() {
            return Err(ChannelError::InvalidParameter("path-loss terms must be finite".into()));
        }
        match self.mode {
            PathLossMode::Exponent => {
                if self.alpha < 0.0 {
                    return Err(ChannelError::InvalidParameter(format!(
                        "path-loss exponent must be non-negative, got {}",
                        self.alpha
                    )));
                }
                Ok(self.c_db - 10.0 * self.alpha * self.d_m.log10())
            }
            PathLossMode::DirectDb => Ok(self.c_db + self.alpha),
        }
    }
}

/// Linear power gain `β` of a link.
pub fn path_gain(spec: &PathLossSpec) -> Result<f64, ChannelError> {
    spec.gain_db().map(db_to_linear)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiceanLinkSpec {
    /// Linear power gain.
    pub beta: f64,
    /// Ricean K-factor, linear.
    pub kappa: f64,
    pub steering: SteeringSpec,
    pub correlation: CorrelationSpec,
}

/// A correlated Ricean link with its steering vector and `R^{1/2}` computed
/// once, ready for repeated draws.
#[derive(Debug, Clone)]
pub struct RiceanLink {
    beta: f64,
    kappa: f64,
    los: DVector<Complex64>,
    sqrt_r: DMatrix<f64>,
}

impl RiceanLink {
    pub fn new(spec: &RiceanLinkSpec) -> Result<Self, ChannelError> {
        if !(spec.beta > 0.0 && spec.beta.is_finite()) {
            return Err(ChannelError::InvalidParameter(format!(
                "path gain must be positive, got {}",
                spec.beta
            )));
        }
        if !(spec.kappa >= 0.0 && spec.kappa.is_finite()) {
            return Err(ChannelError::InvalidParameter(format!(
                "Ricean K-factor must be finite and non-negative, got {}",
                spec.kappa
            )));
        }
        let los = steering_vector(&spec.steering)?;
        let r = correlation_matrix(&spec.correlation, los.len())?;
        let sqrt_r = psd_sqrt(&r)?;
        Ok(Self { beta: spec.beta, kappa: spec.kappa, los, sqrt_r })
    }

    pub fn len(&self) -> usize {
        self.los.len()
    }

    pub fn is_empty(&self) -> bool {
        self.los.is_empty()
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn steering(&self) -> &DVector<Complex64> {
        &self.los
    }

    /// Mean of a draw, `√(βκ/(1+κ))·a`.
    pub fn mean(&self) -> DVector<Complex64> {
        self.los.map(|v| v * (self.beta * self.kappa / (1.0 + self.kappa)).sqrt())
    }

    /// `h = √β (√(κ/(1+κ))·a + √(1/(1+κ))·R^{1/2}u)`, `u ~ CN(0, I)`.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<Complex64> {
        let n = self.los.len();
        let u = DVector::from_fn(n, |_, _| complex_gaussian(rng));
        let los_w = (self.kappa / (1.0 + self.kappa)).sqrt();
        let nlos_w = (1.0 / (1.0 + self.kappa)).sqrt();
        let amp = self.beta.sqrt();
        DVector::from_fn(n, |i, _| {
            let mut scattered = Complex64::new(0.0, 0.0);
            for j in 0..n {
                scattered += u[j] * self.sqrt_r[(i, j)];
            }
            (self.los[i] * los_w + scattered * nlos_w) * amp
        })
    }
}

/// Unit-variance circular complex Gaussian (variance ½ per real part).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// One-off Ricean draw. Prefer [`RiceanLink`] when drawing repeatedly.
pub fn draw_ricean<R: Rng + ?Sized>(
    spec: &RiceanLinkSpec,
    rng: &mut R,
) -> Result<DVector<Complex64>, ChannelError> {
    Ok(RiceanLink::new(spec)?.draw(rng))
}

/// Rank-1 line-of-sight BS–RIS matrix `√β·a_b·a_rᴴ`.
pub fn draw_bs_ris(beta_br: f64, a_b: &DVector<Complex64>, a_r: &DVector<Complex64>) -> DMatrix<Complex64> {
    let amp = beta_br.sqrt();
    DMatrix::from_fn(a_b.len(), a_r.len(), |m, n| a_b[m] * a_r[n].conj() * amp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::geometry::ArrayGrid;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pl(mode: PathLossMode, c_db: f64, d_m: f64, alpha: f64) -> PathLossSpec {
        PathLossSpec { mode, c_db, d_m, alpha }
    }

    #[test]
    fn path_gain_examples() {
        let g = pl(PathLossMode::Exponent, -30.0, 1.0, 2.0).gain_db().unwrap();
        assert!((g + 30.0).abs() < 1e-12);
        let g = pl(PathLossMode::Exponent, -30.0, 100.0, 2.0).gain_db().unwrap();
        assert!((g + 70.0).abs() < 1e-12);
        let g = pl(PathLossMode::DirectDb, -30.0, 30.167, -81.7077).gain_db().unwrap();
        assert!((g + 111.7077).abs() < 1e-12);
        let lin = path_gain(&pl(PathLossMode::Exponent, -30.0, 1.0, 2.0)).unwrap();
        assert!((lin - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn path_gain_rejects_bad_distance() {
        assert!(path_gain(&pl(PathLossMode::Exponent, -30.0, 0.0, 2.0)).is_err());
        assert!(path_gain(&pl(PathLossMode::DirectDb, -30.0, -1.0, 2.0)).is_err());
        assert!(path_gain(&pl(PathLossMode::Exponent, -30.0, 5.0, -2.0)).is_err());
    }

    fn link_spec(n_y: usize, n_z: usize, lambda: f64, beta: f64, kappa: f64) -> RiceanLinkSpec {
        let grid = ArrayGrid::new(n_y, n_z);
        RiceanLinkSpec {
            beta,
            kappa,
            steering: SteeringSpec::on_grid(grid, lambda, 71.95, 25.1),
            correlation: CorrelationSpec::new(grid, lambda),
        }
    }

    #[test]
    fn huge_k_factor_collapses_to_los() {
        let spec = link_spec(2, 3, 0.5, 2e-4, 1e12);
        let link = RiceanLink::new(&spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = link.draw(&mut rng);
        let los = link.steering().map(|v| v * spec.beta.sqrt());
        assert!((&h - &los).norm() / los.norm() < 1e-4);
    }

    #[test]
    fn rejects_negative_kappa_and_mismatched_grids() {
        assert!(RiceanLink::new(&link_spec(2, 2, 0.5, 1.0, -1.0)).is_err());
        let mut spec = link_spec(2, 2, 0.5, 1.0, 1.0);
        spec.correlation.grid = ArrayGrid::new(3, 1);
        assert!(matches!(RiceanLink::new(&spec), Err(ChannelError::DimensionMismatch(_))));
    }

    #[test]
    fn bs_ris_examples() {
        let one = DVector::from_element(1, Complex64::new(1.0, 0.0));
        let h = draw_bs_ris(1.0, &one, &one);
        assert_eq!(h.shape(), (1, 1));
        assert!((h[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    proptest! {
        #[test]
        fn bs_ris_is_rank_one(
            m_y in 1usize..3, m_z in 1usize..3, n_y in 1usize..5, n_z in 1usize..5,
            beta in 1e-6f64..10.0, tb in -180.0f64..180.0, wb in -180.0f64..180.0,
            tr in -180.0f64..180.0, wr in -180.0f64..180.0,
        ) {
            let a_b = steering_vector(&SteeringSpec { k_y: m_y, k_z: m_z, lambda: 0.5, theta_deg: tb, omega_deg: wb }).unwrap();
            let a_r = steering_vector(&SteeringSpec { k_y: n_y, k_z: n_z, lambda: 0.5, theta_deg: tr, omega_deg: wr }).unwrap();
            let h = draw_bs_ris(beta, &a_b, &a_r);
            let (m, n) = h.shape();
            for i in 0..m {
                for k in 0..m {
                    for j in 0..n {
                        for l in 0..n {
                            let minor = h[(i, j)] * h[(k, l)] - h[(i, l)] * h[(k, j)];
                            prop_assert!(minor.norm() <= 1e-12 * beta.max(1.0));
                        }
                    }
                }
            }
            let fro: f64 = h.iter().map(|v| v.norm_sqr()).sum();
            prop_assert!((fro - beta * (m * n) as f64).abs() <= 1e-9 * beta * (m * n) as f64);
        }
    }
}
