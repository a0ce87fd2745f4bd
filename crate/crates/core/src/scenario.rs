//! Scenario files: geometry, link budgets, radio constants, evaluator and
//! optimizer descriptors, and run settings, as TOML.
//!
//! ```toml
//! [bs]
//! antennas = 1
//! theta_deg = 109.9
//! omega_deg = -29.9
//! lambda = 0.5
//!
//! [links.bu]
//! mode = "direct_db"
//! C_dB = -30.0
//! d_m = 30.167
//! alpha = -81.7077
//! kappa = 1.0
//! theta_deg = 80.94
//! omega_deg = -64.35
//! lambda = 0.5
//! ```
//!
//! Sections other than `[links.*]` may be partial; missing keys take the
//! defaults of [`Scenario::default`]. A link table, when present, must be
//! complete. [`Scenario::resolved`] fills every derived value (array grids,
//! local-search iteration count, checkpoints) so the printed form re-parses
//! to the same scenario.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::channel::{
    path_gain, ArrayGrid, ChannelError, ChannelModel, CorrelationSpec, PathLossMode, PathLossSpec, RiceanLinkSpec,
    SteeringSpec,
};
use crate::optimizers::{elite_count, Algorithm, CeParams, MhParams, OptimizerSpec, SaParams};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read scenario {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse scenario: {0}")]
    Parse(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

fn invalid(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid(msg.into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BsSection {
    /// `M`.
    pub antennas: usize,
    /// BS-side angles of the BS–RIS line of sight.
    pub theta_deg: f64,
    pub omega_deg: f64,
    pub lambda: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<[usize; 2]>,
}

impl Default for BsSection {
    fn default() -> Self {
        Self { antennas: 1, theta_deg: 109.9, omega_deg: -29.9, lambda: 0.5, grid: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RisSection {
    /// `N`.
    pub elements: usize,
    /// RIS-side angles of the BS–RIS line of sight.
    pub theta_deg: f64,
    pub omega_deg: f64,
    pub lambda: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<[usize; 2]>,
}

impl Default for RisSection {
    fn default() -> Self {
        Self { elements: 304, theta_deg: 77.1, omega_deg: 19.95, lambda: 0.5, grid: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UeSection {
    pub antennas: usize,
}

impl Default for UeSection {
    fn default() -> Self {
        Self { antennas: 1 }
    }
}

/// A correlated Ricean link (`bu`, `ru`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FadingLinkSection {
    pub mode: PathLossMode,
    #[serde(rename = "C_dB")]
    pub c_db: f64,
    pub d_m: f64,
    pub alpha: f64,
    pub kappa: f64,
    pub theta_deg: f64,
    pub omega_deg: f64,
    pub lambda: f64,
}

impl FadingLinkSection {
    pub fn path_loss(&self) -> PathLossSpec {
        PathLossSpec { mode: self.mode, c_db: self.c_db, d_m: self.d_m, alpha: self.alpha }
    }
}

/// The line-of-sight BS–RIS link; its angles live in `[bs]` and `[ris]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LosLinkSection {
    pub mode: PathLossMode,
    #[serde(rename = "C_dB")]
    pub c_db: f64,
    pub d_m: f64,
    pub alpha: f64,
}

impl LosLinkSection {
    pub fn path_loss(&self) -> PathLossSpec {
        PathLossSpec { mode: self.mode, c_db: self.c_db, d_m: self.d_m, alpha: self.alpha }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Links {
    pub bu: FadingLinkSection,
    pub ru: FadingLinkSection,
    pub br: LosLinkSection,
}

impl Default for Links {
    fn default() -> Self {
        Self {
            bu: FadingLinkSection {
                mode: PathLossMode::DirectDb,
                c_db: -30.0,
                d_m: 30.167,
                alpha: -81.7077,
                kappa: 1.0,
                theta_deg: 80.94,
                omega_deg: -64.35,
                lambda: 0.5,
            },
            ru: FadingLinkSection {
                mode: PathLossMode::DirectDb,
                c_db: -30.0,
                d_m: 21.0238,
                alpha: -67.036,
                kappa: 1.0,
                theta_deg: 71.95,
                omega_deg: 25.1,
                lambda: 0.5,
            },
            br: LosLinkSection { mode: PathLossMode::DirectDb, c_db: -30.0, d_m: 51.0, alpha: 0.0 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioSection {
    #[serde(rename = "p_dBm")]
    pub p_dbm: f64,
    #[serde(rename = "sigma2_dBm")]
    pub sigma2_dbm: f64,
}

impl Default for RadioSection {
    fn default() -> Self {
        Self { p_dbm: 10.0, sigma2_dbm: -65.0 }
    }
}

/// Where SNR readings come from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(try_from = "String", into = "String")]
pub enum EvaluatorSource {
    #[default]
    Simulated,
    Recorded(PathBuf),
}

impl TryFrom<String> for EvaluatorSource {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        if s == "simulated" {
            Ok(EvaluatorSource::Simulated)
        } else if let Some(path) = s.strip_prefix("recorded:") {
            if path.is_empty() {
                return Err("recorded evaluator needs a path, e.g. `recorded:table.csv`".into());
            }
            Ok(EvaluatorSource::Recorded(PathBuf::from(path)))
        } else {
            Err(format!("unknown evaluator source `{s}` (expected `simulated` or `recorded:PATH`)"))
        }
    }
}

impl From<EvaluatorSource> for String {
    fn from(e: EvaluatorSource) -> Self {
        e.to_string()
    }
}

impl fmt::Display for EvaluatorSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvaluatorSource::Simulated => f.write_str("simulated"),
            EvaluatorSource::Recorded(p) => write!(f, "recorded:{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluatorSection {
    pub source: EvaluatorSource,
    /// Additive Gaussian measurement noise, dB. 0 disables the wrapper.
    pub noise_std_db: f64,
}

impl Default for EvaluatorSection {
    fn default() -> Self {
        Self { source: EvaluatorSource::Simulated, noise_std_db: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerSection {
    pub algorithms: Vec<Algorithm>,
    #[serde(rename = "T")]
    pub t: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub beta: f64,
    /// Local-search and random-search iterations; `T·K` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iters: Option<usize>,
    #[serde(rename = "T0")]
    pub t0: f64,
    pub gamma: f64,
    pub temp: f64,
}

impl Default for OptimizerSection {
    fn default() -> Self {
        let sa = SaParams::default();
        let ce = CeParams::default();
        Self {
            algorithms: vec![Algorithm::CrossEntropy],
            t: ce.iterations,
            k: ce.samples,
            beta: ce.elite_fraction,
            iters: None,
            t0: sa.t0,
            gamma: sa.gamma,
            temp: MhParams::default().temp,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub seed: u64,
    pub trials: usize,
    /// Surface sizes for element sweeps.
    pub n_values: Vec<usize>,
    /// Iteration sweep checkpoints in cross-entropy iterations (`t·K`
    /// evaluations); `0..=T` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checkpoints: Option<Vec<usize>>,
}

impl Default for RunSection {
    fn default() -> Self {
        Self { seed: 1, trials: 500, n_values: vec![10, 38, 76, 152, 304], checkpoints: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub bs: BsSection,
    pub ris: RisSection,
    pub ue: UeSection,
    pub links: Links,
    pub radio: RadioSection,
    pub evaluator: EvaluatorSection,
    pub optimizer: OptimizerSection,
    pub run: RunSection,
}

fn grid_of(count: usize, explicit: Option<[usize; 2]>) -> ArrayGrid {
    match explicit {
        Some([k_y, k_z]) => ArrayGrid::new(k_y, k_z),
        None => ArrayGrid::factorize(count),
    }
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Self, ScenarioError> {
        toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io { path: path.to_path_buf(), source })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario always serializes")
    }

    /// Copy with every derived field filled in.
    pub fn resolved(&self) -> Self {
        let mut s = self.clone();
        let bs = grid_of(s.bs.antennas, s.bs.grid);
        s.bs.grid = Some([bs.k_y, bs.k_z]);
        let ris = grid_of(s.ris.elements, s.ris.grid);
        s.ris.grid = Some([ris.k_y, ris.k_z]);
        s.optimizer.iters.get_or_insert(s.optimizer.t * s.optimizer.k);
        s.run.checkpoints.get_or_insert_with(|| (0..=s.optimizer.t).collect());
        s
    }

    /// Copy with `N` replaced; the RIS grid is re-derived.
    pub fn with_elements(&self, n: usize) -> Self {
        let mut s = self.clone();
        s.ris.elements = n;
        s.ris.grid = None;
        s.resolved()
    }

    /// SHA-256 of the resolved TOML text, hex.
    pub fn hash_hex(&self) -> String {
        Sha256::digest(self.resolved().to_toml_string().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn bs_grid(&self) -> ArrayGrid {
        grid_of(self.bs.antennas, self.bs.grid)
    }

    pub fn ris_grid(&self) -> ArrayGrid {
        grid_of(self.ris.elements, self.ris.grid)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.bs.antennas == 0 {
            return Err(invalid("bs.antennas must be >= 1"));
        }
        if self.ue.antennas != 1 {
            return Err(invalid("ue.antennas must be 1 (single-antenna user)"));
        }
        if self.bs_grid().len() != self.bs.antennas {
            return Err(invalid(format!("bs.grid does not hold {} antennas", self.bs.antennas)));
        }
        if self.ris.elements > 0 && self.ris_grid().len() != self.ris.elements {
            return Err(invalid(format!("ris.grid does not hold {} elements", self.ris.elements)));
        }
        for (name, v) in [
            ("bs.lambda", self.bs.lambda),
            ("ris.lambda", self.ris.lambda),
            ("links.bu.lambda", self.links.bu.lambda),
            ("links.ru.lambda", self.links.ru.lambda),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(format!("{name} must be > 0, got {v}")));
            }
        }
        for (name, v) in [("links.bu.kappa", self.links.bu.kappa), ("links.ru.kappa", self.links.ru.kappa)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(format!("{name} must be >= 0, got {v}")));
            }
        }
        self.links.bu.path_loss().gain_db()?;
        self.links.ru.path_loss().gain_db()?;
        self.links.br.path_loss().gain_db()?;
        if !self.radio.p_dbm.is_finite() || !self.radio.sigma2_dbm.is_finite() {
            return Err(invalid("radio powers must be finite"));
        }
        if !(self.evaluator.noise_std_db >= 0.0 && self.evaluator.noise_std_db.is_finite()) {
            return Err(invalid(format!("evaluator.noise_std_db must be >= 0, got {}", self.evaluator.noise_std_db)));
        }
        self.validate_optimizer()?;
        if self.run.trials == 0 {
            return Err(invalid("run.trials must be >= 1"));
        }
        if self.run.n_values.contains(&0) || self.run.n_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("run.n_values must be positive and strictly ascending"));
        }
        if let Some(cp) = &self.run.checkpoints {
            if let Some(bad) = cp.iter().find(|&&c| c > self.optimizer.t) {
                return Err(invalid(format!("checkpoint {bad} exceeds T = {}", self.optimizer.t)));
            }
        }
        Ok(())
    }

    fn validate_optimizer(&self) -> Result<(), ScenarioError> {
        let o = &self.optimizer;
        if o.algorithms.is_empty() {
            return Err(invalid("optimizer.algorithms must name at least one algorithm"));
        }
        if o.t == 0 {
            return Err(invalid("T must be >= 1"));
        }
        if o.k == 0 {
            return Err(invalid("K must be >= 1"));
        }
        if !(o.beta > 0.0 && o.beta <= 1.0) {
            return Err(invalid(format!("beta must be in (0, 1], got {}", o.beta)));
        }
        if elite_count(o.beta, o.k) == 0 {
            return Err(invalid("ceil(beta * K) must be >= 1"));
        }
        if o.iters == Some(0) {
            return Err(invalid("iters must be >= 1"));
        }
        if !(o.t0 > 0.0 && o.t0.is_finite()) {
            return Err(invalid(format!("T0 must be > 0, got {}", o.t0)));
        }
        if !(o.gamma > 0.0 && o.gamma < 1.0) {
            return Err(invalid(format!("gamma must be in (0, 1), got {}", o.gamma)));
        }
        if !(o.temp > 0.0 && o.temp.is_finite()) {
            return Err(invalid(format!("temp must be > 0, got {}", o.temp)));
        }
        Ok(())
    }

    /// Builds the channel generator for this geometry.
    pub fn channel_model(&self) -> Result<ChannelModel, ScenarioError> {
        self.validate()?;
        let bs_grid = self.bs_grid();
        let bu = &self.links.bu;
        let direct = RiceanLinkSpec {
            beta: path_gain(&bu.path_loss())?,
            kappa: bu.kappa,
            steering: SteeringSpec::on_grid(bs_grid, bu.lambda, bu.theta_deg, bu.omega_deg),
            correlation: CorrelationSpec::new(bs_grid, bu.lambda),
        };
        if self.ris.elements == 0 {
            return Ok(ChannelModel::new(&direct, None, self.radio.p_dbm, self.radio.sigma2_dbm)?);
        }
        let ris_grid = self.ris_grid();
        let ru = &self.links.ru;
        let ris_ue = RiceanLinkSpec {
            beta: path_gain(&ru.path_loss())?,
            kappa: ru.kappa,
            steering: SteeringSpec::on_grid(ris_grid, ru.lambda, ru.theta_deg, ru.omega_deg),
            correlation: CorrelationSpec::new(ris_grid, ru.lambda),
        };
        let beta_br = path_gain(&self.links.br.path_loss())?;
        let bs_side = SteeringSpec::on_grid(bs_grid, self.bs.lambda, self.bs.theta_deg, self.bs.omega_deg);
        let ris_side = SteeringSpec::on_grid(ris_grid, self.ris.lambda, self.ris.theta_deg, self.ris.omega_deg);
        Ok(ChannelModel::new(
            &direct,
            Some((&ris_ue, beta_br, &bs_side, &ris_side)),
            self.radio.p_dbm,
            self.radio.sigma2_dbm,
        )?)
    }

    pub fn ce_params(&self) -> CeParams {
        CeParams { iterations: self.optimizer.t, samples: self.optimizer.k, elite_fraction: self.optimizer.beta }
    }

    /// Iterations for SA, MH and random search; `T·K` unless overridden.
    pub fn local_iters(&self) -> usize {
        self.optimizer.iters.unwrap_or(self.optimizer.t * self.optimizer.k)
    }

    pub fn sa_params(&self) -> SaParams {
        SaParams { iters: self.local_iters(), t0: self.optimizer.t0, gamma: self.optimizer.gamma }
    }

    pub fn mh_params(&self) -> MhParams {
        MhParams { iters: self.local_iters(), temp: self.optimizer.temp }
    }

    /// Parameterized optimizer for `alg`; `None` for the no-RIS baseline.
    pub fn optimizer_spec(&self, alg: Algorithm) -> Option<OptimizerSpec> {
        Some(match alg {
            Algorithm::CrossEntropy => OptimizerSpec::CrossEntropy(self.ce_params()),
            Algorithm::SimulatedAnnealing => OptimizerSpec::SimulatedAnnealing(self.sa_params()),
            Algorithm::MetropolisHastings => OptimizerSpec::MetropolisHastings(self.mh_params()),
            Algorithm::RandomSearch => OptimizerSpec::RandomSearch { iters: self.local_iters() },
            Algorithm::Exhaustive => OptimizerSpec::Exhaustive,
            Algorithm::NoRis => return None,
        })
    }

    /// Checkpoints in cross-entropy iterations.
    pub fn checkpoints(&self) -> Vec<usize> {
        self.run.checkpoints.clone().unwrap_or_else(|| (0..=self.optimizer.t).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_default() {
        assert_eq!(Scenario::from_toml_str("").unwrap(), Scenario::default());
    }

    #[test]
    fn resolved_round_trips() {
        let s = Scenario::default().resolved();
        let text = s.to_toml_string();
        assert_eq!(Scenario::from_toml_str(&text).unwrap(), s);
        assert_eq!(s.ris.grid, Some([16, 19]));
        assert_eq!(s.optimizer.iters, Some(1500));
    }

    #[test]
    fn partial_sections_keep_defaults() {
        let s = Scenario::from_toml_str("[ris]\nelements = 64\n[optimizer]\nalgorithms = [\"ce\", \"sa\"]\n").unwrap();
        assert_eq!(s.ris.elements, 64);
        assert_eq!(s.ris.theta_deg, 77.1);
        assert_eq!(s.optimizer.algorithms, vec![Algorithm::CrossEntropy, Algorithm::SimulatedAnnealing]);
        assert_eq!(s.optimizer.k, 100);
    }

    #[test]
    fn unknown_keys_and_incomplete_links_are_rejected() {
        assert!(Scenario::from_toml_str("[ris]\nelemnts = 3\n").is_err());
        assert!(Scenario::from_toml_str("[links.bu]\nkappa = 2.0\n").is_err());
    }

    #[test]
    fn evaluator_source_parsing() {
        let s = Scenario::from_toml_str("[evaluator]\nsource = \"recorded:t.csv\"\nnoise_std_db = 0.5\n").unwrap();
        assert_eq!(s.evaluator.source, EvaluatorSource::Recorded("t.csv".into()));
        assert!(Scenario::from_toml_str("[evaluator]\nsource = \"live\"\n").is_err());
    }

    #[test]
    fn validation_messages() {
        let mut s = Scenario::default();
        s.optimizer.beta = 1.5;
        let msg = s.validate().unwrap_err().to_string();
        assert!(msg.contains("(0, 1]"), "{msg}");

        let mut s = Scenario::default();
        s.ris.grid = Some([3, 3]);
        assert!(s.validate().is_err());

        let mut s = Scenario::default();
        s.links.ru.d_m = 0.0;
        assert!(s.validate().is_err());

        let mut s = Scenario::default();
        s.run.n_values = vec![10, 10];
        assert!(s.validate().is_err());
    }

    #[test]
    fn default_link_budget() {
        let s = Scenario::default();
        assert!((s.links.bu.path_loss().gain_db().unwrap() + 111.7077).abs() < 1e-9);
        assert!((s.links.ru.path_loss().gain_db().unwrap() + 97.036).abs() < 1e-9);
        assert!((s.links.br.path_loss().gain_db().unwrap() + 30.0).abs() < 1e-9);
    }

    #[test]
    fn model_dimensions() {
        let s = Scenario::default().with_elements(12);
        let m = s.channel_model().unwrap();
        assert_eq!((m.m(), m.n()), (1, 12));
        let none = Scenario::default().with_elements(0).channel_model().unwrap();
        assert_eq!(none.n(), 0);
    }

    #[test]
    fn hash_tracks_content() {
        let a = Scenario::default();
        let mut b = Scenario::default();
        assert_eq!(a.hash_hex(), b.hash_hex());
        assert_eq!(a.hash_hex(), a.resolved().hash_hex());
        b.radio.p_dbm = 11.0;
        assert_ne!(a.hash_hex(), b.hash_hex());
        assert_eq!(a.hash_hex().len(), 64);
    }

    #[test]
    fn shipped_default_file_matches() {
        let text = include_str!("../scenarios/default.scn");
        assert_eq!(Scenario::from_toml_str(text).unwrap(), Scenario::default());
    }
}
