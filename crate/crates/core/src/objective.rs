//! The black-box contract between optimizers and the world: commit a
//! configuration, read back an SNR in dB.
//!
//! Optimizers only ever see [`Objective`]. Implementations here cover a
//! simulated channel, replay of a recorded table and an additive Gaussian
//! measurement-noise wrapper over either. Every evaluator counts its calls,
//! repeats included, since hardware pays for those too.

use std::collections::BTreeMap;
use std::fs::File;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{ChannelError, ChannelRealization};
use crate::configuration::RisConfiguration;

#[derive(Debug, Error)]
pub enum ObjectiveError {
    #[error("configuration has {got} bits, objective expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("no recorded SNR for configuration {0}")]
    MissingRecord(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("recorded table {path}: {message}")]
    Table { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// Commit a configuration, receive the SNR in dB.
pub trait Objective: Send + Sync {
    fn evaluate(&self, x: &RisConfiguration) -> Result<f64, ObjectiveError>;

    /// Number of RIS elements `N`.
    fn dimension(&self) -> usize;

    /// Calls to [`Objective::evaluate`] so far.
    fn evaluation_count(&self) -> u64;
}

impl<T: Objective + ?Sized> Objective for &T {
    fn evaluate(&self, x: &RisConfiguration) -> Result<f64, ObjectiveError> {
        (**self).evaluate(x)
    }
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn evaluation_count(&self) -> u64 {
        (**self).evaluation_count()
    }
}

impl<T: Objective + ?Sized> Objective for Box<T> {
    fn evaluate(&self, x: &RisConfiguration) -> Result<f64, ObjectiveError> {
        (**self).evaluate(x)
    }
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn evaluation_count(&self) -> u64 {
        (**self).evaluation_count()
    }
}

impl<T: Objective + ?Sized> Objective for Arc<T> {
    fn evaluate(&self, x: &RisConfiguration) -> Result<f64, ObjectiveError> {
        (**self).evaluate(x)
    }
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn evaluation_count(&self) -> u64 {
        (**self).evaluation_count()
    }
}

fn check_dimension(expected: usize, x: &RisConfiguration) -> Result<(), ObjectiveError> {
    if x.len() != expected {
        return Err(ObjectiveError::DimensionMismatch { expected, got: x.len() });
    }
    Ok(())
}

/// Maximum number of evaluations an optimizer may spend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvaluationBudget {
    pub max_evaluations: u64,
}

impl EvaluationBudget {
    pub fn new(max_evaluations: u64) -> Self {
        Self { max_evaluations }
    }

    /// `T·K`, the budget every algorithm gets in a comparison.
    pub fn from_ce(iterations: usize, samples: usize) -> Self {
        Self { max_evaluations: (iterations * samples) as u64 }
    }
}

/// Noise-free SNR of a fixed channel realization.
#[derive(Debug)]
pub struct SimulatedObjective {
    channel: ChannelRealization,
    count: AtomicU64,
}

impl SimulatedObjective {
    pub fn new(channel: ChannelRealization) -> Self {
        Self { channel, count: AtomicU64::new(0) }
    }

    pub fn channel(&self) -> &ChannelRealization {
        &self.channel
    }
}

impl Objective for SimulatedObjective {
    fn evaluate(&self, x: &RisConfiguration) -> Result<f64, ObjectiveError> {
        self.count.fetch_add(1, Ordering::Relaxed);
        check_dimension(self.channel.n(), x)?;
        Ok(self.channel.snr_db(x)?)
    }

    fn dimension(&self) -> usize {
        self.channel.n()
    }

    fn evaluation_count(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }
}

pub fn make_simulated(channel: ChannelRealization) -> SimulatedObjective {
    SimulatedObjective::new(channel)
}

/// Adds `N(0, std_db²)` to every reading of the inner objective.
#[derive(Debug)]
pub struct NoisyObjective<O, R> {
    inner: O,
    std_db: f64,
    rng: Mutex<R>,
}

impl<O: Objective, R: Rng + Send> NoisyObjective<O, R> {
    pub fn new(inner: O, std_db: f64, rng: R) -> Result<Self, ObjectiveError> {
        if !(std_db >= 0.0 && std_db.is_finite()) {
            return Err(ObjectiveError::InvalidParameter(format!(
                "noise standard deviation must be >= 0 dB, got {std_db}"
            )));
        }
        Ok(Self { inner, std_db, rng: Mutex::new(rng) })
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }

    pub fn std_db(&self) -> f64 {
        self.std_db
    }
}

impl<O: Objective, R: Rng + Send> Objective for NoisyObjective<O, R> {
    fn evaluate(&self, x: &RisConfiguration) -> Result<f64, ObjectiveError> {
        let clean = self.inner.evaluate(x)?;
        if self.std_db == 0.0 {
            return Ok(clean);
        }
        let z: f64 = self.rng.lock().expect("noise rng poisoned").sample(StandardNormal);
        Ok(clean + self.std_db * z)
    }

    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    fn evaluation_count(&self) -> u64 {
        self.inner.evaluation_count()
    }
}

pub fn with_measurement_noise<O: Objective, R: Rng + Send>(
    inner: O,
    std_db: f64,
    rng: R,
) -> Result<NoisyObjective<O, R>, ObjectiveError> {
    NoisyObjective::new(inner, std_db, rng)
}

/// Adapts a plain function into an objective. Handy for synthetic test
/// problems and for wiring in external measurement code.
pub struct FnObjective<F> {
    dimension: usize,
    f: F,
    count: AtomicU64,
}

impl<F> FnObjective<F>
where
    F: Fn(&RisConfiguration) -> f64 + Send + Sync,
{
    pub fn new(dimension: usize, f: F) -> Self {
        Self { dimension, f, count: AtomicU64::new(0) }
    }
}

impl<F> Objective for FnObjective<F>
where
    F: Fn(&RisConfiguration) -> f64 + Send + Sync,
{
    fn evaluate(&self, x: &RisConfiguration) -> Result<f64, ObjectiveError> {
        self.count.fetch_add(1, Ordering::Relaxed);
        check_dimension(self.dimension, x)?;
        Ok((self.f)(x))
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn evaluation_count(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }
}

/// Logged SNR readings keyed by bit-string (`'0'`/`'1'`, element 0 first).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RecordedTable {
    dimension: Option<usize>,
    records: BTreeMap<String, f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RecordRow {
    config: String,
    snr_db: f64,
}

impl RecordedTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, x: &RisConfiguration, snr_db: f64) -> Result<(), ObjectiveError> {
        match self.dimension {
            Some(n) => check_dimension(n, x)?,
            None => self.dimension = Some(x.len()),
        }
        self.records.insert(x.to_bit_string(), snr_db);
        Ok(())
    }

    pub fn get(&self, x: &RisConfiguration) -> Option<f64> {
        self.records.get(&x.to_bit_string()).copied()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn dimension(&self) -> Option<usize> {
        self.dimension
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.records.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Writes `config,snr_db` CSV, one record per line, sorted by bit-string.
    pub fn write_csv(&self, path: &Path) -> Result<(), ObjectiveError> {
        let io = |source| ObjectiveError::Io { path: path.to_path_buf(), source };
        let file = File::create(path).map_err(io)?;
        let mut w = csv::Writer::from_writer(file);
        for (config, &snr_db) in &self.records {
            w.serialize(RecordRow { config: config.clone(), snr_db }).map_err(|e| table_err(path, e))?;
        }
        w.flush().map_err(io)
    }

    pub fn read_csv(path: &Path) -> Result<Self, ObjectiveError> {
        let file = File::open(path).map_err(|source| ObjectiveError::Io { path: path.to_path_buf(), source })?;
        let mut r = csv::Reader::from_reader(file);
        let headers = r.headers().map_err(|e| table_err(path, e))?.clone();
        if headers.iter().collect::<Vec<_>>() != ["config", "snr_db"] {
            return Err(ObjectiveError::Table {
                path: path.to_path_buf(),
                message: format!("expected header `config,snr_db`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
            });
        }
        let mut table = Self::new();
        for row in r.deserialize::<RecordRow>() {
            let row = row.map_err(|e| table_err(path, e))?;
            let x: RisConfiguration = row.config.parse().map_err(|e| table_err(path, e))?;
            table.insert(&x, row.snr_db).map_err(|e| table_err(path, e))?;
        }
        Ok(table)
    }
}

fn table_err(path: &Path, e: impl std::fmt::Display) -> ObjectiveError {
    ObjectiveError::Table { path: path.to_path_buf(), message: e.to_string() }
}

/// Replays a [`RecordedTable`]; unseen configurations are an error.
#[derive(Debug)]
pub struct RecordedObjective {
    table: Arc<RecordedTable>,
    dimension: usize,
    count: AtomicU64,
}

impl RecordedObjective {
    pub fn new(table: Arc<RecordedTable>) -> Result<Self, ObjectiveError> {
        let dimension = table
            .dimension()
            .filter(|_| !table.is_empty())
            .ok_or_else(|| ObjectiveError::InvalidParameter("recorded table is empty".into()))?;
        Ok(Self { table, dimension, count: AtomicU64::new(0) })
    }

    pub fn table(&self) -> &RecordedTable {
        &self.table
    }
}

impl Objective for RecordedObjective {
    fn evaluate(&self, x: &RisConfiguration) -> Result<f64, ObjectiveError> {
        self.count.fetch_add(1, Ordering::Relaxed);
        check_dimension(self.dimension, x)?;
        self.table.get(x).ok_or_else(|| ObjectiveError::MissingRecord(x.to_bit_string()))
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn evaluation_count(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }
}

pub fn make_recorded(table: RecordedTable) -> Result<RecordedObjective, ObjectiveError> {
    RecordedObjective::new(Arc::new(table))
}

/// Passes evaluations through and logs every reading (last reading wins for
/// repeats) so a run can be exported as a [`RecordedTable`].
#[derive(Debug)]
pub struct Recorder<O> {
    inner: O,
    log: Mutex<RecordedTable>,
}

impl<O: Objective> Recorder<O> {
    pub fn new(inner: O) -> Self {
        Self { inner, log: Mutex::new(RecordedTable::new()) }
    }

    pub fn table(&self) -> RecordedTable {
        self.log.lock().expect("recorder poisoned").clone()
    }

    pub fn into_table(self) -> RecordedTable {
        self.log.into_inner().expect("recorder poisoned")
    }
}

impl<O: Objective> Objective for Recorder<O> {
    fn evaluate(&self, x: &RisConfiguration) -> Result<f64, ObjectiveError> {
        let v = self.inner.evaluate(x)?;
        self.log.lock().expect("recorder poisoned").insert(x, v)?;
        Ok(v)
    }

    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    fn evaluation_count(&self) -> u64 {
        self.inner.evaluation_count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Complex64;
    use nalgebra::{DMatrix, DVector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small_channel(n: usize) -> ChannelRealization {
        ChannelRealization::new(
            DVector::from_element(1, Complex64::new(0.1, 0.2)),
            DMatrix::from_fn(1, n, |_, j| Complex64::from_polar(1.0, j as f64)),
            DVector::from_fn(n, |i, _| Complex64::from_polar(0.5, 0.3 * i as f64)),
            10.0,
            -65.0,
        )
        .unwrap()
    }

    #[test]
    fn simulated_is_deterministic_and_counts() {
        let obj = make_simulated(small_channel(4));
        let x = RisConfiguration::from_bits(&[1, 0, 1, 1]);
        let a = obj.evaluate(&x).unwrap();
        let b = obj.evaluate(&x).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        for _ in 0..98 {
            obj.evaluate(&x).unwrap();
        }
        assert_eq!(obj.evaluation_count(), 100);
        assert_eq!(obj.dimension(), 4);
    }

    #[test]
    fn empty_surface_is_constant_direct_link() {
        let ch = small_channel(3).without_ris();
        let direct = ch.snr_db(&RisConfiguration::zeros(0)).unwrap();
        let obj = make_simulated(ch);
        assert_eq!(obj.evaluate(&RisConfiguration::zeros(0)).unwrap(), direct);
    }

    #[test]
    fn simulated_rejects_wrong_length() {
        let obj = make_simulated(small_channel(3));
        assert!(matches!(
            obj.evaluate(&RisConfiguration::zeros(2)),
            Err(ObjectiveError::DimensionMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn zero_noise_is_transparent() {
        let x = RisConfiguration::from_bits(&[0, 1, 1]);
        let clean = make_simulated(small_channel(3)).evaluate(&x).unwrap();
        let noisy = with_measurement_noise(make_simulated(small_channel(3)), 0.0, ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(noisy.evaluate(&x).unwrap(), clean);
        assert!(with_measurement_noise(make_simulated(small_channel(3)), -1.0, ChaCha8Rng::seed_from_u64(1)).is_err());
    }

    #[test]
    fn recorded_lookup_and_miss() {
        let mut table = RecordedTable::new();
        table.insert(&"01".parse().unwrap(), 3.0).unwrap();
        table.insert(&"10".parse().unwrap(), 5.0).unwrap();
        let obj = make_recorded(table).unwrap();
        assert_eq!(obj.evaluate(&RisConfiguration::from_bits(&[1, 0])).unwrap(), 5.0);
        match obj.evaluate(&RisConfiguration::from_bits(&[1, 1])) {
            Err(ObjectiveError::MissingRecord(s)) => assert_eq!(s, "11"),
            other => panic!("expected missing record, got {other:?}"),
        }
        assert_eq!(obj.evaluation_count(), 2);
    }

    #[test]
    fn recorded_rejects_empty_and_ragged_tables() {
        assert!(make_recorded(RecordedTable::new()).is_err());
        let mut table = RecordedTable::new();
        table.insert(&"01".parse().unwrap(), 3.0).unwrap();
        assert!(table.insert(&"011".parse().unwrap(), 3.0).is_err());
    }

    #[test]
    fn export_and_replay_simulated_evaluations() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("table.csv");
        let rec = Recorder::new(make_simulated(small_channel(5)));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let configs: Vec<_> = (0..20).map(|_| RisConfiguration::random(5, &mut rng)).collect();
        let original: Vec<f64> = configs.iter().map(|x| rec.evaluate(x).unwrap()).collect();
        rec.table().write_csv(&path).unwrap();

        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("config,snr_db\n"));

        let replay = make_recorded(RecordedTable::read_csv(&path).unwrap()).unwrap();
        for (x, v) in configs.iter().zip(&original) {
            assert_eq!(replay.evaluate(x).unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn read_rejects_bad_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "bits,value\n01,3.0\n").unwrap();
        assert!(matches!(RecordedTable::read_csv(&path), Err(ObjectiveError::Table { .. })));
    }
}
