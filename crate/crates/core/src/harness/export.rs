//! CSV and JSON writers and readers for sweep tables.
//!
//! CSV files start with one `#` comment line carrying the metadata
//! (`kind`, `scenario_hash`, `master_seed`, `artifact_version`), followed by
//! a header row and the data rows. JSON files hold the whole table.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::sweep::{anchored_curves, ElementRow, ElementTable, IterationRow, IterationTable};
use super::{HarnessError, TrialPlan};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    pub kind: String,
    pub scenario_hash: String,
    pub master_seed: u64,
    pub artifact_version: String,
}

impl Metadata {
    pub(crate) fn new(kind: &str, plan: &TrialPlan) -> Self {
        Self {
            kind: kind.to_string(),
            scenario_hash: plan.scenario.hash_hex(),
            master_seed: plan.master_seed,
            artifact_version: ARTIFACT_VERSION.to_string(),
        }
    }

    /// The `# key=value ...` line written at the top of CSV files.
    pub fn comment_line(&self) -> String {
        format!(
            "# kind={} scenario_hash={} master_seed={} artifact_version={}",
            self.kind, self.scenario_hash, self.master_seed, self.artifact_version
        )
    }

    pub fn parse_comment_line(line: &str) -> Result<Self, String> {
        let body = line.strip_prefix('#').ok_or("metadata line must start with `#`")?;
        let mut meta = Metadata {
            kind: String::new(),
            scenario_hash: String::new(),
            master_seed: 0,
            artifact_version: String::new(),
        };
        let mut seen_seed = false;
        for pair in body.split_whitespace() {
            let (k, v) = pair.split_once('=').ok_or_else(|| format!("bad metadata field `{pair}`"))?;
            match k {
                "kind" => meta.kind = v.to_string(),
                "scenario_hash" => meta.scenario_hash = v.to_string(),
                "master_seed" => {
                    meta.master_seed = v.parse().map_err(|_| format!("bad master_seed `{v}`"))?;
                    seen_seed = true;
                }
                "artifact_version" => meta.artifact_version = v.to_string(),
                _ => return Err(format!("unknown metadata field `{k}`")),
            }
        }
        if meta.kind.is_empty() || meta.scenario_hash.is_empty() || !seen_seed {
            return Err("metadata line is missing kind, scenario_hash or master_seed".into());
        }
        Ok(meta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExportFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            _ => Err(format!("unknown format `{s}` (expected csv or json)")),
        }
    }
}

impl fmt::Display for ExportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExportFormat::Csv => "csv",
            ExportFormat::Json => "json",
        })
    }
}

fn csv_bytes<T: Serialize>(meta: &Metadata, rows: &[T]) -> Vec<u8> {
    let mut out = meta.comment_line().into_bytes();
    out.push(b'\n');
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).expect("rows serialize to CSV");
    }
    w.into_inner().expect("in-memory writer")
}

fn parse_csv<T: DeserializeOwned>(text: &str, path: &Path) -> Result<(Metadata, Vec<T>), HarnessError> {
    let bad = |message: String| HarnessError::Format { path: path.to_path_buf(), message };
    let (first, rest) = text.split_once('\n').ok_or_else(|| bad("empty file".into()))?;
    let meta = Metadata::parse_comment_line(first.trim_end_matches('\r')).map_err(bad)?;
    let rows = csv::Reader::from_reader(rest.as_bytes())
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|e| bad(e.to_string()))?;
    Ok((meta, rows))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    let io = |source| HarnessError::Io { path: path.to_path_buf(), source };
    let mut f = fs::File::create(path).map_err(io)?;
    f.write_all(bytes).map_err(io)
}

fn read_file(path: &Path) -> Result<String, HarnessError> {
    fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })
}

fn json_bytes<T: Serialize>(table: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(table).expect("tables serialize to JSON");
    v.push(b'\n');
    v
}

fn parse_json<T: DeserializeOwned>(text: &str, path: &Path) -> Result<T, HarnessError> {
    serde_json::from_str(text).map_err(|e| HarnessError::Format { path: path.to_path_buf(), message: e.to_string() })
}

impl ElementTable {
    pub fn to_bytes(&self, format: ExportFormat) -> Vec<u8> {
        match format {
            ExportFormat::Csv => csv_bytes(&self.metadata, &self.rows),
            ExportFormat::Json => json_bytes(self),
        }
    }

    pub fn export(&self, format: ExportFormat, path: &Path) -> Result<(), HarnessError> {
        write_file(path, &self.to_bytes(format))
    }

    /// Reads a table written by [`ElementTable::export`]. CSV files carry no
    /// reference curves, so they come back recomputed from the rows.
    pub fn import(format: ExportFormat, path: &Path) -> Result<Self, HarnessError> {
        let text = read_file(path)?;
        match format {
            ExportFormat::Json => parse_json(&text, path),
            ExportFormat::Csv => {
                let (metadata, rows): (Metadata, Vec<ElementRow>) = parse_csv(&text, path)?;
                let anchor_n = rows.iter().map(|r| r.n).max().unwrap_or(0);
                let reference_curves = anchored_curves(&rows, anchor_n);
                Ok(ElementTable { metadata, rows, reference_curves })
            }
        }
    }
}

impl IterationTable {
    pub fn to_bytes(&self, format: ExportFormat) -> Vec<u8> {
        match format {
            ExportFormat::Csv => csv_bytes(&self.metadata, &self.rows),
            ExportFormat::Json => json_bytes(self),
        }
    }

    pub fn export(&self, format: ExportFormat, path: &Path) -> Result<(), HarnessError> {
        write_file(path, &self.to_bytes(format))
    }

    pub fn import(format: ExportFormat, path: &Path) -> Result<Self, HarnessError> {
        let text = read_file(path)?;
        match format {
            ExportFormat::Json => parse_json(&text, path),
            ExportFormat::Csv => {
                let (metadata, rows): (Metadata, Vec<IterationRow>) = parse_csv(&text, path)?;
                Ok(IterationTable { metadata, rows })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{sweep_elements, sweep_iterations};
    use crate::optimizers::Algorithm;
    use crate::scenario::Scenario;

    fn plan() -> TrialPlan {
        let mut s = Scenario::default();
        s.optimizer.t = 3;
        s.optimizer.k = 20;
        s.optimizer.algorithms = vec![Algorithm::CrossEntropy, Algorithm::NoRis];
        s.run.n_values = vec![4, 9];
        s.run.trials = 5;
        s.run.seed = 77;
        TrialPlan::from_scenario(&s.with_elements(9))
    }

    #[test]
    fn element_table_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let t = sweep_elements(&plan()).unwrap();
        for format in [ExportFormat::Csv, ExportFormat::Json] {
            let path = dir.path().join(format!("e.{format}"));
            t.export(format, &path).unwrap();
            assert_eq!(ElementTable::import(format, &path).unwrap(), t);
        }
    }

    #[test]
    fn iteration_table_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let t = sweep_iterations(&plan(), &[0, 20, 40, 60]).unwrap();
        for format in [ExportFormat::Csv, ExportFormat::Json] {
            let path = dir.path().join(format!("i.{format}"));
            t.export(format, &path).unwrap();
            assert_eq!(IterationTable::import(format, &path).unwrap(), t);
        }
    }

    #[test]
    fn csv_layout_and_metadata() {
        let t = sweep_elements(&plan()).unwrap();
        let text = String::from_utf8(t.to_bytes(ExportFormat::Csv)).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("# kind=sweep_elements scenario_hash="));
        assert_eq!(lines.next().unwrap(), "N,algo,mean_db,q10_db,q90_db,ratio,n_trials");
        let json: serde_json::Value = serde_json::from_slice(&t.to_bytes(ExportFormat::Json)).unwrap();
        assert_eq!(json["metadata"]["master_seed"], 77);
    }

    #[test]
    fn io_errors_name_the_path() {
        let t = sweep_elements(&plan()).unwrap();
        let err = t.export(ExportFormat::Csv, Path::new("/nonexistent-dir/x.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.csv"));
    }
}
