//! File formats: JSONL dataset manifests, response/reward/vote/feature
//! rows, CSV report tables. Serialization is deterministic (fixed key
//! order, canonical float rendering) and every parse error carries its
//! line number.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotation::{AnnotationError, PairwiseTally, Ranking};
use crate::balance::{ScoreVector, ScoredSample};
use crate::calibration::CalibrationVote;
use crate::reward::RewardBreakdown;
use crate::sampling::{FeatureMatrix, SamplingError};
use crate::scoring::ScoringConfig;
use crate::types::{Assessment, Dar, DimensionId, SampleRecord, ScoreLevel};

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("io error on {path}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: invalid {field}")]
    Schema { line: usize, field: String },
}

impl ManifestError {
    fn io(path: &Path, source: std::io::Error) -> ManifestError {
        ManifestError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn schema(line: usize, field: impl Into<String>) -> ManifestError {
        ManifestError::Schema {
            line,
            field: field.into(),
        }
    }
}

/// One manifest line: the core sample record plus optional per-dimension
/// DAR estimates and a precomputed score. Unknown fields survive the round
/// trip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRow {
    #[serde(flatten)]
    pub record: SampleRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dar: Option<BTreeMap<DimensionId, Dar>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vectra_score: Option<f64>,
    #[serde(flatten)]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

impl ManifestRow {
    pub fn new(record: SampleRecord) -> ManifestRow {
        ManifestRow {
            record,
            dar: None,
            vectra_score: None,
            extra: serde_json::Map::new(),
        }
    }

    /// The row's single assessment view: the per-dimension consensus when
    /// several annotators are present.
    pub fn consensus(&self) -> Result<Assessment, AnnotationError> {
        let assessments: Vec<Assessment> = self.record.assessments.values().cloned().collect();
        crate::annotation::consensus_assessment(&assessments)
    }
}

/// An ordered collection of manifest rows with unique sample ids.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    pub rows: Vec<ManifestRow>,
}

impl Manifest {
    pub fn get(&self, sample_id: &str) -> Option<&ManifestRow> {
        self.rows.iter().find(|r| r.record.sample_id == sample_id)
    }
}

const REQUIRED_FIELDS: [&str; 6] = [
    "sample_id",
    "source_image",
    "trans_image",
    "lang_pair",
    "system_id",
    "assessments",
];

/// Parse a JSONL manifest. Every row must carry the full schema; errors
/// name the offending line and field, and a malformed line never corrupts
/// its neighbors.
pub fn read_manifest(path: &Path) -> Result<Manifest, ManifestError> {
    let file = File::open(path).map_err(|e| ManifestError::io(path, e))?;
    parse_manifest(BufReader::new(file), path)
}

fn parse_manifest<R: Read>(reader: BufReader<R>, path: &Path) -> Result<Manifest, ManifestError> {
    let mut rows = Vec::new();
    let mut seen_ids = std::collections::BTreeSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| ManifestError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(&line)
            .map_err(|e| ManifestError::schema(line_no, format!("json ({e})")))?;
        let object = value
            .as_object()
            .ok_or_else(|| ManifestError::schema(line_no, "json (expected object)"))?;
        for field in REQUIRED_FIELDS {
            if !object.contains_key(field) {
                return Err(ManifestError::schema(line_no, field));
            }
        }
        let row: ManifestRow = serde_json::from_value(value)
            .map_err(|e| ManifestError::schema(line_no, e.to_string()))?;
        if row.record.sample_id.is_empty() {
            return Err(ManifestError::schema(line_no, "sample_id (empty)"));
        }
        if !seen_ids.insert(row.record.sample_id.clone()) {
            return Err(ManifestError::schema(line_no, "sample_id (duplicate)"));
        }
        rows.push(row);
    }
    Ok(Manifest { rows })
}

/// Serialize a manifest as JSONL, one object per line, LF endings, keys in
/// fixed order. The same manifest always produces identical bytes.
pub fn write_manifest(manifest: &Manifest, path: &Path) -> Result<(), ManifestError> {
    write_jsonl(&manifest.rows, path)
}

/// Generic JSONL reader with line-numbered errors; blank lines are skipped.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, ManifestError> {
    let file = File::open(path).map_err(|e| ManifestError::io(path, e))?;
    let reader = BufReader::new(file);
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| ManifestError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let item: T = serde_json::from_str(&line)
            .map_err(|e| ManifestError::schema(idx + 1, e.to_string()))?;
        out.push(item);
    }
    Ok(out)
}

/// Generic JSONL writer, one object per line.
pub fn write_jsonl<T: Serialize>(items: &[T], path: &Path) -> Result<(), ManifestError> {
    let file = File::create(path).map_err(|e| ManifestError::io(path, e))?;
    let mut writer = BufWriter::new(file);
    for item in items {
        let line = serde_json::to_string(item)
            .map_err(|e| ManifestError::io(path, std::io::Error::other(e)))?;
        writer
            .write_all(line.as_bytes())
            .and_then(|_| writer.write_all(b"\n"))
            .map_err(|e| ManifestError::io(path, e))?;
    }
    writer.flush().map_err(|e| ManifestError::io(path, e))
}

/// A flat report table for CSV output.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// RFC-4180-style CSV with a mandatory header row.
pub fn write_report_csv(table: &ReportTable, path: &Path) -> Result<(), ManifestError> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| csv_io(path, e))?;
    writer
        .write_record(&table.header)
        .map_err(|e| csv_io(path, e))?;
    for row in &table.rows {
        writer.write_record(row).map_err(|e| csv_io(path, e))?;
    }
    writer.flush().map_err(|e| ManifestError::io(path, e))
}

fn csv_io(path: &Path, e: csv::Error) -> ManifestError {
    ManifestError::io(path, std::io::Error::other(e))
}

/// A raw judge response awaiting parsing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseRow {
    pub sample_id: String,
    pub response_text: String,
    #[serde(default)]
    pub annotator_id: Option<String>,
    #[serde(default)]
    pub source_image: String,
    #[serde(default)]
    pub trans_image: String,
    #[serde(default)]
    pub lang_pair: String,
    #[serde(default)]
    pub system_id: String,
}

/// A response paired with gold scores, either inline or joined from a gold
/// manifest by sample id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardRow {
    #[serde(default)]
    pub sample_id: Option<String>,
    pub response_text: String,
    #[serde(default)]
    pub gold: Option<BTreeMap<DimensionId, ScoreLevel>>,
}

/// One reward result row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardOutputRow {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_id: Option<String>,
    #[serde(flatten)]
    pub breakdown: RewardBreakdown,
}

/// One expert accept/reject vote at an estimated DAR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoteRow {
    pub sample_id: String,
    pub dar: Dar,
    pub reject: bool,
}

impl VoteRow {
    pub fn vote(&self) -> CalibrationVote {
        CalibrationVote {
            dar: self.dar,
            reject: self.reject,
        }
    }
}

/// A pairwise tally for one sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TallyRow {
    pub sample_id: String,
    #[serde(flatten)]
    pub tally: PairwiseTally,
}

/// A ranking computed for one sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingRow {
    pub sample_id: String,
    #[serde(flatten)]
    pub ranking: Ranking,
}

/// A balanced-dataset sample as written by the balancer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredSampleRow {
    pub sample_id: String,
    pub scores: ScoreVector,
}

impl From<ScoredSample> for ScoredSampleRow {
    fn from(s: ScoredSample) -> ScoredSampleRow {
        ScoredSampleRow {
            sample_id: s.sample_id,
            scores: s.scores,
        }
    }
}

/// One feature vector: `{"id": ..., "v": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub id: String,
    pub v: Vec<f64>,
}

/// Read a feature JSONL file into a matrix, validating dimensions and
/// finiteness line by line.
pub fn read_features(path: &Path) -> Result<FeatureMatrix, ManifestError> {
    let rows: Vec<FeatureRow> = read_jsonl(path)?;
    let mut ids = Vec::with_capacity(rows.len());
    let mut vectors = Vec::with_capacity(rows.len());
    let dim = rows.first().map_or(0, |r| r.v.len());
    for (idx, row) in rows.into_iter().enumerate() {
        if row.v.len() != dim || row.v.iter().any(|x| !x.is_finite()) {
            return Err(ManifestError::schema(idx + 1, "v"));
        }
        ids.push(row.id);
        vectors.push(row.v);
    }
    FeatureMatrix::new(ids, vectors).map_err(|e: SamplingError| ManifestError::Schema {
        line: 0,
        field: e.to_string(),
    })
}

/// Load a scoring config from a JSON file and validate it.
pub fn read_scoring_config(path: &Path) -> Result<ScoringConfig, ManifestError> {
    let text = std::fs::read_to_string(path).map_err(|e| ManifestError::io(path, e))?;
    let config: ScoringConfig =
        serde_json::from_str(&text).map_err(|e| ManifestError::schema(1, e.to_string()))?;
    config
        .validate()
        .map_err(|e| ManifestError::schema(1, e.to_string()))?;
    Ok(config)
}
