//! Distribution balancing over the 42 dimension-score pairs: marginal
//! frequency counting, quartile thresholds, minority augmentation through
//! pluggable synthesize/verify hooks, and rarity-guided pruning.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::process::{Command, Stdio};
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::annotation::consensus_assessment;
use crate::types::{Assessment, DimensionId, SampleRecord, ScoreLevel};

#[derive(Debug, Error)]
pub enum BalanceError {
    #[error("sample {0:?} carries no assessments")]
    IncompleteSample(String),
    #[error("frequency table has zero count for ({dimension}, {score}) present in a sample")]
    InconsistentTable {
        dimension: DimensionId,
        score: ScoreLevel,
    },
    #[error(transparent)]
    Hook(#[from] HookError),
}

#[derive(Debug, Error)]
#[error("synthesis hook failed: {0}")]
pub struct HookError(pub String);

/// A complete score per dimension, the unit the balancer counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScoreVector([ScoreLevel; 14]);

impl ScoreVector {
    pub fn new(scores: [ScoreLevel; 14]) -> ScoreVector {
        ScoreVector(scores)
    }

    pub fn from_assessment(a: &Assessment) -> ScoreVector {
        ScoreVector(a.scores())
    }

    pub fn get(&self, d: DimensionId) -> ScoreLevel {
        self.0[d.index()]
    }

    pub fn set(&mut self, d: DimensionId, s: ScoreLevel) {
        self.0[d.index()] = s;
    }

    pub fn iter(&self) -> impl Iterator<Item = (DimensionId, ScoreLevel)> + '_ {
        DimensionId::ALL.iter().map(move |&d| (d, self.get(d)))
    }
}

impl Serialize for ScoreVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(14))?;
        for (d, s) in self.iter() {
            map.serialize_entry(d.tag(), &s)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for ScoreVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct VecVisitor;

        impl<'de> Visitor<'de> for VecVisitor {
            type Value = ScoreVector;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a map of 14 dimension tags to scores")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<ScoreVector, A::Error> {
                let mut slots = [None; 14];
                while let Some((tag, score)) = map.next_entry::<String, ScoreLevel>()? {
                    let d = DimensionId::from_str(&tag).map_err(de::Error::custom)?;
                    slots[d.index()] = Some(score);
                }
                let mut out = [ScoreLevel::Poor; 14];
                for (i, slot) in slots.iter().enumerate() {
                    out[i] = slot.ok_or_else(|| {
                        de::Error::custom(format!("missing dimension {}", DimensionId::ALL[i]))
                    })?;
                }
                Ok(ScoreVector(out))
            }
        }

        deserializer.deserialize_map(VecVisitor)
    }
}

/// A sample reduced to the fields the balancer needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredSample {
    pub sample_id: String,
    pub scores: ScoreVector,
}

impl ScoredSample {
    /// Collapse a manifest record to its score vector, taking the
    /// per-dimension consensus when several annotators are present.
    pub fn from_record(record: &SampleRecord) -> Result<ScoredSample, BalanceError> {
        let assessments: Vec<Assessment> = record.assessments.values().cloned().collect();
        let consensus = consensus_assessment(&assessments)
            .map_err(|_| BalanceError::IncompleteSample(record.sample_id.clone()))?;
        Ok(ScoredSample {
            sample_id: record.sample_id.clone(),
            scores: ScoreVector::from_assessment(&consensus),
        })
    }
}

/// Marginal counts of the 42 dimension-score pairs over a dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyTable {
    counts: [[u64; 3]; 14],
}

impl FrequencyTable {
    pub fn zero() -> FrequencyTable {
        FrequencyTable {
            counts: [[0; 3]; 14],
        }
    }

    pub fn get(&self, d: DimensionId, s: ScoreLevel) -> u64 {
        self.counts[d.index()][(s.value() - 1) as usize]
    }

    fn count_sample(&mut self, sample: &ScoredSample) {
        for (d, s) in sample.scores.iter() {
            self.counts[d.index()][(s.value() - 1) as usize] += 1;
        }
    }

    fn discount_sample(&mut self, sample: &ScoredSample) {
        for (d, s) in sample.scores.iter() {
            self.counts[d.index()][(s.value() - 1) as usize] -= 1;
        }
    }

    /// The 42 counts as a flat multiset.
    pub fn values(&self) -> Vec<u64> {
        self.counts.iter().flatten().copied().collect()
    }

    /// (dimension, score, count) triples in fixed (d asc, s asc) order.
    pub fn entries(&self) -> impl Iterator<Item = (DimensionId, ScoreLevel, u64)> + '_ {
        DimensionId::ALL
            .iter()
            .flat_map(move |&d| ScoreLevel::ALL.iter().map(move |&s| (d, s, self.get(d, s))))
    }
}

impl Serialize for FrequencyTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(14))?;
        for &d in &DimensionId::ALL {
            map.serialize_entry(d.tag(), &self.counts[d.index()])?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for FrequencyTable {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let map = BTreeMap::<String, [u64; 3]>::deserialize(deserializer)?;
        let mut table = FrequencyTable::zero();
        for (tag, row) in map {
            let d = DimensionId::from_str(&tag).map_err(de::Error::custom)?;
            table.counts[d.index()] = row;
        }
        Ok(table)
    }
}

/// Exact marginal counts per (dimension, score) pair.
pub fn marginal_frequencies(dataset: &[ScoredSample]) -> FrequencyTable {
    let mut table = FrequencyTable::zero();
    for sample in dataset {
        table.count_sample(sample);
    }
    table
}

/// Q1/Q3 of the 42-count multiset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BalanceThresholds {
    pub tau_low: f64,
    pub tau_high: f64,
}

/// Quantile by linear interpolation between closest ranks; the single place
/// to swap in a different estimator.
fn quantile_linear(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// 25th and 75th percentiles of the frequency multiset; fractional values
/// are possible.
pub fn quartile_thresholds(table: &FrequencyTable) -> BalanceThresholds {
    let mut values: Vec<f64> = table.values().iter().map(|&v| v as f64).collect();
    values.sort_by(|a, b| a.partial_cmp(b).expect("counts are finite"));
    BalanceThresholds {
        tau_low: quantile_linear(&values, 0.25),
        tau_high: quantile_linear(&values, 0.75),
    }
}

/// Global rarity: the sum over dimensions of the reciprocal marginal
/// frequency of the sample's own (dimension, score) pairs. Low rarity means
/// the sample is globally common.
pub fn rarity(sample: &ScoredSample, table: &FrequencyTable) -> Result<f64, BalanceError> {
    let mut total = 0.0;
    for (d, s) in sample.scores.iter() {
        let count = table.get(d, s);
        if count == 0 {
            return Err(BalanceError::InconsistentTable {
                dimension: d,
                score: s,
            });
        }
        total += 1.0 / count as f64;
    }
    Ok(total)
}

/// Candidate generation and verification, abstracted so that external
/// generation/verification services and deterministic test hooks plug into
/// the same balancing loop.
pub trait SynthesisHooks {
    fn synthesize(
        &mut self,
        dimension: DimensionId,
        target: ScoreLevel,
    ) -> Result<ScoredSample, HookError>;

    /// The observed score of `sample` on `dimension`.
    fn verify(
        &mut self,
        sample: &ScoredSample,
        dimension: DimensionId,
    ) -> Result<ScoreLevel, HookError>;
}

/// Built-in deterministic hook pair: a template synthesizer that fills the
/// target pair and draws the other dimensions from a seeded generator, and
/// an echo verifier that reports the candidate's own score.
pub struct BuiltinHooks {
    rng: ChaCha8Rng,
    counter: u64,
}

impl BuiltinHooks {
    pub fn seeded(seed: u64) -> BuiltinHooks {
        BuiltinHooks {
            rng: ChaCha8Rng::seed_from_u64(seed),
            counter: 0,
        }
    }
}

impl SynthesisHooks for BuiltinHooks {
    fn synthesize(
        &mut self,
        dimension: DimensionId,
        target: ScoreLevel,
    ) -> Result<ScoredSample, HookError> {
        self.counter += 1;
        let mut scores = [ScoreLevel::Excellent; 14];
        for slot in scores.iter_mut() {
            let v: u8 = self.rng.random_range(1..=3);
            *slot = ScoreLevel::from_value(v).expect("range 1..=3");
        }
        let mut scores = ScoreVector::new(scores);
        scores.set(dimension, target);
        Ok(ScoredSample {
            sample_id: format!("synth-{:06}", self.counter),
            scores,
        })
    }

    fn verify(
        &mut self,
        sample: &ScoredSample,
        dimension: DimensionId,
    ) -> Result<ScoreLevel, HookError> {
        Ok(sample.scores.get(dimension))
    }
}

/// Hooks backed by an external command speaking one JSON request per line
/// on stdin and one JSON response on stdout. See the README for the exact
/// request/response shapes.
pub struct ExternalCommandHooks {
    command: String,
}

#[derive(Serialize)]
#[serde(tag = "op", rename_all = "snake_case")]
enum HookRequest<'a> {
    Synthesize {
        dimension: DimensionId,
        target_score: ScoreLevel,
    },
    Verify {
        dimension: DimensionId,
        sample: &'a ScoredSample,
    },
}

#[derive(Deserialize)]
struct VerifyResponse {
    score: ScoreLevel,
}

impl ExternalCommandHooks {
    pub fn new(command: impl Into<String>) -> ExternalCommandHooks {
        ExternalCommandHooks {
            command: command.into(),
        }
    }

    fn call(&self, request: &HookRequest<'_>) -> Result<String, HookError> {
        let payload = serde_json::to_string(request).map_err(|e| HookError(e.to_string()))?;
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(&self.command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| HookError(format!("spawn {:?}: {e}", self.command)))?;
        child
            .stdin
            .take()
            .expect("stdin piped")
            .write_all(format!("{payload}\n").as_bytes())
            .map_err(|e| HookError(e.to_string()))?;
        let out = child
            .wait_with_output()
            .map_err(|e| HookError(e.to_string()))?;
        if !out.status.success() {
            return Err(HookError(format!(
                "hook command exited with {:?}",
                out.status.code()
            )));
        }
        let text = String::from_utf8(out.stdout).map_err(|e| HookError(e.to_string()))?;
        Ok(text.lines().next().unwrap_or_default().to_string())
    }
}

impl SynthesisHooks for ExternalCommandHooks {
    fn synthesize(
        &mut self,
        dimension: DimensionId,
        target: ScoreLevel,
    ) -> Result<ScoredSample, HookError> {
        let line = self.call(&HookRequest::Synthesize {
            dimension,
            target_score: target,
        })?;
        serde_json::from_str(&line).map_err(|e| HookError(format!("bad synthesize reply: {e}")))
    }

    fn verify(
        &mut self,
        sample: &ScoredSample,
        dimension: DimensionId,
    ) -> Result<ScoreLevel, HookError> {
        let line = self.call(&HookRequest::Verify { dimension, sample })?;
        let resp: VerifyResponse =
            serde_json::from_str(&line).map_err(|e| HookError(format!("bad verify reply: {e}")))?;
        Ok(resp.score)
    }
}

/// Result of processing one deficient pair in phase 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentationOutcome {
    pub dimension: DimensionId,
    pub score: ScoreLevel,
    pub added: Vec<String>,
    pub attempts: u64,
    /// True when the attempt budget ran out before reaching the threshold.
    pub exhausted: bool,
}

/// One pruned sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemovalEvent {
    pub sample_id: String,
    pub dimension: DimensionId,
    pub score: ScoreLevel,
    pub rarity: f64,
}

/// Phase 1: for each pair below `tau_low` (d ascending, s ascending),
/// synthesize candidates until the count reaches the threshold or the
/// attempt budget (`max_attempts` per deficit unit) runs out. A candidate
/// is accepted only when verification observes exactly the target score on
/// the target dimension; the observation is authoritative for that
/// dimension. Accepted samples are counted in full so the table stays
/// consistent with the dataset.
pub fn phase1_augment(
    mut dataset: Vec<ScoredSample>,
    table: &mut FrequencyTable,
    tau_low: f64,
    hooks: &mut dyn SynthesisHooks,
    max_attempts: u64,
) -> Result<(Vec<ScoredSample>, Vec<AugmentationOutcome>), BalanceError> {
    let mut outcomes = Vec::new();
    for &d in &DimensionId::ALL {
        for &s in &ScoreLevel::ALL {
            if (table.get(d, s) as f64) >= tau_low {
                continue;
            }
            let deficit = (tau_low - table.get(d, s) as f64).ceil() as u64;
            let budget = max_attempts * deficit;
            let mut attempts = 0;
            let mut added = Vec::new();
            while (table.get(d, s) as f64) < tau_low && attempts < budget {
                attempts += 1;
                let candidate = hooks.synthesize(d, s)?;
                if hooks.verify(&candidate, d)? == s {
                    let mut accepted = candidate;
                    accepted.scores.set(d, s);
                    table.count_sample(&accepted);
                    added.push(accepted.sample_id.clone());
                    dataset.push(accepted);
                }
            }
            outcomes.push(AugmentationOutcome {
                dimension: d,
                score: s,
                added,
                attempts,
                exhausted: (table.get(d, s) as f64) < tau_low,
            });
        }
    }
    Ok((dataset, outcomes))
}

/// Phase 2: while any pair exceeds `tau_high`, take the most
/// overrepresented pair (ties: lowest dimension, then lowest score), rank
/// its samples by rarity against the current table (ties by sample id), and
/// remove the `⌈excess⌉` most common ones, updating all affected counts.
pub fn phase2_prune(
    mut dataset: Vec<ScoredSample>,
    table: &mut FrequencyTable,
    tau_high: f64,
) -> Result<(Vec<ScoredSample>, Vec<RemovalEvent>), BalanceError> {
    let mut removals = Vec::new();
    loop {
        let mut worst: Option<(DimensionId, ScoreLevel, f64)> = None;
        for (d, s, count) in table.entries() {
            let excess = count as f64 - tau_high;
            if excess > 0.0 && worst.is_none_or(|(_, _, e)| excess > e) {
                worst = Some((d, s, excess));
            }
        }
        let Some((d, s, excess)) = worst else {
            break;
        };

        let mut candidates = Vec::new();
        for (idx, sample) in dataset.iter().enumerate() {
            if sample.scores.get(d) == s {
                candidates.push((rarity(sample, table)?, idx));
            }
        }
        candidates.sort_by(|(ra, ia), (rb, ib)| {
            ra.partial_cmp(rb)
                .expect("rarity is finite")
                .then_with(|| dataset[*ia].sample_id.cmp(&dataset[*ib].sample_id))
        });

        let n = excess.ceil() as usize;
        let mut doomed = vec![false; dataset.len()];
        for &(gamma, idx) in candidates.iter().take(n) {
            let sample = &dataset[idx];
            table.discount_sample(sample);
            doomed[idx] = true;
            removals.push(RemovalEvent {
                sample_id: sample.sample_id.clone(),
                dimension: d,
                score: s,
                rarity: gamma,
            });
        }
        let mut keep = doomed.iter().map(|d| !d);
        dataset.retain(|_| keep.next().expect("one flag per sample"));
    }
    Ok((dataset, removals))
}

#[derive(Debug, Clone, Copy)]
pub struct BalanceOptions {
    /// Synthesis attempts allowed per missing sample of a deficient pair.
    pub max_attempts: u64,
}

impl Default for BalanceOptions {
    fn default() -> Self {
        BalanceOptions { max_attempts: 10 }
    }
}

/// Everything a balancing run decided, for reporting and reproducibility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalanceReport {
    pub thresholds: BalanceThresholds,
    pub before: FrequencyTable,
    pub after: FrequencyTable,
    pub augmentations: Vec<AugmentationOutcome>,
    pub removals: Vec<RemovalEvent>,
    pub warnings: Vec<String>,
}

/// Full balancing pipeline: count, fix thresholds once, augment minorities,
/// prune majorities. Identical inputs, seeds and hooks yield byte-identical
/// reports.
pub fn balance(
    dataset: Vec<ScoredSample>,
    hooks: &mut dyn SynthesisHooks,
    options: &BalanceOptions,
) -> Result<(Vec<ScoredSample>, BalanceReport), BalanceError> {
    let before = marginal_frequencies(&dataset);
    let thresholds = quartile_thresholds(&before);
    let mut table = before.clone();

    let (dataset, augmentations) = phase1_augment(
        dataset,
        &mut table,
        thresholds.tau_low,
        hooks,
        options.max_attempts,
    )?;
    let (dataset, removals) = phase2_prune(dataset, &mut table, thresholds.tau_high)?;

    let after = marginal_frequencies(&dataset);
    debug_assert_eq!(after, table);

    let mut warnings = Vec::new();
    for aug in &augmentations {
        if aug.exhausted {
            warnings.push(format!(
                "augmentation exhausted for ({}, {}) after {} attempts",
                aug.dimension,
                aug.score.value(),
                aug.attempts
            ));
        }
    }
    // Pruning may re-create minorities; phase 1 is not re-run.
    for (d, s, count) in after.entries() {
        if (count as f64) < thresholds.tau_low {
            warnings.push(format!(
                "({}, {}) ended below tau_low: {} < {}",
                d,
                s.value(),
                count,
                thresholds.tau_low
            ));
        }
    }

    Ok((
        dataset,
        BalanceReport {
            thresholds,
            before,
            after,
            augmentations,
            removals,
            warnings,
        },
    ))
}
