//! Core domain types: dimensions, scores, defect ratios, assessments, samples.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("malformed score label: {0:?}")]
    MalformedLabel(String),
    #[error("value {0} outside [0, 1]")]
    DomainError(f64),
    #[error("assessment missing dimension {0}")]
    MissingDimension(DimensionId),
    #[error("duplicate dimension {0}")]
    DuplicateDimension(DimensionId),
    #[error("unknown dimension tag: {0:?}")]
    UnknownDimension(String),
}

/// Error category of a quality dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Category {
    Accuracy,
    Style,
}

/// The 14 visual quality dimensions, eight textual and six scene-level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DimensionId {
    #[serde(rename = "t_size")]
    TextSize,
    #[serde(rename = "t_color")]
    TextColor,
    #[serde(rename = "t_pos")]
    TextPosition,
    #[serde(rename = "t_font")]
    TextFont,
    #[serde(rename = "t_layout")]
    TextLayout,
    #[serde(rename = "t_pixel")]
    TextPixelClarity,
    #[serde(rename = "t_hallu")]
    TextHallucination,
    #[serde(rename = "t_omiss")]
    TextOmission,
    #[serde(rename = "s_size")]
    SceneSize,
    #[serde(rename = "s_color")]
    SceneColor,
    #[serde(rename = "s_pos")]
    ScenePosition,
    #[serde(rename = "s_pixel")]
    ScenePixelClarity,
    #[serde(rename = "s_hallu")]
    SceneHallucination,
    #[serde(rename = "s_omiss")]
    SceneOmission,
}

impl DimensionId {
    /// All dimensions in canonical schema order.
    pub const ALL: [DimensionId; 14] = [
        DimensionId::TextSize,
        DimensionId::TextColor,
        DimensionId::TextPosition,
        DimensionId::TextFont,
        DimensionId::TextLayout,
        DimensionId::TextPixelClarity,
        DimensionId::TextHallucination,
        DimensionId::TextOmission,
        DimensionId::SceneSize,
        DimensionId::SceneColor,
        DimensionId::ScenePosition,
        DimensionId::ScenePixelClarity,
        DimensionId::SceneHallucination,
        DimensionId::SceneOmission,
    ];

    pub const COUNT: usize = 14;

    /// Index into [`DimensionId::ALL`].
    pub const fn index(self) -> usize {
        match self {
            DimensionId::TextSize => 0,
            DimensionId::TextColor => 1,
            DimensionId::TextPosition => 2,
            DimensionId::TextFont => 3,
            DimensionId::TextLayout => 4,
            DimensionId::TextPixelClarity => 5,
            DimensionId::TextHallucination => 6,
            DimensionId::TextOmission => 7,
            DimensionId::SceneSize => 8,
            DimensionId::SceneColor => 9,
            DimensionId::ScenePosition => 10,
            DimensionId::ScenePixelClarity => 11,
            DimensionId::SceneHallucination => 12,
            DimensionId::SceneOmission => 13,
        }
    }

    /// Short schema tag, e.g. `t_size`.
    pub const fn tag(self) -> &'static str {
        match self {
            DimensionId::TextSize => "t_size",
            DimensionId::TextColor => "t_color",
            DimensionId::TextPosition => "t_pos",
            DimensionId::TextFont => "t_font",
            DimensionId::TextLayout => "t_layout",
            DimensionId::TextPixelClarity => "t_pixel",
            DimensionId::TextHallucination => "t_hallu",
            DimensionId::TextOmission => "t_omiss",
            DimensionId::SceneSize => "s_size",
            DimensionId::SceneColor => "s_color",
            DimensionId::ScenePosition => "s_pos",
            DimensionId::ScenePixelClarity => "s_pixel",
            DimensionId::SceneHallucination => "s_hallu",
            DimensionId::SceneOmission => "s_omiss",
        }
    }

    /// Hallucination and omission dimensions are content-fidelity (Accuracy)
    /// violations; everything else is visual presentation (Style).
    pub const fn category(self) -> Category {
        match self {
            DimensionId::TextHallucination
            | DimensionId::TextOmission
            | DimensionId::SceneHallucination
            | DimensionId::SceneOmission => Category::Accuracy,
            _ => Category::Style,
        }
    }
}

// 4 Accuracy and 10 Style dimensions, checked at compile time.
const _: () = {
    let mut acc = 0;
    let mut i = 0;
    while i < DimensionId::ALL.len() {
        if matches!(DimensionId::ALL[i].category(), Category::Accuracy) {
            acc += 1;
        }
        i += 1;
    }
    assert!(acc == 4 && DimensionId::ALL.len() == 14);
};

impl fmt::Display for DimensionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for DimensionId {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DimensionId::ALL
            .iter()
            .copied()
            .find(|d| d.tag() == s)
            .ok_or_else(|| CoreError::UnknownDimension(s.to_string()))
    }
}

/// Category of a dimension: Accuracy for the four hallucination/omission
/// dimensions, Style for the remaining ten.
pub fn dimension_category(d: DimensionId) -> Category {
    d.category()
}

/// Ordinal quality score on the 3-point scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum ScoreLevel {
    Poor = 1,
    Fair = 2,
    Excellent = 3,
}

impl ScoreLevel {
    pub const ALL: [ScoreLevel; 3] = [ScoreLevel::Poor, ScoreLevel::Fair, ScoreLevel::Excellent];

    pub const fn value(self) -> u8 {
        self as u8
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.value())
    }

    /// Canonical label, e.g. `2-Fair`.
    pub const fn label(self) -> &'static str {
        match self {
            ScoreLevel::Poor => "1-Poor",
            ScoreLevel::Fair => "2-Fair",
            ScoreLevel::Excellent => "3-Excellent",
        }
    }

    pub const fn from_value(v: u8) -> Option<ScoreLevel> {
        match v {
            1 => Some(ScoreLevel::Poor),
            2 => Some(ScoreLevel::Fair),
            3 => Some(ScoreLevel::Excellent),
            _ => None,
        }
    }
}

impl fmt::Display for ScoreLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl TryFrom<u8> for ScoreLevel {
    type Error = CoreError;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        ScoreLevel::from_value(v).ok_or(CoreError::MalformedLabel(v.to_string()))
    }
}

impl Serialize for ScoreLevel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.value())
    }
}

impl<'de> Deserialize<'de> for ScoreLevel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = u8::deserialize(deserializer)?;
        ScoreLevel::from_value(v)
            .ok_or_else(|| de::Error::custom(format!("score must be 1, 2 or 3, got {v}")))
    }
}

/// Parse a score label into a level. Canonical labels are matched
/// case-insensitively with surrounding whitespace ignored; bare numerals
/// `1`/`2`/`3` are also accepted.
pub fn parse_score_label(label: &str) -> Result<ScoreLevel, CoreError> {
    let normalized = label.trim().to_ascii_lowercase();
    match normalized.as_str() {
        "1-poor" | "1" => Ok(ScoreLevel::Poor),
        "2-fair" | "2" => Ok(ScoreLevel::Fair),
        "3-excellent" | "3" => Ok(ScoreLevel::Excellent),
        _ => Err(CoreError::MalformedLabel(label.to_string())),
    }
}

/// Defect Area Ratio: defective area over total relevant area, in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Dar(f64);

impl Dar {
    pub fn new(value: f64) -> Result<Dar, CoreError> {
        if value.is_finite() && (0.0..=1.0).contains(&value) {
            Ok(Dar(value))
        } else {
            Err(CoreError::DomainError(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl<'de> Deserialize<'de> for Dar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = f64::deserialize(deserializer)?;
        Dar::new(v).map_err(de::Error::custom)
    }
}

/// Structured fields extracted from a templated reason sentence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReasonFields {
    pub content: String,
    pub issue: String,
    pub position: String,
    pub effect_dar: Option<Dar>,
}

/// One dimension's reason and score for an image pair.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionAssessment {
    pub dimension: DimensionId,
    pub score: ScoreLevel,
    pub reason: String,
    /// Derived from `reason` at construction; `None` when the reason does not
    /// follow the diagnostic template.
    pub reason_fields: Option<ReasonFields>,
}

impl DimensionAssessment {
    pub fn new(dimension: DimensionId, score: ScoreLevel, reason: impl Into<String>) -> Self {
        let reason = reason.into();
        let reason_fields = crate::parser::extract_reason_fields(&reason);
        DimensionAssessment {
            dimension,
            score,
            reason,
            reason_fields,
        }
    }
}

/// A complete 14-dimension assessment of one image pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Assessment {
    entries: Vec<DimensionAssessment>, // canonical order, one per dimension
}

impl Assessment {
    /// Build from per-dimension entries; every dimension must appear exactly once.
    pub fn from_entries(
        entries: impl IntoIterator<Item = DimensionAssessment>,
    ) -> Result<Assessment, CoreError> {
        let mut slots: [Option<DimensionAssessment>; 14] = Default::default();
        for entry in entries {
            let idx = entry.dimension.index();
            if slots[idx].is_some() {
                return Err(CoreError::DuplicateDimension(entry.dimension));
            }
            slots[idx] = Some(entry);
        }
        for (idx, slot) in slots.iter().enumerate() {
            if slot.is_none() {
                return Err(CoreError::MissingDimension(DimensionId::ALL[idx]));
            }
        }
        Ok(Assessment {
            entries: slots.into_iter().map(|s| s.unwrap()).collect(),
        })
    }

    /// Build from a score per dimension, with empty reasons.
    pub fn from_score_fn(mut score: impl FnMut(DimensionId) -> ScoreLevel) -> Assessment {
        Assessment {
            entries: DimensionId::ALL
                .iter()
                .map(|&d| DimensionAssessment::new(d, score(d), ""))
                .collect(),
        }
    }

    /// All 14 dimensions at the same score, empty reasons.
    pub fn uniform(score: ScoreLevel) -> Assessment {
        Assessment::from_score_fn(|_| score)
    }

    pub fn get(&self, d: DimensionId) -> &DimensionAssessment {
        &self.entries[d.index()]
    }

    pub fn score(&self, d: DimensionId) -> ScoreLevel {
        self.entries[d.index()].score
    }

    /// Entries in canonical dimension order.
    pub fn iter(&self) -> impl Iterator<Item = &DimensionAssessment> {
        self.entries.iter()
    }

    /// Scores in canonical dimension order.
    pub fn scores(&self) -> [ScoreLevel; 14] {
        let mut out = [ScoreLevel::Poor; 14];
        for (i, e) in self.entries.iter().enumerate() {
            out[i] = e.score;
        }
        out
    }
}

// Serialized as a map of dimension tag to {score, reason}, in canonical
// dimension order; reason_fields are re-derived on deserialization.
impl Serialize for Assessment {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry<'a> {
            score: ScoreLevel,
            reason: &'a str,
        }
        let mut map = serializer.serialize_map(Some(14))?;
        for e in &self.entries {
            map.serialize_entry(
                e.dimension.tag(),
                &Entry {
                    score: e.score,
                    reason: &e.reason,
                },
            )?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Assessment {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Entry {
            score: ScoreLevel,
            #[serde(default)]
            reason: String,
        }

        struct AssessmentVisitor;

        impl<'de> Visitor<'de> for AssessmentVisitor {
            type Value = Assessment;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a map of 14 dimension tags to {score, reason}")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Assessment, A::Error> {
                let mut entries = Vec::with_capacity(14);
                while let Some((tag, entry)) = map.next_entry::<String, Entry>()? {
                    let dimension = DimensionId::from_str(&tag).map_err(de::Error::custom)?;
                    entries.push(DimensionAssessment::new(
                        dimension,
                        entry.score,
                        entry.reason,
                    ));
                }
                Assessment::from_entries(entries).map_err(de::Error::custom)
            }
        }

        deserializer.deserialize_map(AssessmentVisitor)
    }
}

/// One image-pair evaluation unit.
///
/// `assessments` maps an annotator id (human or model) to a complete
/// assessment; images are referenced by path or URI, never decoded here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub sample_id: String,
    pub source_image: String,
    pub trans_image: String,
    pub lang_pair: String,
    pub system_id: String,
    pub assessments: BTreeMap<String, Assessment>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn taxonomy_has_four_accuracy_and_ten_style_dimensions() {
        let acc = DimensionId::ALL
            .iter()
            .filter(|d| d.category() == Category::Accuracy)
            .count();
        assert_eq!(acc, 4);
        assert_eq!(DimensionId::ALL.len() - acc, 10);
        assert_eq!(
            DimensionId::ALL
                .iter()
                .filter(|d| d.tag().starts_with("t_"))
                .count(),
            8
        );
    }

    #[test]
    fn category_examples() {
        assert_eq!(
            dimension_category(DimensionId::TextHallucination),
            Category::Accuracy
        );
        assert_eq!(dimension_category(DimensionId::TextSize), Category::Style);
        assert_eq!(
            dimension_category(DimensionId::SceneOmission),
            Category::Accuracy
        );
    }

    #[test]
    fn score_labels_parse() {
        assert_eq!(parse_score_label("2-Fair").unwrap(), ScoreLevel::Fair);
        assert_eq!(
            parse_score_label("3-excellent").unwrap(),
            ScoreLevel::Excellent
        );
        assert_eq!(parse_score_label(" 1-Poor ").unwrap(), ScoreLevel::Poor);
        assert_eq!(parse_score_label("2").unwrap(), ScoreLevel::Fair);
        assert!(matches!(
            parse_score_label("4-Great"),
            Err(CoreError::MalformedLabel(_))
        ));
        assert!(parse_score_label("").is_err());
    }

    #[test]
    fn score_labels_round_trip() {
        for s in ScoreLevel::ALL {
            assert_eq!(parse_score_label(s.label()).unwrap(), s);
        }
    }

    #[test]
    fn dar_rejects_out_of_range() {
        assert!(Dar::new(0.0).is_ok());
        assert!(Dar::new(1.0).is_ok());
        assert!(Dar::new(-0.01).is_err());
        assert!(Dar::new(1.5).is_err());
        assert!(Dar::new(f64::NAN).is_err());
    }

    #[test]
    fn assessment_rejects_missing_dimension() {
        let entries: Vec<_> = DimensionId::ALL
            .iter()
            .skip(1)
            .map(|&d| DimensionAssessment::new(d, ScoreLevel::Excellent, ""))
            .collect();
        assert_eq!(
            Assessment::from_entries(entries),
            Err(CoreError::MissingDimension(DimensionId::TextSize))
        );
    }

    #[test]
    fn assessment_rejects_duplicate_dimension() {
        let mut entries: Vec<_> = DimensionId::ALL
            .iter()
            .map(|&d| DimensionAssessment::new(d, ScoreLevel::Excellent, ""))
            .collect();
        entries.push(DimensionAssessment::new(
            DimensionId::SceneColor,
            ScoreLevel::Poor,
            "",
        ));
        assert_eq!(
            Assessment::from_entries(entries),
            Err(CoreError::DuplicateDimension(DimensionId::SceneColor))
        );
    }

    #[test]
    fn assessment_serde_round_trip() {
        let a = Assessment::from_score_fn(|d| match d.category() {
            Category::Accuracy => ScoreLevel::Excellent,
            Category::Style => ScoreLevel::Fair,
        });
        let json = serde_json::to_string(&a).unwrap();
        let back: Assessment = serde_json::from_str(&json).unwrap();
        assert_eq!(a, back);
        // canonical key order: t_size first
        assert!(json.starts_with("{\"t_size\""));
    }

    #[test]
    fn dimension_tags_round_trip() {
        for d in DimensionId::ALL {
            assert_eq!(DimensionId::from_str(d.tag()).unwrap(), d);
        }
        assert!(DimensionId::from_str("t_bogus").is_err());
    }
}
