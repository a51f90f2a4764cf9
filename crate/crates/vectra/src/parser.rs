//! Schema-guided parsing of judge-model output.
//!
//! Judge responses wrap one reason/score pair per dimension in a fixed
//! 56-tag XML-like schema (`<t_size_reason>…</t_size_reason>`
//! `<t_size_score>…</t_size_score>` and so on). This module counts and
//! orders those tags, extracts scores and reasons best-effort, and renders
//! assessments back into the canonical format. Malformed input is reported,
//! never an error: structural quality is scored downstream by the format
//! reward.

use std::collections::BTreeMap;
use std::sync::LazyLock;

use crate::types::{
    parse_score_label, Assessment, Dar, DimensionAssessment, DimensionId, ReasonFields,
};

/// Tag kinds per dimension, in required order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum TagKind {
    ReasonOpen,
    ReasonClose,
    ScoreOpen,
    ScoreClose,
}

const TAG_KINDS: [TagKind; 4] = [
    TagKind::ReasonOpen,
    TagKind::ReasonClose,
    TagKind::ScoreOpen,
    TagKind::ScoreClose,
];

static TAG_STRINGS: LazyLock<Vec<[String; 4]>> = LazyLock::new(|| {
    DimensionId::ALL
        .iter()
        .map(|d| {
            let t = d.tag();
            [
                format!("<{t}_reason>"),
                format!("</{t}_reason>"),
                format!("<{t}_score>"),
                format!("</{t}_score>"),
            ]
        })
        .collect()
});

fn tag_str(d: DimensionId, kind: TagKind) -> &'static str {
    &TAG_STRINGS[d.index()][kind as usize]
}

/// Structural validity of one dimension's tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DimensionStructure {
    /// How many of the four tag tokens are present (each counted once).
    pub tags_present: u8,
    /// True iff the four tags occur exactly once, in order, with no other
    /// schema tag between the reason-open and the score-close.
    pub ordered_pair_valid: bool,
}

/// Structural report over a judge response.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureReport {
    pub per_dimension: BTreeMap<DimensionId, DimensionStructure>,
    /// Non-whitespace text outside any tag or tagged span.
    pub extraneous_text: bool,
    pub parse_notes: Vec<String>,
}

impl StructureReport {
    pub fn structure(&self, d: DimensionId) -> DimensionStructure {
        self.per_dimension[&d]
    }
}

/// A parsed judge response: extracted per-dimension assessments plus the
/// structural report. Dimensions whose score could not be extracted are
/// absent from `assessment`.
#[derive(Debug, Clone)]
pub struct ParsedResponse {
    pub assessment: BTreeMap<DimensionId, DimensionAssessment>,
    pub report: StructureReport,
    pub raw: String,
}

impl ParsedResponse {
    /// Extracted score per dimension.
    pub fn score_map(&self) -> BTreeMap<DimensionId, crate::types::ScoreLevel> {
        self.assessment.iter().map(|(&d, a)| (d, a.score)).collect()
    }

    /// The complete assessment, if all 14 dimensions were extracted.
    pub fn complete_assessment(&self) -> Option<Assessment> {
        if self.assessment.len() == DimensionId::COUNT {
            Assessment::from_entries(self.assessment.values().cloned()).ok()
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Occurrence {
    pos: usize,
    len: usize,
    dim: DimensionId,
    kind: TagKind,
}

/// All schema-tag occurrences in `text`, sorted by position.
fn scan_tags(text: &str) -> Vec<Occurrence> {
    let mut occ = Vec::new();
    for &dim in &DimensionId::ALL {
        for &kind in &TAG_KINDS {
            let tag = tag_str(dim, kind);
            for (pos, m) in text.match_indices(tag) {
                occ.push(Occurrence {
                    pos,
                    len: m.len(),
                    dim,
                    kind,
                });
            }
        }
    }
    occ.sort_by_key(|o| o.pos);
    occ
}

/// Count the four tag tokens per dimension and check reason/score ordering.
///
/// Malformation is reported, never an error; arbitrary text is accepted.
pub fn validate_structure(text: &str) -> StructureReport {
    let occ = scan_tags(text);
    let mut per_dimension = BTreeMap::new();

    for &dim in &DimensionId::ALL {
        let indices: Vec<usize> = occ
            .iter()
            .enumerate()
            .filter(|(_, o)| o.dim == dim)
            .map(|(i, _)| i)
            .collect();

        let mut kind_counts = [0usize; 4];
        for &i in &indices {
            kind_counts[occ[i].kind as usize] += 1;
        }
        let tags_present = kind_counts.iter().filter(|&&c| c > 0).count() as u8;

        // Valid pair: the dimension's four tags occur exactly once each, are
        // consecutive in the global tag sequence, and follow canonical order.
        let ordered_pair_valid = kind_counts == [1, 1, 1, 1]
            && indices.windows(2).all(|w| w[1] == w[0] + 1)
            && indices
                .iter()
                .zip(TAG_KINDS.iter())
                .all(|(&i, &k)| occ[i].kind == k);

        per_dimension.insert(
            dim,
            DimensionStructure {
                tags_present,
                ordered_pair_valid,
            },
        );
    }

    StructureReport {
        per_dimension,
        extraneous_text: has_extraneous_text(text, &occ),
        parse_notes: Vec::new(),
    }
}

/// True when non-whitespace text lies outside every tag and tagged span.
fn has_extraneous_text(text: &str, occ: &[Occurrence]) -> bool {
    // Cover each tag token, plus content between an open tag and the first
    // matching close tag after it.
    let mut covered: Vec<(usize, usize)> = occ.iter().map(|o| (o.pos, o.pos + o.len)).collect();
    for &dim in &DimensionId::ALL {
        for (open, close) in [
            (TagKind::ReasonOpen, TagKind::ReasonClose),
            (TagKind::ScoreOpen, TagKind::ScoreClose),
        ] {
            let opens = occ.iter().filter(|o| o.dim == dim && o.kind == open);
            let closes: Vec<&Occurrence> = occ
                .iter()
                .filter(|o| o.dim == dim && o.kind == close)
                .collect();
            let mut next_close = 0;
            for o in opens {
                while next_close < closes.len() && closes[next_close].pos < o.pos + o.len {
                    next_close += 1;
                }
                if next_close < closes.len() {
                    let c = closes[next_close];
                    covered.push((o.pos, c.pos + c.len));
                    next_close += 1;
                }
            }
        }
    }
    covered.sort_unstable();

    let mut cursor = 0usize;
    for (start, end) in covered {
        if start > cursor && text[cursor..start].chars().any(|c| !c.is_whitespace()) {
            return true;
        }
        cursor = cursor.max(end);
    }
    cursor < text.len() && text[cursor..].chars().any(|c| !c.is_whitespace())
}

/// Content between the first `open` tag and the first `close` tag after it.
fn span_between(text: &str, d: DimensionId, open: TagKind, close: TagKind) -> Option<&str> {
    let open_tag = tag_str(d, open);
    let close_tag = tag_str(d, close);
    let start = text.find(open_tag)? + open_tag.len();
    let end = start + text[start..].find(close_tag)?;
    Some(&text[start..end])
}

/// Best-effort extraction of every dimension whose score tags are present
/// and whose score content parses as a label. Reasons are taken verbatim
/// from between the reason tags.
pub fn parse_response(text: &str) -> ParsedResponse {
    let mut report = validate_structure(text);
    let mut assessment = BTreeMap::new();

    for &dim in &DimensionId::ALL {
        let Some(score_span) = span_between(text, dim, TagKind::ScoreOpen, TagKind::ScoreClose)
        else {
            report
                .parse_notes
                .push(format!("{dim}: score tags missing"));
            continue;
        };
        let score = match parse_score_label(score_span) {
            Ok(s) => s,
            Err(_) => {
                report
                    .parse_notes
                    .push(format!("{dim}: MalformedLabel {score_span:?}"));
                continue;
            }
        };
        let reason = span_between(text, dim, TagKind::ReasonOpen, TagKind::ReasonClose)
            .unwrap_or("")
            .to_string();
        if let Some(pct) = find_dar_percent(&reason) {
            if !(0.0..=100.0).contains(&pct) {
                report.parse_notes.push(format!("{dim}: DAR out of range"));
            }
        }
        assessment.insert(dim, DimensionAssessment::new(dim, score, reason));
    }

    ParsedResponse {
        assessment,
        report,
        raw: text.to_string(),
    }
}

/// The percentage inside a `(DAR approx N%)` clause, if present and numeric.
fn find_dar_percent(reason: &str) -> Option<f64> {
    const MARKER: &str = "(DAR approx ";
    let start = reason.find(MARKER)? + MARKER.len();
    let rest = &reason[start..];
    let end = rest.find('%')?;
    rest[..end].trim().parse::<f64>().ok()
}

/// Best-effort extraction of the CONTENT/ISSUE/POSITION/EFFECT fields from a
/// templated reason sentence. Returns `None` when the template is not
/// matched or the DAR percentage falls outside [0, 100].
pub fn extract_reason_fields(reason: &str) -> Option<ReasonFields> {
    let effect_dar = match find_dar_percent(reason) {
        Some(pct) if (0.0..=100.0).contains(&pct) => Some(Dar::new(pct / 100.0).ok()?),
        Some(_) => return None,
        None => None,
    };
    let skeleton = parse_skeleton(reason);
    if skeleton.is_none() && effect_dar.is_none() {
        return None;
    }
    let (content, issue, position) = skeleton.unwrap_or_default();
    Some(ReasonFields {
        content,
        issue,
        position,
        effect_dar,
    })
}

/// `{CONTENT} of translated image is {ISSUE} in {POSITION} region …`
fn parse_skeleton(reason: &str) -> Option<(String, String, String)> {
    let (content, rest) = reason.split_once(" of translated image is ")?;
    let (issue, rest) = rest.split_once(" in ")?;
    let (position, _) = rest.split_once(" region")?;
    Some((
        content.trim().to_string(),
        issue.trim().to_string(),
        position.trim().to_string(),
    ))
}

/// Render a complete assessment into the canonical tag format, one
/// dimension per line in schema order. Re-parsing the result yields the
/// same assessment as long as reasons do not themselves contain schema tags.
pub fn render_assessment(a: &Assessment) -> String {
    let mut out = String::new();
    for entry in a.iter() {
        let t = entry.dimension.tag();
        out.push_str(&format!(
            "<{t}_reason>{reason}</{t}_reason><{t}_score>{label}</{t}_score>\n",
            reason = entry.reason,
            label = entry.score.label(),
        ));
    }
    out
}
