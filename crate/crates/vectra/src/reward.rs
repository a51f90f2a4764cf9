//! Alignment reward: structural format compliance plus per-dimension score
//! agreement with an expert-annotated gold assessment. Both components cap
//! at 42 points, for a total of 84 on a perfectly formatted exact match.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::parser::{parse_response, StructureReport};
use crate::types::{Assessment, DimensionId, ScoreLevel};

/// Reward components for one dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionReward {
    /// 0.5 per tag token present (max 2.0).
    pub tag_points: f64,
    /// 1.0 when the reason/score pair is correctly ordered.
    pub order_points: f64,
    /// 3 minus the score distance to gold, floored at 0; 0 when the
    /// dimension could not be parsed.
    pub pref_points: f64,
}

/// Full reward for one response against one gold assessment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub format_points: f64,
    pub preference_points: f64,
    pub total: f64,
    pub per_dimension: BTreeMap<DimensionId, DimensionReward>,
}

fn format_half_points(s: &StructureReport, d: DimensionId) -> u32 {
    let st = s.structure(d);
    u32::from(st.tags_present) + if st.ordered_pair_valid { 2 } else { 0 }
}

/// Structural compliance reward: 0.5 per tag present plus 1.0 per correctly
/// ordered reason/score pair, summed over the 14 dimensions (max 42).
pub fn format_reward(report: &StructureReport) -> f64 {
    let halves: u32 = DimensionId::ALL
        .iter()
        .map(|&d| format_half_points(report, d))
        .sum();
    f64::from(halves) / 2.0
}

/// Preference alignment reward: `max(0, 3 − |gold − predicted|)` per
/// dimension (max 42). Dimensions absent from `pred` contribute 0.
pub fn preference_reward(pred: &BTreeMap<DimensionId, ScoreLevel>, gold: &Assessment) -> f64 {
    let points: u32 = DimensionId::ALL
        .iter()
        .map(|&d| pref_points(pred.get(&d).copied(), gold.score(d)))
        .sum();
    f64::from(points)
}

fn pref_points(pred: Option<ScoreLevel>, gold: ScoreLevel) -> u32 {
    match pred {
        Some(p) => {
            let dist = u32::from(p.value().abs_diff(gold.value()));
            3u32.saturating_sub(dist)
        }
        None => 0,
    }
}

/// Parse a response and score it against gold: format plus preference, with
/// the per-dimension breakdown. Deterministic for fixed inputs.
pub fn total_reward(text: &str, gold: &Assessment) -> RewardBreakdown {
    let parsed = parse_response(text);
    let scores = parsed.score_map();

    let mut per_dimension = BTreeMap::new();
    for &d in &DimensionId::ALL {
        let st = parsed.report.structure(d);
        per_dimension.insert(
            d,
            DimensionReward {
                tag_points: f64::from(st.tags_present) * 0.5,
                order_points: if st.ordered_pair_valid { 1.0 } else { 0.0 },
                pref_points: f64::from(pref_points(scores.get(&d).copied(), gold.score(d))),
            },
        );
    }

    let format_points = format_reward(&parsed.report);
    let preference_points = preference_reward(&scores, gold);
    RewardBreakdown {
        format_points,
        preference_points,
        total: format_points + preference_points,
        per_dimension,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{render_assessment, validate_structure};
    use crate::types::ScoreLevel::{Excellent, Fair, Poor};

    fn gold() -> Assessment {
        Assessment::from_score_fn(|d| match d {
            DimensionId::TextHallucination => Poor,
            DimensionId::SceneSize | DimensionId::TextColor => Fair,
            _ => Excellent,
        })
    }

    #[test]
    fn fully_valid_output_scores_max_format() {
        let report = validate_structure(&render_assessment(&gold()));
        assert_eq!(format_reward(&report), 42.0);
    }

    #[test]
    fn one_missing_tag_costs_half_plus_order() {
        let text = render_assessment(&gold()).replace("</t_color_reason>", "");
        assert_eq!(format_reward(&validate_structure(&text)), 40.5);
    }

    #[test]
    fn empty_text_scores_zero_format() {
        assert_eq!(format_reward(&validate_structure("")), 0.0);
    }

    #[test]
    fn exact_match_scores_max_preference() {
        let g = gold();
        let pred: BTreeMap<_, _> = DimensionId::ALL.iter().map(|&d| (d, g.score(d))).collect();
        assert_eq!(preference_reward(&pred, &g), 42.0);
    }

    #[test]
    fn one_off_by_one_scores_41() {
        let g = gold();
        let mut pred: BTreeMap<_, _> = DimensionId::ALL.iter().map(|&d| (d, g.score(d))).collect();
        pred.insert(DimensionId::TextSize, Fair); // gold is Excellent
        assert_eq!(preference_reward(&pred, &g), 41.0);
    }

    #[test]
    fn all_off_by_two_scores_14() {
        let g = Assessment::uniform(Excellent);
        let pred: BTreeMap<_, _> = DimensionId::ALL.iter().map(|&d| (d, Poor)).collect();
        assert_eq!(preference_reward(&pred, &g), 14.0);
    }

    #[test]
    fn empty_prediction_scores_zero_preference() {
        assert_eq!(preference_reward(&BTreeMap::new(), &gold()), 0.0);
    }

    #[test]
    fn canonical_rendering_of_gold_totals_84() {
        let g = gold();
        let r = total_reward(&render_assessment(&g), &g);
        assert_eq!(r.format_points, 42.0);
        assert_eq!(r.preference_points, 42.0);
        assert_eq!(r.total, 84.0);
        for (_, d) in r.per_dimension {
            assert_eq!(d.tag_points, 2.0);
            assert_eq!(d.order_points, 1.0);
            assert_eq!(d.pref_points, 3.0);
        }
    }

    #[test]
    fn adjacent_label_swap_totals_83() {
        let g = gold();
        let mut off = g.clone();
        off = Assessment::from_score_fn(|d| {
            if d == DimensionId::SceneOmission {
                Fair // gold is Excellent
            } else {
                off.score(d)
            }
        });
        let r = total_reward(&render_assessment(&off), &g);
        assert_eq!(r.total, 83.0);
    }

    #[test]
    fn prose_without_tags_totals_zero() {
        let r = total_reward("the translation looks great to me", &gold());
        assert_eq!(r.total, 0.0);
    }

    #[test]
    fn unparseable_label_still_earns_format_points() {
        // structure and label validity are independent: a well-formed pair
        // with a nonsense label keeps its format points, loses preference
        let text = render_assessment(&gold()).replace("1-Poor", "5-Great");
        let r = total_reward(&text, &gold());
        assert_eq!(r.format_points, 42.0);
        assert_eq!(r.preference_points, 39.0); // 13 exact matches
        assert_eq!(
            r.per_dimension[&DimensionId::TextHallucination].pref_points,
            0.0
        );
    }

    #[test]
    fn deleting_any_single_tag_never_increases_total() {
        let g = gold();
        let text = render_assessment(&g);
        let base = total_reward(&text, &g).total;
        for d in DimensionId::ALL {
            let t = d.tag();
            for tag in [
                format!("<{t}_reason>"),
                format!("</{t}_reason>"),
                format!("<{t}_score>"),
                format!("</{t}_score>"),
            ] {
                let mutated = text.replacen(&tag, "", 1);
                assert!(total_reward(&mutated, &g).total <= base, "tag {tag}");
            }
        }
    }
}
