//! Score judge responses against expert gold: structural format points
//! plus per-dimension preference alignment.

use vectra::parser::render_assessment;
use vectra::reward::total_reward;
use vectra::{Assessment, DimensionId, ScoreLevel};

fn main() {
    let gold = Assessment::from_score_fn(|d| match d {
        DimensionId::SceneHallucination => ScoreLevel::Poor,
        DimensionId::TextFont | DimensionId::TextLayout => ScoreLevel::Fair,
        _ => ScoreLevel::Excellent,
    });

    let perfect = render_assessment(&gold);

    // Same structure, one score off by a level.
    let near_miss = render_assessment(&Assessment::from_score_fn(|d| {
        if d == DimensionId::TextFont {
            ScoreLevel::Poor
        } else {
            gold.score(d)
        }
    }));

    // Valid scores, broken structure for one dimension.
    let torn = perfect.replace("</s_color_reason>", "");

    for (name, response) in [
        ("exact match", perfect.as_str()),
        ("one level off", near_miss.as_str()),
        ("missing tag", torn.as_str()),
        ("free-form prose", "looks good, ship it"),
    ] {
        let r = total_reward(response, &gold);
        println!(
            "{name:<16} format {:>5.1}  preference {:>5.1}  total {:>5.1}",
            r.format_points, r.preference_points, r.total
        );
    }
}
