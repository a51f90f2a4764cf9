//! Aggregate five annotators into a consensus assessment and rank systems
//! from pairwise preferences.

use vectra::annotation::{consensus_assessment, majority_ranking, PairwiseTally};
use vectra::{Assessment, DimensionId, ScoreLevel};

fn main() {
    // Five experts agree except on text position, where opinions split 2/3.
    let annotators: Vec<Assessment> = (0..5)
        .map(|i| {
            Assessment::from_score_fn(|d| match d {
                DimensionId::TextPosition if i < 2 => ScoreLevel::Fair,
                DimensionId::TextPosition => ScoreLevel::Excellent,
                DimensionId::SceneOmission => ScoreLevel::Fair,
                _ => ScoreLevel::Excellent,
            })
        })
        .collect();

    let consensus = consensus_assessment(&annotators).unwrap();
    println!("consensus scores:");
    println!(
        "  t_pos   -> {} (votes were 2-Fair / 3-Excellent)",
        consensus.score(DimensionId::TextPosition)
    );
    println!(
        "  s_omiss -> {}",
        consensus.score(DimensionId::SceneOmission)
    );

    // Pairwise preferences over three translation systems on one image.
    let mut tally = PairwiseTally::new(vec![
        "pipeline-ocr".to_string(),
        "end2end-small".to_string(),
        "end2end-large".to_string(),
    ]);
    for _ in 0..4 {
        tally
            .add_preference("end2end-large", "pipeline-ocr")
            .unwrap();
        tally
            .add_preference("end2end-large", "end2end-small")
            .unwrap();
    }
    for _ in 0..3 {
        tally
            .add_preference("end2end-small", "pipeline-ocr")
            .unwrap();
    }
    tally
        .add_preference("pipeline-ocr", "end2end-large")
        .unwrap();
    tally
        .add_preference("pipeline-ocr", "end2end-small")
        .unwrap();

    let ranking = majority_ranking(&tally).unwrap();
    println!("\nmajority ranking (best first):");
    for (i, system) in ranking.order.iter().enumerate() {
        println!(
            "  {}. {system} ({} pairwise wins)",
            i + 1,
            ranking.copeland[system]
        );
    }
}
