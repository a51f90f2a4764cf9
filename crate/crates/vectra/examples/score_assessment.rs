//! Quantize defect ratios onto the 3-point scale and aggregate a full
//! assessment into the multiplicative score.

use vectra::scoring::{quantize_dar, uniform_average_score, vectra_score, ScoringConfig};
use vectra::{Assessment, Category, Dar, ScoreLevel};

fn main() {
    let cfg = ScoringConfig::default();

    println!("DAR quantization (tau = {}):", cfg.tau);
    for dar in [0.0, 0.004, 0.05, 0.30, 0.31, 0.8] {
        let level = quantize_dar(Dar::new(dar).unwrap(), &cfg);
        println!("  DAR {dar:<5} -> {}", level.label());
    }

    // A translation with flawless content fidelity but mediocre styling.
    let styled_poorly = Assessment::from_score_fn(|d| match d.category() {
        Category::Accuracy => ScoreLevel::Excellent,
        Category::Style => ScoreLevel::Fair,
    });
    // A pretty translation that hallucinated content.
    let hallucinated = Assessment::from_score_fn(|d| match d.category() {
        Category::Accuracy => ScoreLevel::Poor,
        Category::Style => ScoreLevel::Excellent,
    });

    println!("\nmultiplicative vs uniform aggregation:");
    for (name, a) in [
        ("all excellent", Assessment::uniform(ScoreLevel::Excellent)),
        ("fair style", styled_poorly),
        ("hallucinated", hallucinated),
    ] {
        let v = vectra_score(&a, &cfg);
        let u = uniform_average_score(&a, &cfg);
        println!(
            "  {name:<14} score {:>6.2}  (acc {:.2}, sty {:.2}; uniform would give {:.2})",
            v.value, v.acc_mean, v.sty_mean, u
        );
    }
    println!("\naccuracy failures zero the score no matter how good the style is.");
}
