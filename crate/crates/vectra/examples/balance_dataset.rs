//! Balance a skewed dataset: augment scarce dimension-score pairs through
//! the built-in deterministic hooks and prune overrepresented ones by
//! rarity.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vectra::balance::{
    balance, marginal_frequencies, BalanceOptions, BuiltinHooks, ScoreVector, ScoredSample,
};
use vectra::{DimensionId, ScoreLevel};

fn main() {
    // Mostly-flawless samples with a sprinkle of minor defects: typical of
    // raw production traffic, and badly skewed toward score 3.
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let dataset: Vec<ScoredSample> = (0..80)
        .map(|i| {
            let mut scores = [ScoreLevel::Excellent; 14];
            for slot in scores.iter_mut() {
                if rng.random::<f64>() < 0.12 {
                    *slot = if rng.random::<f64>() < 0.5 {
                        ScoreLevel::Fair
                    } else {
                        ScoreLevel::Poor
                    };
                }
            }
            ScoredSample {
                sample_id: format!("img-{i:03}"),
                scores: ScoreVector::new(scores),
            }
        })
        .collect();

    let before = marginal_frequencies(&dataset);
    let spread = |t: &vectra::balance::FrequencyTable| {
        let values = t.values();
        (*values.iter().min().unwrap(), *values.iter().max().unwrap())
    };
    let (min_before, max_before) = spread(&before);
    println!(
        "before: {} samples, pair counts range {min_before}..{max_before}",
        dataset.len()
    );

    let mut hooks = BuiltinHooks::seeded(7);
    let (balanced, report) = balance(dataset, &mut hooks, &BalanceOptions::default()).unwrap();

    let (min_after, max_after) = spread(&report.after);
    println!(
        "after:  {} samples, pair counts range {min_after}..{max_after}",
        balanced.len()
    );
    println!(
        "thresholds: tau_low {:.2}, tau_high {:.2}",
        report.thresholds.tau_low, report.thresholds.tau_high
    );
    println!(
        "augmented {} samples, pruned {}",
        report
            .augmentations
            .iter()
            .map(|a| a.added.len())
            .sum::<usize>(),
        report.removals.len()
    );
    if let Some(removal) = report.removals.first() {
        println!(
            "first pruned: {} (over ({}, {}), rarity {:.3})",
            removal.sample_id,
            removal.dimension,
            removal.score.value(),
            removal.rarity
        );
    }
    for warning in report.warnings.iter().take(3) {
        println!("warning: {warning}");
    }
    assert_eq!(marginal_frequencies(&balanced), report.after);

    // interesting corner of the algorithm: thresholds are fixed up front,
    // so pruning can push a pair back under tau_low; that is reported, not
    // corrected
    let fragile = DimensionId::ALL
        .iter()
        .flat_map(|&d| ScoreLevel::ALL.map(|s| (d, s)))
        .filter(|&(d, s)| (report.after.get(d, s) as f64) < report.thresholds.tau_low)
        .count();
    println!("pairs left below tau_low after pruning: {fragile}");
}
