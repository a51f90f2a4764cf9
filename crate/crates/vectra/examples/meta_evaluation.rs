//! The statistics behind metric validation: instance correlation,
//! inter-annotator agreement, score dispersion, and system-ranking
//! consistency.

use std::collections::BTreeMap;

use vectra::annotation::{majority_ranking, PairwiseTally};
use vectra::metaeval::{
    coefficient_of_variation, cv_reduction, instance_correlation, krippendorff_alpha,
    system_correlation, DifferenceFunction, ReliabilityMatrix, SystemEvalSample, SystemEvalSet,
};
use vectra::ScoreLevel::{Excellent, Fair, Poor};

fn main() {
    // Instance level: metric outputs vs human annotations.
    let human = [3.0, 1.0, 2.0, 3.0, 2.0, 1.0, 3.0, 2.0];
    let metric = [92.0, 10.0, 55.0, 88.0, 47.0, 22.0, 97.0, 60.0];
    let c = instance_correlation(&metric, &human).unwrap();
    println!(
        "instance-level: pearson {:.3}, kendall {:.3}",
        c.pearson, c.kendall
    );

    // Agreement: five annotators, two protocols.
    let tight = ReliabilityMatrix::new(vec![
        vec![Some(Excellent); 5],
        vec![
            Some(Fair),
            Some(Fair),
            Some(Fair),
            Some(Excellent),
            Some(Fair),
        ],
        vec![Some(Poor); 5],
        vec![Some(Fair), Some(Fair), None, Some(Fair), Some(Fair)],
    ])
    .unwrap();
    let loose = ReliabilityMatrix::new(vec![
        vec![
            Some(Excellent),
            Some(Poor),
            Some(Fair),
            Some(Excellent),
            Some(Poor),
        ],
        vec![
            Some(Fair),
            Some(Excellent),
            Some(Poor),
            Some(Fair),
            Some(Excellent),
        ],
        vec![
            Some(Poor),
            Some(Fair),
            Some(Excellent),
            Some(Poor),
            Some(Fair),
        ],
        vec![
            Some(Fair),
            Some(Poor),
            Some(Excellent),
            Some(Fair),
            Some(Poor),
        ],
    ])
    .unwrap();
    let alpha_tight = krippendorff_alpha(&tight, DifferenceFunction::Ordinal).unwrap();
    let alpha_loose = krippendorff_alpha(&loose, DifferenceFunction::Ordinal).unwrap();
    println!(
        "krippendorff alpha: structured protocol {alpha_tight:.3}, loose protocol {alpha_loose:.3}"
    );

    // Dispersion: coefficient of variation across annotators, per item.
    let cv_tight = coefficient_of_variation(&[vec![3.0, 3.0, 2.0], vec![2.0, 2.0, 2.0]]).unwrap();
    let cv_loose = coefficient_of_variation(&[vec![3.0, 1.0, 2.0], vec![1.0, 3.0, 2.0]]).unwrap();
    println!(
        "cv: {:.3} vs {:.3} ({:.0}% reduction)",
        cv_tight,
        cv_loose,
        cv_reduction(cv_loose, cv_tight).unwrap() * 100.0
    );

    // System level: does the metric order systems like humans do?
    let systems = ["sys-a", "sys-b", "sys-c"];
    let mut samples = Vec::new();
    for (scores, human_order) in [
        ([70.0, 45.0, 20.0], ["sys-a", "sys-b", "sys-c"]),
        ([55.0, 60.0, 10.0], ["sys-b", "sys-a", "sys-c"]),
        ([80.0, 40.0, 35.0], ["sys-a", "sys-c", "sys-b"]),
    ] {
        let mut tally = PairwiseTally::new(human_order.iter().map(|s| s.to_string()).collect());
        for (i, winner) in human_order.iter().enumerate() {
            for loser in &human_order[i + 1..] {
                for _ in 0..5 {
                    tally.add_preference(winner, loser).unwrap();
                }
            }
        }
        let metric_scores: BTreeMap<String, f64> =
            systems.iter().map(|s| s.to_string()).zip(scores).collect();
        samples.push(SystemEvalSample {
            metric_scores,
            human: majority_ranking(&tally).unwrap(),
        });
    }
    let set = SystemEvalSet::new(samples).unwrap();
    let s = system_correlation(&set).unwrap();
    println!(
        "system-level over {} samples: pearson {:.3}, kendall {:.3} ({} skipped)",
        s.used, s.pearson, s.kendall, s.skipped
    );
}
