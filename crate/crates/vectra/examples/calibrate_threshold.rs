//! Calibrate the Fair/Poor severity threshold from expert accept/reject
//! votes binned by estimated defect area ratio.

use vectra::calibration::{bin_votes, find_threshold, majority_reject, CalibrationVote};
use vectra::Dar;

fn main() {
    // Synthetic expert panel: rejection stays low while defects are small,
    // then surges once they cover roughly a third of the content.
    let per_bin_rejects = [4, 6, 14, 37, 38, 38, 39, 40, 40, 40];
    let mut votes = Vec::new();
    for (bin, &rejects) in per_bin_rejects.iter().enumerate() {
        for j in 0..40 {
            votes.push(CalibrationVote {
                dar: Dar::new((bin as f64 + 0.5) / 10.0).unwrap(),
                reject: j < rejects,
            });
        }
    }

    let curve = bin_votes(&votes, 10).unwrap();
    println!("bin        n    rejection rate");
    for bin in &curve.bins {
        println!(
            "[{:.1},{:.1})  {:>3}  {}",
            bin.lower.value(),
            bin.upper.value(),
            bin.accepts + bin.rejects,
            bin.rate()
                .map(|r| format!("{:.0}%", r * 100.0))
                .unwrap_or_else(|| "-".to_string()),
        );
    }

    let tau = find_threshold(&curve, 0.9).unwrap();
    println!(
        "\nfirst bin at or above 90% rejection starts at {}",
        tau.value()
    );
    println!(
        "-> defects covering more than {:.0}% of the content consistently fail review",
        tau.value() * 100.0
    );

    // The per-vote ground truth itself comes from a 5-expert majority.
    let panel = [true, true, false, true, false];
    println!(
        "\npanel {:?} -> majority verdict: {}",
        panel,
        if majority_reject(&panel) {
            "reject"
        } else {
            "accept"
        }
    );
}
