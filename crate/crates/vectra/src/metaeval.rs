//! Meta-evaluation statistics: Pearson r, tie-corrected Kendall tau,
//! Krippendorff's alpha over ordinal scores, coefficient of variation, and
//! system-ranking correlation against human preference orders.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::annotation::Ranking;
use crate::types::ScoreLevel;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetaevalError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("vectors differ in length: {x} vs {y}")]
    LengthMismatch { x: usize, y: usize },
    #[error("need at least 2 items with 2 or more ratings")]
    InsufficientData,
    #[error("no sample admits a defined correlation")]
    NoValidSamples,
    #[error("invalid system eval set: {0}")]
    InvalidEvalSet(String),
}

/// A bundled (Pearson, Kendall) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlations {
    pub pearson: f64,
    pub kendall: f64,
}

fn check_lengths(x: &[f64], y: &[f64]) -> Result<(), MetaevalError> {
    if x.len() != y.len() {
        return Err(MetaevalError::LengthMismatch {
            x: x.len(),
            y: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(MetaevalError::DegenerateInput(format!(
            "need at least 2 observations, got {}",
            x.len()
        )));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(MetaevalError::DegenerateInput(
            "non-finite observation".to_string(),
        ));
    }
    Ok(())
}

/// Product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, MetaevalError> {
    check_lengths(x, y)?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxy += (xi - mx) * (yi - my);
        sxx += (xi - mx) * (xi - mx);
        syy += (yi - my) * (yi - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(MetaevalError::DegenerateInput("zero variance".to_string()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Tie-corrected Kendall rank correlation (tau-b), computed with the
/// sort-and-merge formulation.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<f64, MetaevalError> {
    check_lengths(x, y)?;
    let n = x.len();

    let mut pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pairs.sort_by(|a, b| a.partial_cmp(b).expect("finite"));

    let tie_pairs = |groups: &[u64]| -> u64 { groups.iter().map(|&t| t * (t - 1) / 2).sum() };
    let group_sizes = |eq: &dyn Fn(usize, usize) -> bool| -> Vec<u64> {
        let mut sizes = Vec::new();
        let mut run = 1u64;
        for i in 1..n {
            if eq(i - 1, i) {
                run += 1;
            } else {
                sizes.push(run);
                run = 1;
            }
        }
        sizes.push(run);
        sizes
    };

    let n0 = (n as u64) * (n as u64 - 1) / 2;
    let n1 = tie_pairs(&group_sizes(&|a, b| pairs[a].0 == pairs[b].0));
    let n3 = tie_pairs(&group_sizes(&|a, b| pairs[a] == pairs[b]));

    // discordant pairs = inversions of the y sequence once sorted by (x, y)
    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let swaps = count_inversions(&mut ys);
    // ys is now globally sorted
    let mut run = 1u64;
    let mut n2 = 0u64;
    for i in 1..n {
        if ys[i - 1] == ys[i] {
            run += 1;
        } else {
            n2 += run * (run - 1) / 2;
            run = 1;
        }
    }
    n2 += run * (run - 1) / 2;

    if n0 == n1 || n0 == n2 {
        return Err(MetaevalError::DegenerateInput(
            "constant vector".to_string(),
        ));
    }

    let con_minus_dis = n0 as f64 - n1 as f64 - n2 as f64 + n3 as f64 - 2.0 * swaps as f64;
    let denom = ((n0 - n1) as f64 * (n0 - n2) as f64).sqrt();
    Ok((con_minus_dis / denom).clamp(-1.0, 1.0))
}

/// Merge sort counting strict inversions; sorts the slice as a side effect.
fn count_inversions(values: &mut [f64]) -> u64 {
    let n = values.len();
    let mut buf = values.to_vec();
    let mut swaps = 0u64;
    let mut width = 1;
    while width < n {
        let mut start = 0;
        while start < n {
            let mid = (start + width).min(n);
            let end = (start + 2 * width).min(n);
            let (mut i, mut j, mut k) = (start, mid, start);
            while i < mid || j < end {
                if i < mid && (j >= end || values[i] <= values[j]) {
                    buf[k] = values[i];
                    i += 1;
                } else {
                    buf[k] = values[j];
                    swaps += (mid - i) as u64;
                    j += 1;
                }
                k += 1;
            }
            start = end;
        }
        values.copy_from_slice(&buf);
        width *= 2;
    }
    swaps
}

/// How category disagreements are weighted in alpha.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DifferenceFunction {
    /// Weighted by ordinal distance through the marginal distribution.
    Ordinal,
    /// Squared value difference.
    Interval,
}

/// Items by annotators, with missing ratings allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityMatrix {
    ratings: Vec<Vec<Option<ScoreLevel>>>,
}

impl ReliabilityMatrix {
    pub fn new(ratings: Vec<Vec<Option<ScoreLevel>>>) -> Result<ReliabilityMatrix, MetaevalError> {
        let width = ratings.first().map_or(0, Vec::len);
        if ratings.iter().any(|row| row.len() != width) {
            return Err(MetaevalError::InvalidEvalSet(
                "ragged reliability matrix".to_string(),
            ));
        }
        Ok(ReliabilityMatrix { ratings })
    }

    pub fn items(&self) -> usize {
        self.ratings.len()
    }

    pub fn rows(&self) -> &[Vec<Option<ScoreLevel>>] {
        &self.ratings
    }
}

/// Krippendorff's alpha from the coincidence matrix over the 3 score
/// levels. Exactly 1 on perfect agreement; requires at least two items
/// rated by two or more annotators.
pub fn krippendorff_alpha(
    m: &ReliabilityMatrix,
    diff: DifferenceFunction,
) -> Result<f64, MetaevalError> {
    let mut coincidence = [[0.0f64; 3]; 3];
    let mut marginals = [0.0f64; 3];
    let mut pairable_items = 0usize;

    for row in m.rows() {
        let mut counts = [0u64; 3];
        for score in row.iter().flatten() {
            counts[(score.value() - 1) as usize] += 1;
        }
        let m_u: u64 = counts.iter().sum();
        if m_u < 2 {
            continue;
        }
        pairable_items += 1;
        for c in 0..3 {
            if counts[c] == 0 {
                continue;
            }
            marginals[c] += counts[c] as f64;
            for k in 0..3 {
                let others = if c == k { counts[k] - 1 } else { counts[k] };
                coincidence[c][k] += (counts[c] * others) as f64 / (m_u - 1) as f64;
            }
        }
    }

    if pairable_items < 2 {
        return Err(MetaevalError::InsufficientData);
    }

    let n: f64 = marginals.iter().sum();
    let delta_sq = |c: usize, k: usize| -> f64 {
        match diff {
            DifferenceFunction::Interval => ((k as f64) - (c as f64)).powi(2),
            DifferenceFunction::Ordinal => {
                let span: f64 = (c..=k).map(|g| marginals[g]).sum();
                (span - (marginals[c] + marginals[k]) / 2.0).powi(2)
            }
        }
    };

    let mut observed = 0.0;
    let mut expected = 0.0;
    for c in 0..3 {
        for k in (c + 1)..3 {
            let d = delta_sq(c, k);
            observed += coincidence[c][k] * d;
            expected += marginals[c] * marginals[k] * d;
        }
    }

    if observed == 0.0 {
        return Ok(1.0);
    }
    if expected == 0.0 {
        // a single category cannot disagree; unreachable with observed > 0
        return Ok(1.0);
    }
    Ok(1.0 - (n - 1.0) * observed / expected)
}

/// Mean over items of (sample standard deviation / mean) of each item's
/// scores.
pub fn coefficient_of_variation(per_item_scores: &[Vec<f64>]) -> Result<f64, MetaevalError> {
    if per_item_scores.is_empty() {
        return Err(MetaevalError::DegenerateInput("no items".to_string()));
    }
    let mut total = 0.0;
    for (i, scores) in per_item_scores.iter().enumerate() {
        if scores.len() < 2 {
            return Err(MetaevalError::DegenerateInput(format!(
                "item {i} has fewer than 2 scores"
            )));
        }
        let n = scores.len() as f64;
        let mean = scores.iter().sum::<f64>() / n;
        if mean <= 0.0 {
            return Err(MetaevalError::DegenerateInput(format!(
                "item {i} has non-positive mean"
            )));
        }
        let var = scores.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
        total += var.sqrt() / mean;
    }
    Ok(total / per_item_scores.len() as f64)
}

/// Relative CV reduction of `ours` against `base`.
pub fn cv_reduction(base: f64, ours: f64) -> Result<f64, MetaevalError> {
    if base <= 0.0 || base.is_nan() {
        return Err(MetaevalError::DegenerateInput(format!(
            "base CV must be positive, got {base}"
        )));
    }
    Ok((base - ours) / base)
}

/// One evaluated sample: a metric score per system plus the human ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemEvalSample {
    pub metric_scores: BTreeMap<String, f64>,
    pub human: Ranking,
}

/// Per-sample system evaluations sharing one system set.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemEvalSet {
    samples: Vec<SystemEvalSample>,
}

impl SystemEvalSet {
    pub fn new(samples: Vec<SystemEvalSample>) -> Result<SystemEvalSet, MetaevalError> {
        let Some(first) = samples.first() else {
            return Err(MetaevalError::InvalidEvalSet("no samples".to_string()));
        };
        let systems: BTreeSet<&String> = first.metric_scores.keys().collect();
        if systems.len() < 2 {
            return Err(MetaevalError::InvalidEvalSet(
                "need at least 2 systems".to_string(),
            ));
        }
        for (i, sample) in samples.iter().enumerate() {
            let metric: BTreeSet<&String> = sample.metric_scores.keys().collect();
            let ranked: BTreeSet<&String> = sample.human.order.iter().collect();
            if metric != systems || ranked != systems {
                return Err(MetaevalError::InvalidEvalSet(format!(
                    "sample {i} does not cover the shared system set"
                )));
            }
        }
        Ok(SystemEvalSet { samples })
    }

    pub fn samples(&self) -> &[SystemEvalSample] {
        &self.samples
    }
}

/// System-level agreement with one skip count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemCorrelation {
    pub pearson: f64,
    pub kendall: f64,
    pub used: usize,
    pub skipped: usize,
}

/// Metric score and reverse-rank human score per system, aligned on sorted
/// system ids. Best-ranked system scores `|systems|`, worst scores 1.
fn aligned_vectors(sample: &SystemEvalSample) -> (Vec<f64>, Vec<f64>) {
    let n = sample.human.order.len() as f64;
    let human_score: BTreeMap<&String, f64> = sample
        .human
        .order
        .iter()
        .enumerate()
        .map(|(pos, id)| (id, n - pos as f64))
        .collect();
    let mut metric = Vec::new();
    let mut human = Vec::new();
    for (id, &score) in &sample.metric_scores {
        metric.push(score);
        human.push(human_score[id]);
    }
    (metric, human)
}

/// Mean per-sample correlation between metric scores and human preference,
/// skipping samples where the correlation is undefined.
pub fn system_correlation(s: &SystemEvalSet) -> Result<SystemCorrelation, MetaevalError> {
    let mut sum_r = 0.0;
    let mut sum_tau = 0.0;
    let mut used = 0;
    let mut skipped = 0;
    for sample in &s.samples {
        let (metric, human) = aligned_vectors(sample);
        match (pearson(&metric, &human), kendall_tau(&metric, &human)) {
            (Ok(r), Ok(tau)) => {
                sum_r += r;
                sum_tau += tau;
                used += 1;
            }
            _ => skipped += 1,
        }
    }
    if used == 0 {
        return Err(MetaevalError::NoValidSamples);
    }
    Ok(SystemCorrelation {
        pearson: sum_r / used as f64,
        kendall: sum_tau / used as f64,
        used,
        skipped,
    })
}

/// Pooled variant: one correlation over all (metric, human) pairs across
/// samples instead of a per-sample mean.
pub fn system_correlation_pooled(s: &SystemEvalSet) -> Result<Correlations, MetaevalError> {
    let mut metric = Vec::new();
    let mut human = Vec::new();
    for sample in &s.samples {
        let (m, h) = aligned_vectors(sample);
        metric.extend(m);
        human.extend(h);
    }
    Ok(Correlations {
        pearson: pearson(&metric, &human)?,
        kendall: kendall_tau(&metric, &human)?,
    })
}

/// Pearson and Kendall between predicted and gold values, bundled.
pub fn instance_correlation(pred: &[f64], gold: &[f64]) -> Result<Correlations, MetaevalError> {
    Ok(Correlations {
        pearson: pearson(pred, gold)?,
        kendall: kendall_tau(pred, gold)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::ScoreLevel::{Excellent, Fair, Poor};

    /// Direct-definition pair-count oracle for tau-b.
    fn kendall_oracle(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len();
        let (mut con, mut dis, mut tx, mut ty) = (0i64, 0i64, 0i64, 0i64);
        for i in 0..n {
            for j in (i + 1)..n {
                let dx = x[i] - x[j];
                let dy = y[i] - y[j];
                if dx == 0.0 && dy == 0.0 {
                    continue;
                } else if dx == 0.0 {
                    tx += 1;
                } else if dy == 0.0 {
                    ty += 1;
                } else if dx * dy > 0.0 {
                    con += 1;
                } else {
                    dis += 1;
                }
            }
        }
        let n0 = (n * (n - 1) / 2) as f64;
        let xtied = n0 - (con + dis + ty) as f64;
        let ytied = n0 - (con + dis + tx) as f64;
        (con - dis) as f64 / ((n0 - xtied) * (n0 - ytied)).sqrt()
    }

    #[test]
    fn pearson_affine_relationships() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        assert_eq!(pearson(&x, &y).unwrap(), 1.0);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert_eq!(pearson(&x, &neg).unwrap(), -1.0);
    }

    #[test]
    fn pearson_matches_covariance_formula() {
        let x = [0.3, 1.7, 2.2, 4.9, 5.1, 6.0];
        let y = [2.0, 1.1, 3.0, 4.2, 3.9, 6.6];
        let n = x.len() as f64;
        let mx = x.iter().sum::<f64>() / n;
        let my = y.iter().sum::<f64>() / n;
        let cov: f64 = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - mx) * (b - my))
            .sum::<f64>()
            / n;
        let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum::<f64>() / n;
        let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum::<f64>() / n;
        let expected = cov / (vx * vy).sqrt();
        assert!((pearson(&x, &y).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn pearson_degenerate_inputs() {
        assert!(pearson(&[1.0], &[2.0]).is_err());
        assert!(pearson(&[1.0, 1.0], &[1.0, 2.0]).is_err());
        assert!(pearson(&[1.0, 2.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn kendall_perfect_orderings() {
        assert_eq!(
            kendall_tau(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap(),
            1.0
        );
        assert_eq!(
            kendall_tau(&[1.0, 2.0, 3.0], &[30.0, 20.0, 10.0]).unwrap(),
            -1.0
        );
    }

    #[test]
    fn kendall_with_ties_matches_pair_count_oracle() {
        let x = [1.0, 2.0, 2.0, 3.0, 3.0, 3.0, 4.0, 5.0];
        let y = [2.0, 1.0, 3.0, 3.0, 2.0, 3.0, 1.0, 2.0];
        let got = kendall_tau(&x, &y).unwrap();
        assert!((got - kendall_oracle(&x, &y)).abs() < 1e-12);
    }

    #[test]
    fn kendall_rejects_constant_vector() {
        assert!(kendall_tau(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn alpha_perfect_agreement_is_exactly_one() {
        let m = ReliabilityMatrix::new(vec![
            vec![Some(Poor), Some(Poor), Some(Poor)],
            vec![Some(Excellent), Some(Excellent), Some(Excellent)],
            vec![Some(Fair), Some(Fair), None],
        ])
        .unwrap();
        assert_eq!(
            krippendorff_alpha(&m, DifferenceFunction::Ordinal).unwrap(),
            1.0
        );
        assert_eq!(
            krippendorff_alpha(&m, DifferenceFunction::Interval).unwrap(),
            1.0
        );
    }

    #[test]
    fn alpha_total_disagreement_hand_value() {
        // two items, both rated (1, 3): coincidences o13 = o31 = 2,
        // marginals n1 = n3 = 2, n = 4, ordinal delta^2(1,3) = 4,
        // alpha = 1 - 3 * (2*4) / (2*2*4) = -0.5
        let m = ReliabilityMatrix::new(vec![
            vec![Some(Poor), Some(Excellent)],
            vec![Some(Poor), Some(Excellent)],
        ])
        .unwrap();
        assert_eq!(
            krippendorff_alpha(&m, DifferenceFunction::Ordinal).unwrap(),
            -0.5
        );
    }

    #[test]
    fn alpha_requires_two_pairable_items() {
        let m = ReliabilityMatrix::new(vec![
            vec![Some(Poor), None, None],
            vec![None, Some(Fair), None],
        ])
        .unwrap();
        assert_eq!(
            krippendorff_alpha(&m, DifferenceFunction::Ordinal),
            Err(MetaevalError::InsufficientData)
        );
    }

    #[test]
    fn alpha_is_permutation_invariant() {
        let rows = vec![
            vec![Some(Poor), Some(Fair), Some(Poor)],
            vec![Some(Excellent), Some(Excellent), Some(Fair)],
            vec![Some(Fair), Some(Fair), None],
            vec![Some(Poor), Some(Excellent), Some(Poor)],
        ];
        let base = krippendorff_alpha(
            &ReliabilityMatrix::new(rows.clone()).unwrap(),
            DifferenceFunction::Ordinal,
        )
        .unwrap();
        let mut shuffled = rows.clone();
        shuffled.swap(0, 3);
        shuffled.swap(1, 2);
        let mut cols_swapped: Vec<Vec<Option<ScoreLevel>>> = shuffled;
        for row in &mut cols_swapped {
            row.swap(0, 2);
        }
        let permuted = krippendorff_alpha(
            &ReliabilityMatrix::new(cols_swapped).unwrap(),
            DifferenceFunction::Ordinal,
        )
        .unwrap();
        assert!((base - permuted).abs() < 1e-12);
    }

    #[test]
    fn cv_examples() {
        assert_eq!(
            coefficient_of_variation(&[vec![2.0, 2.0, 2.0]]).unwrap(),
            0.0
        );
        let single = coefficient_of_variation(&[vec![1.0, 3.0]]).unwrap();
        assert!((single - std::f64::consts::SQRT_2 / 2.0).abs() < 1e-12);
        let two = coefficient_of_variation(&[vec![1.0, 3.0], vec![2.0, 2.0]]).unwrap();
        assert!((two - single / 2.0).abs() < 1e-12);
    }

    #[test]
    fn cv_rejects_non_positive_mean() {
        assert!(coefficient_of_variation(&[vec![0.0, 0.0]]).is_err());
    }

    #[test]
    fn cv_reduction_examples() {
        assert!((cv_reduction(0.5, 0.27).unwrap() - 0.46).abs() < 1e-12);
        assert_eq!(cv_reduction(0.4, 0.4).unwrap(), 0.0);
        assert_eq!(cv_reduction(0.4, 0.0).unwrap(), 1.0);
        assert!(cv_reduction(0.0, 0.1).is_err());
    }

    fn ranking(order: &[&str]) -> Ranking {
        Ranking {
            order: order.iter().map(|s| s.to_string()).collect(),
            copeland: order.iter().map(|s| (s.to_string(), 0)).collect(),
        }
    }

    fn eval_sample(scores: &[(&str, f64)], order: &[&str]) -> SystemEvalSample {
        SystemEvalSample {
            metric_scores: scores.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            human: ranking(order),
        }
    }

    #[test]
    fn system_correlation_perfect_and_inverted() {
        let agree = SystemEvalSet::new(vec![
            eval_sample(&[("a", 0.5), ("b", 0.9), ("c", 0.1)], &["b", "a", "c"]),
            eval_sample(&[("a", 3.0), ("b", 2.0), ("c", 1.0)], &["a", "b", "c"]),
        ])
        .unwrap();
        let s = system_correlation(&agree).unwrap();
        assert_eq!(s.kendall, 1.0);
        assert_eq!(s.used, 2);
        assert_eq!(s.skipped, 0);

        let invert = SystemEvalSet::new(vec![eval_sample(
            &[("a", 0.9), ("b", 0.5), ("c", 0.1)],
            &["c", "b", "a"],
        )])
        .unwrap();
        assert_eq!(system_correlation(&invert).unwrap().kendall, -1.0);
    }

    #[test]
    fn system_correlation_averages_per_sample_oracle() {
        let set = SystemEvalSet::new(vec![
            eval_sample(&[("a", 1.0), ("b", 2.0), ("c", 3.0)], &["c", "b", "a"]),
            eval_sample(&[("a", 2.0), ("b", 1.0), ("c", 3.0)], &["c", "b", "a"]),
            eval_sample(&[("a", 9.0), ("b", 5.0), ("c", 7.0)], &["a", "c", "b"]),
            eval_sample(&[("a", 1.0), ("b", 3.0), ("c", 2.0)], &["b", "a", "c"]),
        ])
        .unwrap();
        let got = system_correlation(&set).unwrap();
        let mut expect_tau = 0.0;
        let mut expect_r = 0.0;
        for sample in set.samples() {
            let (m, h) = super::aligned_vectors(sample);
            expect_tau += kendall_oracle(&m, &h);
            expect_r += pearson(&m, &h).unwrap();
        }
        assert!((got.kendall - expect_tau / 4.0).abs() < 1e-12);
        assert!((got.pearson - expect_r / 4.0).abs() < 1e-12);
    }

    #[test]
    fn system_correlation_skips_degenerate_samples() {
        let set = SystemEvalSet::new(vec![
            eval_sample(&[("a", 1.0), ("b", 1.0)], &["a", "b"]),
            eval_sample(&[("a", 2.0), ("b", 1.0)], &["a", "b"]),
        ])
        .unwrap();
        let s = system_correlation(&set).unwrap();
        assert_eq!((s.used, s.skipped), (1, 1));

        let all_bad =
            SystemEvalSet::new(vec![eval_sample(&[("a", 1.0), ("b", 1.0)], &["a", "b"])]).unwrap();
        assert_eq!(
            system_correlation(&all_bad),
            Err(MetaevalError::NoValidSamples)
        );
    }

    #[test]
    fn pooled_variant_pools_pairs() {
        let set = SystemEvalSet::new(vec![
            eval_sample(&[("a", 1.0), ("b", 2.0)], &["b", "a"]),
            eval_sample(&[("a", 3.0), ("b", 4.0)], &["b", "a"]),
        ])
        .unwrap();
        let pooled = system_correlation_pooled(&set).unwrap();
        // metric [1,2,3,4] vs human [1,2,1,2]
        assert!(
            (pooled.kendall - kendall_oracle(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 1.0, 2.0])).abs()
                < 1e-12
        );
    }

    #[test]
    fn instance_correlation_identity_and_inverse() {
        let gold = [1.0, 2.0, 3.0, 2.5];
        let c = instance_correlation(&gold, &gold).unwrap();
        assert_eq!((c.pearson, c.kendall), (1.0, 1.0));
        let centered_neg: Vec<f64> = gold.iter().map(|v| -v).collect();
        let c = instance_correlation(&centered_neg, &gold).unwrap();
        assert_eq!((c.pearson, c.kendall), (-1.0, -1.0));
    }

    #[test]
    fn eval_set_rejects_mismatched_systems() {
        assert!(SystemEvalSet::new(vec![
            eval_sample(&[("a", 1.0), ("b", 2.0)], &["a", "b"]),
            eval_sample(&[("a", 1.0), ("c", 2.0)], &["a", "c"]),
        ])
        .is_err());
        assert!(SystemEvalSet::new(vec![eval_sample(&[("a", 1.0)], &["a"])]).is_err());
    }
}
