//! Brute-force reference implementations, kept independent of the library
//! code paths they check.

use vectra::balance::ScoredSample;
use vectra::types::{DimensionId, ScoreLevel};

/// Direct recount of the 42 marginal counts, one pair at a time.
pub fn recount(dataset: &[ScoredSample]) -> Vec<Vec<u64>> {
    DimensionId::ALL
        .iter()
        .map(|&d| {
            ScoreLevel::ALL
                .iter()
                .map(|&s| dataset.iter().filter(|x| x.scores.get(d) == s).count() as u64)
                .collect()
        })
        .collect()
}

/// Pearson r through raw moments (E[xy] − E[x]E[y]), a different numerical
/// route than the centered two-pass in the library.
pub fn pearson_raw_moment(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    if x.len() < 2 {
        return None;
    }
    let ex = x.iter().sum::<f64>() / n;
    let ey = y.iter().sum::<f64>() / n;
    let exy = x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / n;
    let exx = x.iter().map(|a| a * a).sum::<f64>() / n;
    let eyy = y.iter().map(|b| b * b).sum::<f64>() / n;
    let cov = exy - ex * ey;
    let vx = exx - ex * ex;
    let vy = eyy - ey * ey;
    if vx <= 0.0 || vy <= 0.0 {
        return None;
    }
    Some(cov / (vx * vy).sqrt())
}

/// Kendall tau-b by enumerating every pair.
pub fn kendall_pair_count(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    if n < 2 {
        return None;
    }
    let (mut con, mut dis, mut tie_x, mut tie_y, mut tie_both) = (0i64, 0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = x[i] - x[j];
            let dy = y[i] - y[j];
            if dx == 0.0 && dy == 0.0 {
                tie_both += 1;
            } else if dx == 0.0 {
                tie_x += 1;
            } else if dy == 0.0 {
                tie_y += 1;
            } else if dx * dy > 0.0 {
                con += 1;
            } else {
                dis += 1;
            }
        }
    }
    let n0 = (n * (n - 1) / 2) as i64;
    let xtied = tie_x + tie_both;
    let ytied = tie_y + tie_both;
    if n0 == xtied || n0 == ytied {
        return None;
    }
    Some((con - dis) as f64 / (((n0 - xtied) as f64) * ((n0 - ytied) as f64)).sqrt())
}

/// Krippendorff's ordinal alpha straight from the definition: observed
/// disagreement over within-unit pairs, expected disagreement over all
/// pooled pairs.
pub fn alpha_pair_enumeration(rows: &[Vec<Option<ScoreLevel>>]) -> Option<f64> {
    let units: Vec<Vec<u8>> = rows
        .iter()
        .map(|row| row.iter().flatten().map(|s| s.value()).collect::<Vec<u8>>())
        .filter(|vals| vals.len() >= 2)
        .collect();
    if units.len() < 2 {
        return None;
    }

    let mut marginals = [0.0f64; 4]; // indexed by raw value 1..=3
    for unit in &units {
        for &v in unit {
            marginals[v as usize] += 1.0;
        }
    }
    let n: f64 = units.iter().map(|u| u.len() as f64).sum();

    let delta_sq = |a: u8, b: u8| -> f64 {
        let (lo, hi) = (a.min(b), a.max(b));
        let span: f64 = (lo..=hi).map(|g| marginals[g as usize]).sum();
        (span - (marginals[lo as usize] + marginals[hi as usize]) / 2.0).powi(2)
    };

    let mut observed = 0.0;
    for unit in &units {
        let m = unit.len() as f64;
        let mut unit_sum = 0.0;
        for i in 0..unit.len() {
            for j in 0..unit.len() {
                if i != j {
                    unit_sum += delta_sq(unit[i], unit[j]);
                }
            }
        }
        observed += unit_sum / (m - 1.0);
    }
    observed /= n;

    let pooled: Vec<u8> = units.iter().flatten().copied().collect();
    let mut expected = 0.0;
    for i in 0..pooled.len() {
        for j in 0..pooled.len() {
            if i != j {
                expected += delta_sq(pooled[i], pooled[j]);
            }
        }
    }
    expected /= n * (n - 1.0);

    if expected == 0.0 {
        return Some(1.0);
    }
    Some(1.0 - observed / expected)
}
