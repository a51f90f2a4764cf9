//! Diversity-aware sample selection over precomputed feature vectors:
//! standard-score normalization, seeded k-means, per-cluster medoids.
//!
//! Feature extraction happens out of process; this module ingests the
//! pooled descriptors (256-dim by default) and covers everything after.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub const DEFAULT_MAX_ITER: usize = 100;
pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplingError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("k must be in 1..={n}, got {k}")]
    InvalidK { k: usize, n: usize },
    #[error("inconsistent clustering: {0}")]
    InconsistentClustering(String),
    #[error("malformed feature matrix: {0}")]
    ShapeMismatch(String),
}

/// Sample ids with one feature vector per id; all rows share a dimension
/// and every entry is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    ids: Vec<String>,
    vectors: Vec<Vec<f64>>,
}

impl FeatureMatrix {
    pub fn new(ids: Vec<String>, vectors: Vec<Vec<f64>>) -> Result<FeatureMatrix, SamplingError> {
        if ids.len() != vectors.len() {
            return Err(SamplingError::ShapeMismatch(format!(
                "{} ids but {} vectors",
                ids.len(),
                vectors.len()
            )));
        }
        let dim = vectors.first().map_or(0, Vec::len);
        for (i, row) in vectors.iter().enumerate() {
            if row.len() != dim {
                return Err(SamplingError::ShapeMismatch(format!(
                    "row {i} has dimension {} instead of {dim}",
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(SamplingError::ShapeMismatch(format!(
                    "row {i} contains a non-finite entry"
                )));
            }
        }
        Ok(FeatureMatrix { ids, vectors })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, Vec::len)
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }
}

/// K-means output: one label per input row, k centroids.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterResult {
    pub labels: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub inertia: f64,
    pub iterations: usize,
}

/// Standard-score normalization per coordinate, with population variance.
/// Zero-variance coordinates map to 0.
pub fn standardize(m: &FeatureMatrix) -> Result<FeatureMatrix, SamplingError> {
    let n = m.len();
    if n < 2 {
        return Err(SamplingError::DegenerateInput(format!(
            "standardization needs at least 2 rows, got {n}"
        )));
    }
    let dim = m.dim();
    let mut out = vec![vec![0.0; dim]; n];
    for c in 0..dim {
        let first = m.vectors[0][c];
        if m.vectors.iter().all(|row| row[c] == first) {
            continue; // constant coordinate maps to 0
        }
        let mean = m.vectors.iter().map(|row| row[c]).sum::<f64>() / n as f64;
        let var = m
            .vectors
            .iter()
            .map(|row| (row[c] - mean).powi(2))
            .sum::<f64>()
            / n as f64;
        let std = var.sqrt();
        for (i, row) in m.vectors.iter().enumerate() {
            out[i][c] = (row[c] - mean) / std;
        }
    }
    FeatureMatrix::new(m.ids.clone(), out)
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Seeded k-means++ initialization.
fn kmeanspp_init(vectors: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = vectors.len();
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    chosen.push(rng.random_range(0..n));
    let mut d2: Vec<f64> = vectors
        .iter()
        .map(|v| dist2(v, &vectors[chosen[0]]))
        .collect();

    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let r = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                acc += w;
                if w > 0.0 && acc > r {
                    pick = Some(i);
                    break;
                }
            }
            pick.unwrap_or_else(|| d2.iter().rposition(|&w| w > 0.0).expect("total > 0"))
        } else {
            // remaining points coincide with chosen centers
            let unchosen: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            unchosen[rng.random_range(0..unchosen.len())]
        };
        chosen.push(next);
        for (i, v) in vectors.iter().enumerate() {
            d2[i] = d2[i].min(dist2(v, &vectors[next]));
        }
    }
    chosen.iter().map(|&i| vectors[i].clone()).collect()
}

/// Nearest-centroid assignment, ties to the lowest centroid index.
fn assign(vectors: &[Vec<f64>], centroids: &[Vec<f64>]) -> Vec<usize> {
    vectors
        .iter()
        .map(|v| {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (j, c) in centroids.iter().enumerate() {
                let d = dist2(v, c);
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
            best
        })
        .collect()
}

/// Reseed each empty cluster to the point currently farthest from its own
/// centroid, drawn from clusters that can spare a member.
fn repair_empty(vectors: &[Vec<f64>], centroids: &mut [Vec<f64>], labels: &mut [usize]) {
    let k = centroids.len();
    loop {
        let mut sizes = vec![0usize; k];
        for &l in labels.iter() {
            sizes[l] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return;
        };
        let farthest = vectors
            .iter()
            .enumerate()
            .filter(|(i, _)| sizes[labels[*i]] > 1)
            .max_by(|(ia, va), (ib, vb)| {
                let da = dist2(va, &centroids[labels[*ia]]);
                let db = dist2(vb, &centroids[labels[*ib]]);
                da.partial_cmp(&db)
                    .expect("finite distances")
                    .then(ib.cmp(ia)) // ties to the lowest index
            })
            .map(|(i, _)| i)
            .expect("k <= n leaves a donatable point");
        centroids[empty] = vectors[farthest].clone();
        labels[farthest] = empty;
    }
}

fn cluster_means(
    vectors: &[Vec<f64>],
    labels: &[usize],
    k: usize,
    fallback: &[Vec<f64>],
) -> Vec<Vec<f64>> {
    let dim = vectors.first().map_or(0, Vec::len);
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (v, &l) in vectors.iter().zip(labels) {
        counts[l] += 1;
        for (s, x) in sums[l].iter_mut().zip(v) {
            *s += x;
        }
    }
    sums.into_iter()
        .enumerate()
        .map(|(j, sum)| {
            if counts[j] == 0 {
                fallback[j].clone()
            } else {
                sum.into_iter().map(|s| s / counts[j] as f64).collect()
            }
        })
        .collect()
}

/// Lloyd's algorithm with seeded k-means++ initialization. Converges when
/// the largest centroid movement drops below `tol` or after `max_iter`
/// iterations; deterministic for a fixed seed.
pub fn kmeans(
    m: &FeatureMatrix,
    k: usize,
    seed: u64,
    max_iter: usize,
    tol: f64,
) -> Result<ClusterResult, SamplingError> {
    let n = m.len();
    if k < 1 || k > n {
        return Err(SamplingError::InvalidK { k, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = kmeanspp_init(&m.vectors, k, &mut rng);
    let mut labels = assign(&m.vectors, &centroids);
    repair_empty(&m.vectors, &mut centroids, &mut labels);

    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let new_centroids = cluster_means(&m.vectors, &labels, k, &centroids);
        let movement = centroids
            .iter()
            .zip(&new_centroids)
            .map(|(a, b)| dist2(a, b).sqrt())
            .fold(0.0f64, f64::max);
        centroids = new_centroids;
        labels = assign(&m.vectors, &centroids);
        repair_empty(&m.vectors, &mut centroids, &mut labels);
        if movement < tol {
            break;
        }
    }

    let inertia = m
        .vectors
        .iter()
        .zip(&labels)
        .map(|(v, &l)| dist2(v, &centroids[l]))
        .sum();
    Ok(ClusterResult {
        labels,
        centroids,
        inertia,
        iterations,
    })
}

/// The dataset member closest to each cluster's centroid in Euclidean
/// distance, ties broken by ascending sample id; one id per non-empty
/// cluster, in cluster order.
pub fn select_medoids(m: &FeatureMatrix, c: &ClusterResult) -> Result<Vec<String>, SamplingError> {
    if c.labels.len() != m.len() {
        return Err(SamplingError::InconsistentClustering(format!(
            "{} labels for {} rows",
            c.labels.len(),
            m.len()
        )));
    }
    let k = c.centroids.len();
    if let Some(&bad) = c.labels.iter().find(|&&l| l >= k) {
        return Err(SamplingError::InconsistentClustering(format!(
            "label {bad} outside 0..{k}"
        )));
    }
    if c.centroids.iter().any(|cent| cent.len() != m.dim()) {
        return Err(SamplingError::InconsistentClustering(
            "centroid dimension mismatch".to_string(),
        ));
    }

    let mut medoids = Vec::new();
    for (j, centroid) in c.centroids.iter().enumerate() {
        let best = m
            .vectors
            .iter()
            .enumerate()
            .filter(|(i, _)| c.labels[*i] == j)
            .min_by(|(ia, va), (ib, vb)| {
                dist2(va, centroid)
                    .partial_cmp(&dist2(vb, centroid))
                    .expect("finite distances")
                    .then_with(|| m.ids[*ia].cmp(&m.ids[*ib]))
            })
            .map(|(i, _)| m.ids[i].clone());
        if let Some(id) = best {
            medoids.push(id);
        }
    }
    Ok(medoids)
}

/// Standardize, cluster into `k` groups, and return one medoid per cluster.
pub fn diversity_sample(
    m: &FeatureMatrix,
    k: usize,
    seed: u64,
) -> Result<Vec<String>, SamplingError> {
    let normalized = standardize(m)?;
    let clusters = kmeans(&normalized, k, seed, DEFAULT_MAX_ITER, DEFAULT_TOL)?;
    select_medoids(&normalized, &clusters)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(ids: &[&str], vectors: &[&[f64]]) -> FeatureMatrix {
        FeatureMatrix::new(
            ids.iter().map(|s| s.to_string()).collect(),
            vectors.iter().map(|v| v.to_vec()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn standardize_two_points() {
        let m = matrix(&["a", "b"], &[&[0.0], &[2.0]]);
        let z = standardize(&m).unwrap();
        assert_eq!(z.vectors(), &[vec![-1.0], vec![1.0]]);
    }

    #[test]
    fn standardize_zeroes_constant_column() {
        let m = matrix(&["a", "b", "c"], &[&[5.0, 1.0], &[5.0, 2.0], &[5.0, 3.0]]);
        let z = standardize(&m).unwrap();
        assert!(z.vectors().iter().all(|row| row[0] == 0.0));
        assert!(z.vectors().iter().any(|row| row[1] != 0.0));
    }

    #[test]
    fn standardize_is_idempotent() {
        let m = matrix(
            &["a", "b", "c", "d"],
            &[&[1.0, -3.0], &[2.0, 0.5], &[4.0, 2.5], &[8.0, 7.0]],
        );
        let once = standardize(&m).unwrap();
        let twice = standardize(&once).unwrap();
        for (r1, r2) in once.vectors().iter().zip(twice.vectors()) {
            for (a, b) in r1.iter().zip(r2) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn standardize_rejects_single_row() {
        let m = matrix(&["a"], &[&[1.0]]);
        assert!(matches!(
            standardize(&m),
            Err(SamplingError::DegenerateInput(_))
        ));
    }

    #[test]
    fn feature_matrix_rejects_bad_shapes() {
        assert!(FeatureMatrix::new(vec!["a".into()], vec![]).is_err());
        assert!(FeatureMatrix::new(
            vec!["a".into(), "b".into()],
            vec![vec![1.0], vec![1.0, 2.0]]
        )
        .is_err());
        assert!(FeatureMatrix::new(vec!["a".into()], vec![vec![f64::NAN]]).is_err());
    }

    #[test]
    fn kmeans_k_equals_n_gives_zero_inertia() {
        let m = matrix(&["a", "b", "c"], &[&[0.0], &[5.0], &[9.0]]);
        let c = kmeans(&m, 3, 0, 100, 1e-6).unwrap();
        assert_eq!(c.inertia, 0.0);
        let mut labels = c.labels.clone();
        labels.sort_unstable();
        assert_eq!(labels, vec![0, 1, 2]);
    }

    #[test]
    fn kmeans_k1_centroid_is_coordinate_mean() {
        let m = matrix(&["a", "b", "c", "d"], &[&[0.0], &[2.0], &[4.0], &[10.0]]);
        let c = kmeans(&m, 1, 42, 100, 1e-6).unwrap();
        assert_eq!(c.centroids, vec![vec![4.0]]);
        assert!(c.labels.iter().all(|&l| l == 0));
    }

    #[test]
    fn kmeans_splits_separated_blobs() {
        let m = matrix(&["a", "b", "c", "d"], &[&[0.0], &[0.1], &[10.0], &[10.1]]);
        let c = kmeans(&m, 2, 0, 100, 1e-6).unwrap();
        assert_eq!(c.labels[0], c.labels[1]);
        assert_eq!(c.labels[2], c.labels[3]);
        assert_ne!(c.labels[0], c.labels[2]);
    }

    #[test]
    fn kmeans_inertia_non_increasing_over_iterations() {
        let m = matrix(
            &["a", "b", "c", "d", "e", "f"],
            &[
                &[0.0, 0.0],
                &[1.0, 0.5],
                &[0.5, 1.0],
                &[8.0, 8.0],
                &[9.0, 8.5],
                &[7.5, 9.0],
            ],
        );
        let mut prev = f64::INFINITY;
        for max_iter in 1..=10 {
            let c = kmeans(&m, 2, 3, max_iter, 0.0).unwrap();
            assert!(c.inertia <= prev + 1e-12);
            prev = c.inertia;
        }
    }

    #[test]
    fn kmeans_rejects_invalid_k() {
        let m = matrix(&["a", "b"], &[&[0.0], &[1.0]]);
        assert!(matches!(
            kmeans(&m, 0, 0, 10, 1e-6),
            Err(SamplingError::InvalidK { .. })
        ));
        assert!(matches!(
            kmeans(&m, 3, 0, 10, 1e-6),
            Err(SamplingError::InvalidK { .. })
        ));
    }

    #[test]
    fn medoid_of_singleton_cluster_is_its_member() {
        let m = matrix(&["only"], &[&[3.0]]);
        let c = ClusterResult {
            labels: vec![0],
            centroids: vec![vec![100.0]],
            inertia: 0.0,
            iterations: 0,
        };
        assert_eq!(select_medoids(&m, &c).unwrap(), vec!["only"]);
    }

    #[test]
    fn medoid_minimizes_distance_to_centroid() {
        let m = matrix(&["p0", "p1", "p5"], &[&[0.0], &[1.0], &[5.0]]);
        let c = ClusterResult {
            labels: vec![0, 0, 0],
            centroids: vec![vec![2.0]],
            inertia: 0.0,
            iterations: 0,
        };
        assert_eq!(select_medoids(&m, &c).unwrap(), vec!["p1"]);
    }

    #[test]
    fn medoid_tie_breaks_to_smaller_id() {
        let m = matrix(&["b", "a"], &[&[-1.0], &[1.0]]);
        let c = ClusterResult {
            labels: vec![0, 0],
            centroids: vec![vec![0.0]],
            inertia: 0.0,
            iterations: 0,
        };
        assert_eq!(select_medoids(&m, &c).unwrap(), vec!["a"]);
    }

    #[test]
    fn select_medoids_rejects_inconsistent_labels() {
        let m = matrix(&["a", "b"], &[&[0.0], &[1.0]]);
        let c = ClusterResult {
            labels: vec![0, 5],
            centroids: vec![vec![0.0]],
            inertia: 0.0,
            iterations: 0,
        };
        assert!(matches!(
            select_medoids(&m, &c),
            Err(SamplingError::InconsistentClustering(_))
        ));
    }

    #[test]
    fn diversity_sample_k_equals_n_returns_all_ids() {
        let m = matrix(&["a", "b", "c"], &[&[0.0], &[4.0], &[9.0]]);
        let mut ids = diversity_sample(&m, 3, 0).unwrap();
        ids.sort();
        assert_eq!(ids, vec!["a", "b", "c"]);
    }

    #[test]
    fn diversity_sample_k1_is_global_medoid() {
        let m = matrix(&["a", "b", "c", "d"], &[&[0.0], &[2.0], &[4.0], &[10.0]]);
        let ids = diversity_sample(&m, 1, 7).unwrap();
        // standardized mean is 0; "c" (4.0) is nearest to the mean of
        // {0, 2, 4, 10}
        assert_eq!(ids, vec!["c"]);
    }

    #[test]
    fn diversity_sample_is_deterministic() {
        let m = matrix(
            &["a", "b", "c", "d", "e"],
            &[
                &[0.0, 1.0],
                &[0.2, 0.8],
                &[5.0, 5.0],
                &[5.2, 4.8],
                &[2.5, 2.5],
            ],
        );
        let first = diversity_sample(&m, 2, 123).unwrap();
        for _ in 0..20 {
            assert_eq!(diversity_sample(&m, 2, 123).unwrap(), first);
        }
    }
}
