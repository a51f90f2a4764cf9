//! Pick maximally diverse representatives from redundant imagery:
//! standardize features, cluster, take the medoid of each cluster.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vectra::sampling::{diversity_sample, kmeans, standardize, FeatureMatrix};

fn main() {
    // Three synthetic "product series": tight clusters in feature space,
    // exactly the redundancy pattern diversity sampling is meant to break.
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut ids = Vec::new();
    let mut vectors = Vec::new();
    for (series, center) in [(0, [0.0, 0.0]), (1, [6.0, 6.0]), (2, [-5.0, 7.0])] {
        for i in 0..8 {
            ids.push(format!("series{series}-img{i}"));
            vectors.push(vec![
                center[0] + rng.random::<f64>() * 0.4,
                center[1] + rng.random::<f64>() * 0.4,
            ]);
        }
    }
    let matrix = FeatureMatrix::new(ids, vectors).unwrap();

    let normalized = standardize(&matrix).unwrap();
    let clusters = kmeans(&normalized, 3, 0, 100, 1e-6).unwrap();
    println!(
        "k-means: k=3, {} iterations, inertia {:.4}",
        clusters.iterations, clusters.inertia
    );

    let selected = diversity_sample(&matrix, 3, 0).unwrap();
    println!("selected medoids (one per series):");
    for id in &selected {
        println!("  {id}");
    }

    // Same seed, same answer.
    assert_eq!(diversity_sample(&matrix, 3, 0).unwrap(), selected);
    println!("re-run with the same seed is identical");
}
