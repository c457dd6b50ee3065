//! Shared fixtures for the criterion benchmarks.

use rand::{Rng, RngExt, SeedableRng};
use rand_pcg::Pcg64;

use loanboost::dataset::Dataset;

/// Planted binary-classification dataset with `n` rows and `n_features`
/// columns (the first two informative, the rest noise), with ~8% missing
/// cells on even-indexed features.
pub fn planted_dataset(seed: u64, n: usize, n_features: usize) -> Dataset {
    let mut rng = Pcg64::seed_from_u64(seed);
    let mut columns: Vec<Vec<f64>> = vec![Vec::with_capacity(n); n_features];
    let mut masks: Vec<Vec<bool>> = vec![Vec::with_capacity(n); n_features];
    let mut target = Vec::with_capacity(n);
    for _ in 0..n {
        let mut margin = 0.0;
        for (f, (col, mask)) in columns.iter_mut().zip(&mut masks).enumerate() {
            let missing = f % 2 == 0 && rng.random::<f64>() < 0.08;
            let v = rng.random::<f64>() * 4.0 - 2.0;
            if f == 0 {
                margin += 1.5 * v;
            } else if f == 1 {
                margin -= 1.1 * v;
            }
            if missing {
                col.push(f64::NAN);
                mask.push(true);
            } else {
                col.push(v);
                mask.push(false);
            }
        }
        let p = 1.0 / (1.0 + (-margin as f64).exp());
        target.push(u8::from(rng.random::<f64>() < p));
    }
    let names = (0..n_features).map(|f| format!("f{f}")).collect();
    Dataset::new(names, columns, masks, target).expect("valid fixture")
}

/// Scores and labels for ranking benchmarks.
pub fn scored_labels(seed: u64, n: usize) -> (Vec<u8>, Vec<f64>) {
    let mut rng = Pcg64::seed_from_u64(seed);
    let mut labels: Vec<u8> = (0..n).map(|_| u8::from(rng.random::<f64>() < 0.4)).collect();
    labels[0] = 1;
    labels[1] = 0;
    let scores = (0..n).map(|_| rng.random::<f64>()).collect();
    (labels, scores)
}
