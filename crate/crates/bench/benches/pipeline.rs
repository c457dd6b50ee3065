use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use loanboost::booster::{compute_gradients, find_best_split, train, BoosterParams};
use loanboost::metrics::roc_curve;
use loanboost_bench::{planted_dataset, scored_labels};

fn bench_split_finding(c: &mut Criterion) {
    let dataset = planted_dataset(1, 4000, 16);
    let params = BoosterParams::default();
    let margins = vec![0.0; dataset.n_rows()];
    let grads = compute_gradients(&dataset, &margins, &params).unwrap();
    let rows: Vec<usize> = (0..dataset.n_rows()).collect();
    c.bench_function("find_best_split/4000x16", |b| {
        b.iter(|| find_best_split(black_box(&rows), &grads, &dataset, &params))
    });
}

fn bench_training(c: &mut Criterion) {
    let dataset = planted_dataset(2, 1000, 12);
    let params = BoosterParams {
        n_estimators: 20,
        learning_rate: 0.1,
        ..BoosterParams::default()
    };
    let mut group = c.benchmark_group("train");
    group.sample_size(10);
    group.bench_function("1000x12/20_trees", |b| {
        b.iter(|| train(black_box(&dataset), &params).unwrap())
    });
    group.finish();
}

fn bench_prediction(c: &mut Criterion) {
    let dataset = planted_dataset(3, 5000, 12);
    let params = BoosterParams {
        n_estimators: 50,
        learning_rate: 0.1,
        ..BoosterParams::default()
    };
    let model = train(&dataset, &params).unwrap();
    c.bench_function("predict_proba/5000x12/50_trees", |b| {
        b.iter(|| model.predict_proba(black_box(&dataset)).unwrap())
    });
}

fn bench_roc(c: &mut Criterion) {
    let (labels, scores) = scored_labels(4, 20_000);
    c.bench_function("roc_curve/20000", |b| {
        b.iter_batched(
            || (labels.clone(), scores.clone()),
            |(y, s)| roc_curve(&y, &s, 1).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, bench_split_finding, bench_training, bench_prediction, bench_roc);
criterion_main!(benches);
