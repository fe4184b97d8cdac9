use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use ndarray::Array2;
use rand::Rng;
use std::hint::black_box;
use syncpred_bench::nws30;
use syncpred_core::graph::nws_generate;
use syncpred_core::learn::{train_tree, NetModel};
use syncpred_core::{rng, Model, NwsParams};

fn steps(c: &mut Criterion) {
    let mut group = c.benchmark_group("step");
    for model in [Model::km(), Model::Fca { kappa: 5 }, Model::Ghm { kappa: 5 }] {
        let (g, x0) = nws30(&model, 1);
        group.bench_function(model.kind().as_str(), |b| b.iter(|| model.step(black_box(&g), black_box(&x0)).unwrap()));
    }
    group.finish();
}

fn generate(c: &mut Criterion) {
    let params = NwsParams { n: 30, k: 2, p: 0.65, passes: 1 };
    let mut s = rng::from_seed(2);
    c.bench_function("nws_generate_30", |b| b.iter(|| nws_generate(black_box(&params), &mut s).unwrap()));
}

fn learners(c: &mut Criterion) {
    let mut s = rng::from_seed(3);
    let x = Array2::from_shape_fn((1000, 40), |_| s.random::<f64>());
    let y: Vec<bool> = x.rows().into_iter().map(|r| r[0] + r[1] > 1.0).collect();
    c.bench_function("tree_1000x40", |b| {
        b.iter_batched(
            || rng::from_seed(4),
            |mut r| train_tree(x.view(), &y, 7, &mut r).unwrap(),
            BatchSize::SmallInput,
        )
    });
    let net = NetModel::init(40, 100, 0.25, &mut s);
    c.bench_function("net_forward_1000x40", |b| b.iter(|| net.predict_proba_rows(black_box(x.view())).unwrap()));
}

criterion_group!(benches, steps, generate, learners);
criterion_main!(benches);
