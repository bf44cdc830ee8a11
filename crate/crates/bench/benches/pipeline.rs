use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use hme_bench::{graphs, largest, nodes};
use hme_core::cyk_parser::{cyk_parse, CykOptions};
use hme_core::egat::{backward, model_forward, GraphBatch};
use hme_core::pipeline::{fit, vocabulary_for};
use hme_core::relation_scorer::GeometricScorer;
use hme_core::symbol_graph::build_los_edges;
use hme_core::{EgatConfig, EgatModel, Grammar, RelationLabel, TrainConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn los(c: &mut Criterion) {
    let mut g = c.benchmark_group("los");
    for depth in [2, 4, 6] {
        let expr = largest(50, depth);
        let n = nodes(&expr);
        g.bench_with_input(BenchmarkId::from_parameter(n.len()), &n, |b, n| b.iter(|| build_los_edges(black_box(n))));
    }
    g.finish();
}

fn cyk(c: &mut Criterion) {
    let mut g = c.benchmark_group("cyk");
    let grammar = Grammar::default();
    let scorer = GeometricScorer::default();
    for depth in [2, 4, 6] {
        let expr = hme_core::pipeline::preprocess(&largest(50, depth), &Default::default());
        let n = nodes(&expr);
        g.bench_with_input(BenchmarkId::from_parameter(n.len()), &n, |b, n| {
            b.iter(|| cyk_parse(&expr, black_box(n), &grammar, &scorer, &CykOptions::default()))
        });
    }
    g.finish();
}

fn egat(c: &mut Criterion) {
    let data = graphs(64);
    let vocab = vocabulary_for(data.iter().map(|(g, _)| g));
    let batches: Vec<GraphBatch> =
        data.iter().map(|(g, gt)| GraphBatch::from_graph(g, &vocab, Some(&gt.edge_pairs()))).collect();
    let refs: Vec<&GraphBatch> = batches.iter().collect();
    let batch = GraphBatch::union(&refs).expect("batches share widths");
    let model = EgatModel::new(EgatConfig::default(), vocab.dim(), RelationLabel::COUNT, 0).expect("valid config");
    c.bench_function("egat/forward_64_graphs", |b| {
        b.iter(|| model_forward(&model, black_box(&batch), false, &mut ChaCha8Rng::seed_from_u64(0)))
    });
    c.bench_function("egat/backward_64_graphs", |b| b.iter(|| backward(&model, black_box(&batch), None)));
    let mut g = c.benchmark_group("egat_train");
    g.sample_size(10);
    g.bench_function("fit_64_graphs_5_epochs", |b| {
        b.iter(|| fit(&data, EgatConfig::default(), &TrainConfig { epochs: 5, ..Default::default() }))
    });
    g.finish();
}

criterion_group!(benches, los, cyk, egat);
criterion_main!(benches);
