//! Fixtures shared by the benchmarks.

use hme_core::pipeline::{build_primitive_graph, GraphOptions};
use hme_core::relation_scorer::NoisyOracleScorer;
use hme_core::symbol_graph::{symbol_nodes, PrimitiveGraph, SymbolNode};
use hme_core::synth_gen::{generate_dataset, SynthConfig};
use hme_core::{GroundTruthGraph, Grammar, InkExpression};

/// Jittered synthetic expressions from a fixed seed.
pub fn expressions(count: usize, max_depth: usize) -> Vec<(InkExpression, GroundTruthGraph)> {
    let cfg = SynthConfig { seed: 42, n_expressions: count, max_depth, jitter: 0.05, ..Default::default() };
    generate_dataset(&cfg).expect("default symbol set").0
}

pub fn nodes(expr: &InkExpression) -> Vec<SymbolNode> {
    symbol_nodes(&hme_core::pipeline::preprocess(expr, &GraphOptions::default())).expect("annotated")
}

pub fn graphs(count: usize) -> Vec<(PrimitiveGraph, GroundTruthGraph)> {
    let scorer = NoisyOracleScorer::default();
    expressions(count, 4)
        .into_iter()
        .map(|(e, gt)| {
            let g = build_primitive_graph(&e, &Grammar::default(), &scorer, &GraphOptions::default()).expect("builds");
            (g, gt)
        })
        .collect()
}

/// The expression with the most symbols among `count` generated ones.
pub fn largest(count: usize, max_depth: usize) -> InkExpression {
    expressions(count, max_depth)
        .into_iter()
        .map(|(e, _)| e)
        .max_by_key(|e| e.annotations.as_ref().map_or(0, Vec::len))
        .expect("non-empty")
}
