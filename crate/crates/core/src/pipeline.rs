//! End-to-end glue: ink to primitive graph, graph to layout tree, tree to
//! evaluation row.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyk_parser::{cyk_parse, proposed_edges, CykOptions, Grammar, GrammarError};
use crate::egat::{predict_links, train, EgatError, EgatModel, GraphBatch, TrainConfig, TrainReport, Vocabulary};
use crate::eval_metrics::{expression_ok, link_counts, report, structure_ok, EvalError, EvalReport, EvalRow};
use crate::ink_io::{
    normalize, resample_expression, GroundTruthGraph, InkError, InkExpression, DEFAULT_RAMER_EPSILON,
    DEFAULT_TARGET_HEIGHT,
};
use crate::relation_scorer::{RelationScorer, ScoreError};
use crate::slt_builder::{repair_to_tree, threshold_edges, EdgeProbs, RepairReport, SltError, SltTree};
use crate::symbol_graph::{
    build_los_edges_with, symbol_nodes, CandidateEdge, GraphError, LosOptions, PrimitiveGraph, SourceTag,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Ink(#[from] InkError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Egat(#[from] EgatError),
    #[error(transparent)]
    Slt(#[from] SltError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("expression `{0}` carries no ground truth")]
    MissingGroundTruth(String),
}

/// Which proposal sets feed the primitive graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum EdgeSource {
    #[serde(rename = "CYK")]
    Cyk,
    #[serde(rename = "LOS")]
    Los,
    #[default]
    #[serde(rename = "CYK_AND_LOS")]
    CykAndLos,
}

impl EdgeSource {
    pub const ALL: [EdgeSource; 3] = [EdgeSource::Cyk, EdgeSource::Los, EdgeSource::CykAndLos];

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeSource::Cyk => "CYK",
            EdgeSource::Los => "LOS",
            EdgeSource::CykAndLos => "CYK_AND_LOS",
        }
    }
}

impl fmt::Display for EdgeSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EdgeSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "CYK" => Ok(EdgeSource::Cyk),
            "LOS" => Ok(EdgeSource::Los),
            "CYK_AND_LOS" => Ok(EdgeSource::CykAndLos),
            _ => Err(format!("unknown edge source `{s}` (expected CYK, LOS or CYK_AND_LOS)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GraphOptions {
    pub edge_source: EdgeSource,
    pub cyk: CykOptions,
    #[serde(skip)]
    pub los: LosOptions,
    pub target_height: f64,
    pub ramer_epsilon: f64,
}

impl Default for GraphOptions {
    fn default() -> Self {
        GraphOptions {
            edge_source: EdgeSource::CykAndLos,
            cyk: CykOptions::default(),
            los: LosOptions::default(),
            target_height: DEFAULT_TARGET_HEIGHT,
            ramer_epsilon: DEFAULT_RAMER_EPSILON,
        }
    }
}

/// Height normalization followed by polyline simplification.
pub fn preprocess(expr: &InkExpression, opts: &GraphOptions) -> InkExpression {
    resample_expression(&normalize(expr, opts.target_height), opts.ramer_epsilon)
}

/// Primitive graph of an annotated expression. CYK proposals keep the
/// parser's relation scores; LOS-only edges are scored by `scorer`.
pub fn build_primitive_graph(
    expr: &InkExpression,
    grammar: &Grammar,
    scorer: &dyn RelationScorer,
    opts: &GraphOptions,
) -> Result<PrimitiveGraph, PipelineError> {
    let expr = preprocess(expr, opts);
    let nodes = symbol_nodes(&expr)?;
    let need_cyk = opts.edge_source != EdgeSource::Los;
    let need_los = opts.edge_source != EdgeSource::Cyk;

    let cyk: BTreeMap<(String, String), CandidateEdge> = if need_cyk {
        let chart = cyk_parse(&expr, &nodes, grammar, scorer, &opts.cyk)?;
        proposed_edges(&chart, &nodes)
            .into_iter()
            .map(|e| ((e.src.clone(), e.dst.clone()), e))
            .collect()
    } else {
        BTreeMap::new()
    };
    let los = if need_los { build_los_edges_with(&nodes, &opts.los)? } else { BTreeSet::new() };

    let index = |id: &str| nodes.iter().position(|n| n.symbol_id == id).unwrap_or(usize::MAX);
    let mut edges: Vec<CandidateEdge> = match opts.edge_source {
        EdgeSource::Cyk => cyk.into_values().collect(),
        EdgeSource::CykAndLos => cyk
            .into_iter()
            .filter(|(k, _)| los.contains(k))
            .map(|(_, mut e)| {
                e.source_tag = SourceTag::Both;
                e
            })
            .collect(),
        EdgeSource::Los => los
            .iter()
            .map(|(s, d)| {
                let (a, b) = (&nodes[index(s)], &nodes[index(d)]);
                let score = scorer.score_pair(a, b, &expr)?;
                Ok(CandidateEdge {
                    src: s.clone(),
                    dst: d.clone(),
                    rel_dist: score.rel_dist,
                    confidence: score.confidence,
                    source_tag: SourceTag::Los,
                })
            })
            .collect::<Result<_, ScoreError>>()?,
    };
    edges.sort_by_key(|e| (index(&e.src), index(&e.dst)));
    Ok(PrimitiveGraph::new(nodes, edges)?)
}

/// Vocabulary over every node label in `graphs`.
pub fn vocabulary_for<'a>(graphs: impl IntoIterator<Item = &'a PrimitiveGraph>) -> Vocabulary {
    let labels: BTreeSet<&str> = graphs
        .into_iter()
        .flat_map(|g| g.nodes.iter().map(|n| n.top_label.as_str()))
        .collect();
    Vocabulary::from_labels(labels)
}

pub fn training_batches(samples: &[(PrimitiveGraph, GroundTruthGraph)], vocab: &Vocabulary) -> Vec<GraphBatch> {
    samples
        .iter()
        .map(|(g, gt)| GraphBatch::from_graph(g, vocab, Some(&gt.edge_pairs())))
        .collect()
}

/// Builds a model sized for `vocab` and trains it on `samples`.
pub fn fit(
    samples: &[(PrimitiveGraph, GroundTruthGraph)],
    config: crate::egat::EgatConfig,
    train_cfg: &TrainConfig,
) -> Result<(EgatModel, Vocabulary, TrainReport), PipelineError> {
    let vocab = vocabulary_for(samples.iter().map(|(g, _)| g));
    let mut model = EgatModel::new(config, vocab.dim(), crate::symbol_graph::RelationLabel::COUNT, train_cfg.seed)?;
    let batches = training_batches(samples, &vocab);
    let report = train(&mut model, &batches, train_cfg)?;
    Ok((model, vocab, report))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub probs: EdgeProbs,
    pub tree: SltTree,
    pub repair: RepairReport,
}

pub fn predict_tree(
    model: &EgatModel,
    vocab: &Vocabulary,
    graph: &PrimitiveGraph,
    tau: f64,
) -> Result<Prediction, PipelineError> {
    let probs = predict_links(model, graph, vocab)?;
    let kept = threshold_edges(&probs, graph, tau);
    let (tree, repair) = repair_to_tree(&kept, graph, &probs)?;
    Ok(Prediction { probs, tree, repair })
}

/// Scores one prediction against its ground truth.
pub fn eval_row(
    id: &str,
    graph: &PrimitiveGraph,
    prediction: &Prediction,
    gt: &GroundTruthGraph,
    tau: f64,
) -> Result<EvalRow, PipelineError> {
    let gt_pairs = gt.edge_pairs();
    let labels: BTreeMap<(String, String), bool> = graph
        .edges
        .iter()
        .map(|e| {
            let k = (e.src.clone(), e.dst.clone());
            let v = gt_pairs.contains(&k);
            (k, v)
        })
        .collect();
    let (link_correct, link_total) = link_counts(&prediction.probs, &labels, tau)?;
    Ok(EvalRow {
        id: id.to_string(),
        symbols: graph.nodes.len(),
        gt_edges: gt_pairs.len(),
        candidate_edges: graph.edges.len(),
        covered_edges: labels.values().filter(|v| **v).count(),
        link_correct,
        link_total,
        structure_ok: structure_ok(&prediction.tree, gt),
        expression_ok: expression_ok(&prediction.tree, gt),
    })
}

/// Predicts and scores every `(id, graph, gt)` item.
pub fn evaluate(
    variant: &str,
    model: &EgatModel,
    vocab: &Vocabulary,
    items: &[(String, PrimitiveGraph, GroundTruthGraph)],
    tau: f64,
    config: serde_json::Value,
) -> Result<EvalReport, PipelineError> {
    let rows = items
        .iter()
        .map(|(id, g, gt)| eval_row(id, g, &predict_tree(model, vocab, g, tau)?, gt, tau))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(report(variant, rows, config)?)
}

/// Ground truth attached to an expression, or an error naming it.
pub fn ground_truth(expr: &InkExpression) -> Result<&GroundTruthGraph, PipelineError> {
    expr.ground_truth.as_ref().ok_or_else(|| PipelineError::MissingGroundTruth(expr.id.clone()))
}
