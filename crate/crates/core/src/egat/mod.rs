//! Edge-featured graph attention network for link prediction.
//!
//! Each layer updates edge features from the concatenated endpoint and edge
//! features, derives per-head attention logits from them with a learned
//! linear functional, normalizes the logits over each node's incoming edges
//! and aggregates projected neighbour features. A two-layer perceptron then
//! scores every edge as keep or remove.

pub mod matrix;
pub mod tape;
mod train;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use matrix::Matrix;
pub use tape::{bce_mean, sigmoid, Tape, Var, PROB_CLAMP};
pub use train::{train, Adam, TrainConfig, TrainReport};

use crate::symbol_graph::{PrimitiveGraph, RelationLabel};

pub const CHECKPOINT_FORMAT: &str = "hme-egat";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum EgatError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("{probs} probabilities but {labels} labels")]
    LengthMismatch { probs: usize, labels: usize },
    #[error("training set is empty")]
    EmptyDataset,
    #[error("non-finite loss at epoch {epoch}, step {step}")]
    NonFiniteLoss { epoch: usize, step: usize },
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("bad checkpoint: {0}")]
    BadCheckpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn shape_err(what: impl Into<String>) -> EgatError {
    EgatError::ShapeMismatch(what.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum HeadMode {
    /// Head input is `[h_i ‖ f'_ij ‖ h_j]`.
    #[default]
    NodeEdgeFeature,
    /// Head input is `f'_ij` alone.
    EdgeFeature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EgatConfig {
    pub layers: usize,
    pub node_hidden: usize,
    pub edge_hidden: usize,
    pub heads: usize,
    pub mlp_hidden: usize,
    pub dropout: f64,
    pub leaky_slope: f64,
    pub head_mode: HeadMode,
}

impl Default for EgatConfig {
    fn default() -> Self {
        EgatConfig {
            layers: 4,
            node_hidden: 32,
            edge_hidden: 32,
            heads: 2,
            mlp_hidden: 64,
            dropout: 0.2,
            leaky_slope: 0.2,
            head_mode: HeadMode::NodeEdgeFeature,
        }
    }
}

impl EgatConfig {
    pub fn validate(&self) -> Result<(), EgatError> {
        if self.layers == 0 || self.heads == 0 || self.mlp_hidden == 0 {
            return Err(shape_err("layers, heads and mlp_hidden must be positive"));
        }
        if self.node_hidden % self.heads != 0 || self.edge_hidden % self.heads != 0 || self.node_hidden == 0 {
            return Err(shape_err(format!(
                "heads {} must divide node_hidden {} and edge_hidden {}",
                self.heads, self.node_hidden, self.edge_hidden
            )));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(shape_err(format!("dropout {} outside [0, 1)", self.dropout)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EgatLayerParams {
    /// `(d_edge_out, 2 d_node_in + d_edge_in)`
    pub a: Matrix,
    /// `(d_node_out, d_node_in)`
    pub w_node: Matrix,
    /// `(1, d_edge_out)`
    pub a_att: Matrix,
    pub heads: usize,
}

impl EgatLayerParams {
    pub fn node_in(&self) -> usize {
        self.w_node.cols()
    }

    pub fn node_out(&self) -> usize {
        self.w_node.rows()
    }

    pub fn edge_out(&self) -> usize {
        self.a.rows()
    }

    pub fn edge_in(&self) -> usize {
        self.a.cols() - 2 * self.node_in()
    }

    pub fn validate(&self) -> Result<(), EgatError> {
        let ok = self.heads > 0
            && self.a.cols() > 2 * self.node_in()
            && self.a_att.shape() == (1, self.edge_out())
            && self.edge_out() % self.heads == 0
            && self.node_out() % self.heads == 0;
        if ok {
            Ok(())
        } else {
            Err(shape_err(format!(
                "layer A {:?}, W {:?}, a_att {:?}, heads {}",
                self.a.shape(),
                self.w_node.shape(),
                self.a_att.shape(),
                self.heads
            )))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeadMlp {
    pub w1: Matrix,
    pub b1: Matrix,
    pub w2: Matrix,
    pub b2: Matrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EgatModel {
    pub config: EgatConfig,
    pub node_dim: usize,
    pub edge_dim: usize,
    pub layers: Vec<EgatLayerParams>,
    pub head: HeadMlp,
}

fn xavier(rows: usize, cols: usize, fan_in: usize, fan_out: usize, rng: &mut impl Rng) -> Matrix {
    let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
    let data = (0..rows * cols).map(|_| rng.gen_range(-bound..=bound)).collect();
    Matrix::from_vec(rows, cols, data).expect("sized")
}

impl EgatModel {
    /// Xavier-uniform initialization from `seed`; biases start at zero.
    pub fn new(config: EgatConfig, node_dim: usize, edge_dim: usize, seed: u64) -> Result<EgatModel, EgatError> {
        config.validate()?;
        if node_dim == 0 || edge_dim == 0 {
            return Err(shape_err("input feature widths must be positive"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut layers = Vec::with_capacity(config.layers);
        let (mut dn, mut de) = (node_dim, edge_dim);
        for _ in 0..config.layers {
            let a_in = 2 * dn + de;
            let per_head = config.edge_hidden / config.heads;
            layers.push(EgatLayerParams {
                a: xavier(config.edge_hidden, a_in, a_in, config.edge_hidden, &mut rng),
                w_node: xavier(config.node_hidden, dn, dn, config.node_hidden, &mut rng),
                a_att: xavier(1, config.edge_hidden, per_head, 1, &mut rng),
                heads: config.heads,
            });
            dn = config.node_hidden;
            de = config.edge_hidden;
        }
        let head_in = match config.head_mode {
            HeadMode::NodeEdgeFeature => 2 * dn + de,
            HeadMode::EdgeFeature => de,
        };
        let head = HeadMlp {
            w1: xavier(config.mlp_hidden, head_in, head_in, config.mlp_hidden, &mut rng),
            b1: Matrix::zeros(1, config.mlp_hidden),
            w2: xavier(1, config.mlp_hidden, config.mlp_hidden, 1, &mut rng),
            b2: Matrix::zeros(1, 1),
        };
        Ok(EgatModel { config, node_dim, edge_dim, layers, head })
    }

    pub fn head_input_width(&self) -> usize {
        self.head.w1.cols()
    }

    /// Parameters in canonical order: per layer `A, W_node, a_att`, then the
    /// head's `w1, b1, w2, b2`.
    pub fn params(&self) -> Vec<&Matrix> {
        let mut out = Vec::new();
        for l in &self.layers {
            out.extend([&l.a, &l.w_node, &l.a_att]);
        }
        out.extend([&self.head.w1, &self.head.b1, &self.head.w2, &self.head.b2]);
        out
    }

    pub fn params_mut(&mut self) -> Vec<&mut Matrix> {
        let mut out = Vec::new();
        for l in &mut self.layers {
            out.extend([&mut l.a, &mut l.w_node, &mut l.a_att]);
        }
        out.extend([&mut self.head.w1, &mut self.head.b1, &mut self.head.w2, &mut self.head.b2]);
        out
    }

    pub fn param_count(&self) -> usize {
        self.params().iter().map(|m| m.data().len()).sum()
    }

    pub fn validate(&self) -> Result<(), EgatError> {
        self.config.validate()?;
        let (mut dn, mut de) = (self.node_dim, self.edge_dim);
        for l in &self.layers {
            l.validate()?;
            if l.node_in() != dn || l.edge_in() != de {
                return Err(shape_err("layer input widths do not chain"));
            }
            dn = l.node_out();
            de = l.edge_out();
        }
        let head_in = match self.config.head_mode {
            HeadMode::NodeEdgeFeature => 2 * dn + de,
            HeadMode::EdgeFeature => de,
        };
        let h = &self.head;
        let hid = h.w1.rows();
        if h.w1.cols() != head_in || h.b1.shape() != (1, hid) || h.w2.shape() != (1, hid) || h.b2.shape() != (1, 1) {
            return Err(shape_err("head MLP shapes"));
        }
        if self.params().iter().any(|m| !m.is_finite()) {
            return Err(shape_err("non-finite parameter"));
        }
        Ok(())
    }
}

/// Symbol classes seen in training; unknown classes share the final slot.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Vocabulary {
    pub classes: Vec<String>,
}

impl Vocabulary {
    pub fn from_labels<'a>(labels: impl IntoIterator<Item = &'a str>) -> Vocabulary {
        let set: BTreeSet<&str> = labels.into_iter().collect();
        Vocabulary { classes: set.into_iter().map(str::to_string).collect() }
    }

    pub fn unk(&self) -> usize {
        self.classes.len()
    }

    pub fn index(&self, label: &str) -> usize {
        self.classes
            .binary_search_by(|c| c.as_str().cmp(label))
            .unwrap_or(self.unk())
    }

    /// One-hot width, including the unknown slot.
    pub fn dim(&self) -> usize {
        self.classes.len() + 1
    }
}

/// One graph (or a disjoint union of graphs) in network input form.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphBatch {
    pub node_feats: Matrix,
    pub edge_feats: Matrix,
    pub edge_index: Vec<(usize, usize)>,
    pub labels: Vec<f64>,
}

impl GraphBatch {
    /// Builds the batch for `graph`; edges keep the graph's order. Edges in
    /// `gt` are labelled 1.
    pub fn from_graph(graph: &PrimitiveGraph, vocab: &Vocabulary, gt: Option<&BTreeSet<(String, String)>>) -> GraphBatch {
        let n = graph.nodes.len();
        let mut node_feats = Matrix::zeros(n, vocab.dim());
        for (i, node) in graph.nodes.iter().enumerate() {
            node_feats.set(i, vocab.index(&node.top_label), 1.0);
        }
        let index: BTreeMap<&str, usize> =
            graph.nodes.iter().enumerate().map(|(i, n)| (n.symbol_id.as_str(), i)).collect();
        let m = graph.edges.len();
        let mut edge_feats = Matrix::zeros(m, RelationLabel::COUNT);
        let mut edge_index = Vec::with_capacity(m);
        let mut labels = Vec::with_capacity(m);
        for (k, e) in graph.edges.iter().enumerate() {
            edge_feats.set(k, e.rel_dist.argmax().index(), e.confidence);
            edge_index.push((index[e.src.as_str()], index[e.dst.as_str()]));
            let key = (e.src.clone(), e.dst.clone());
            labels.push(if gt.is_some_and(|g| g.contains(&key)) { 1.0 } else { 0.0 });
        }
        GraphBatch { node_feats, edge_feats, edge_index, labels }
    }

    pub fn n_nodes(&self) -> usize {
        self.node_feats.rows()
    }

    pub fn n_edges(&self) -> usize {
        self.edge_index.len()
    }

    pub fn validate(&self) -> Result<(), EgatError> {
        let (n, m) = (self.n_nodes(), self.n_edges());
        if self.edge_feats.rows() != m || self.labels.len() != m {
            return Err(shape_err(format!(
                "{m} edges, {} edge feature rows, {} labels",
                self.edge_feats.rows(),
                self.labels.len()
            )));
        }
        if self.edge_index.iter().any(|&(s, d)| s >= n || d >= n) {
            return Err(shape_err("edge endpoint out of range"));
        }
        if !self.node_feats.is_finite() || !self.edge_feats.is_finite() {
            return Err(shape_err("non-finite features"));
        }
        Ok(())
    }

    /// Disjoint union with node indices offset per part.
    pub fn union(parts: &[&GraphBatch]) -> Result<GraphBatch, EgatError> {
        let first = parts.first().ok_or(EgatError::EmptyDataset)?;
        let (dn, de) = (first.node_feats.cols(), first.edge_feats.cols());
        let mut nodes = Vec::new();
        let mut edges = Vec::new();
        let mut edge_index = Vec::new();
        let mut labels = Vec::new();
        let mut offset = 0;
        for p in parts {
            if p.node_feats.cols() != dn || p.edge_feats.cols() != de {
                return Err(shape_err("batches with different feature widths"));
            }
            nodes.extend_from_slice(p.node_feats.data());
            edges.extend_from_slice(p.edge_feats.data());
            edge_index.extend(p.edge_index.iter().map(|&(s, d)| (s + offset, d + offset)));
            labels.extend_from_slice(&p.labels);
            offset += p.n_nodes();
        }
        Ok(GraphBatch {
            node_feats: Matrix::from_vec(offset, dn, nodes).expect("sized"),
            edge_feats: Matrix::from_vec(edge_index.len(), de, edges).expect("sized"),
            edge_index,
            labels,
        })
    }
}

#[derive(Debug, Clone, Copy)]
struct LayerVars {
    a: Var,
    w_node: Var,
    a_att: Var,
    heads: usize,
}

#[derive(Debug, Clone, Copy)]
struct LayerOut {
    nodes: Var,
    edges: Var,
    attn: Var,
}

fn layer_on_tape(
    t: &mut Tape,
    p: LayerVars,
    h: Var,
    f: Var,
    src: &[usize],
    dst: &[usize],
    slope: f64,
) -> LayerOut {
    let n = t.value(h).rows();
    let hs = t.gather(h, src);
    let hd = t.gather(h, dst);
    let x = t.concat_cols(&[hs, f, hd]);
    let pre = t.matmul_t(x, p.a);
    let f_new = t.leaky_relu(pre, slope);
    let e = t.head_dot(f_new, p.a_att, p.heads);
    let alpha = t.segment_softmax(e, dst);

    let wh = t.matmul_t(h, p.w_node);
    let msg = t.gather(wh, src);
    let weighted = t.head_scale(msg, alpha);
    let agg = t.scatter_add(weighted, dst, n);
    let mut isolated = Matrix::filled(n, t.value(wh).cols(), 1.0);
    for &d in dst {
        isolated.row_mut(d).fill(0.0);
    }
    let own = t.mul_const(wh, isolated);
    let sum = t.add(agg, own);
    let h_new = t.leaky_relu(sum, slope);
    LayerOut { nodes: h_new, edges: f_new, attn: alpha }
}

fn check_layer_inputs(
    p: &EgatLayerParams,
    node_feats: &Matrix,
    edge_feats: &Matrix,
    edge_index: &[(usize, usize)],
) -> Result<(), EgatError> {
    p.validate()?;
    if node_feats.cols() != p.node_in() || edge_feats.cols() != p.edge_in() {
        return Err(shape_err(format!(
            "layer expects node width {} and edge width {}, got {} and {}",
            p.node_in(),
            p.edge_in(),
            node_feats.cols(),
            edge_feats.cols()
        )));
    }
    if edge_feats.rows() != edge_index.len() {
        return Err(shape_err("edge feature rows differ from edge count"));
    }
    if edge_index.iter().any(|&(s, d)| s >= node_feats.rows() || d >= node_feats.rows()) {
        return Err(shape_err("edge endpoint out of range"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerOutput {
    pub node_feats: Matrix,
    pub edge_feats: Matrix,
    /// `(m, heads)`; each column sums to one over every node's incoming edges.
    pub attn: Matrix,
}

/// One attention layer applied outside of training.
pub fn egat_layer_forward(
    params: &EgatLayerParams,
    node_feats: &Matrix,
    edge_feats: &Matrix,
    edge_index: &[(usize, usize)],
    leaky_slope: f64,
) -> Result<LayerOutput, EgatError> {
    check_layer_inputs(params, node_feats, edge_feats, edge_index)?;
    let mut t = Tape::new();
    let vars = LayerVars {
        a: t.leaf(params.a.clone()),
        w_node: t.leaf(params.w_node.clone()),
        a_att: t.leaf(params.a_att.clone()),
        heads: params.heads,
    };
    let h = t.leaf(node_feats.clone());
    let f = t.leaf(edge_feats.clone());
    let (src, dst): (Vec<usize>, Vec<usize>) = edge_index.iter().copied().unzip();
    let out = layer_on_tape(&mut t, vars, h, f, &src, &dst, leaky_slope);
    Ok(LayerOutput {
        node_feats: t.value(out.nodes).clone(),
        edge_feats: t.value(out.edges).clone(),
        attn: t.value(out.attn).clone(),
    })
}

/// A recorded forward pass.
pub struct Forward {
    pub tape: Tape,
    /// Parameter leaves in canonical order.
    pub params: Vec<Var>,
    /// `(m, 1)` logits.
    pub logits: Var,
    /// Attention weights per layer.
    pub attn: Vec<Var>,
}

fn dropout_mask(rows: usize, cols: usize, rate: f64, rng: &mut dyn RngCore) -> Matrix {
    let keep = 1.0 / (1.0 - rate);
    let data = (0..rows * cols)
        .map(|_| if rng.gen::<f64>() < rate { 0.0 } else { keep })
        .collect();
    Matrix::from_vec(rows, cols, data).expect("sized")
}

/// Records the full network on a fresh tape. Dropout is applied between
/// layers when `dropout_rng` is given.
pub fn forward_tape(
    model: &EgatModel,
    batch: &GraphBatch,
    mut dropout_rng: Option<&mut dyn RngCore>,
) -> Result<Forward, EgatError> {
    batch.validate()?;
    if batch.node_feats.cols() != model.node_dim || batch.edge_feats.cols() != model.edge_dim {
        return Err(shape_err(format!(
            "model expects node width {} and edge width {}, batch has {} and {}",
            model.node_dim,
            model.edge_dim,
            batch.node_feats.cols(),
            batch.edge_feats.cols()
        )));
    }
    let mut t = Tape::new();
    let params: Vec<Var> = model.params().into_iter().map(|m| t.leaf(m.clone())).collect();
    let (src, dst): (Vec<usize>, Vec<usize>) = batch.edge_index.iter().copied().unzip();
    let slope = model.config.leaky_slope;
    let mut h = t.leaf(batch.node_feats.clone());
    let mut f = t.leaf(batch.edge_feats.clone());
    let mut attn = Vec::new();
    for (li, layer) in model.layers.iter().enumerate() {
        let vars = LayerVars { a: params[3 * li], w_node: params[3 * li + 1], a_att: params[3 * li + 2], heads: layer.heads };
        let out = layer_on_tape(&mut t, vars, h, f, &src, &dst, slope);
        h = out.nodes;
        f = out.edges;
        attn.push(out.attn);
        if li + 1 < model.layers.len() && model.config.dropout > 0.0 {
            if let Some(rng) = dropout_rng.as_deref_mut() {
                let (hr, hc) = t.value(h).shape();
                let mask = dropout_mask(hr, hc, model.config.dropout, rng);
                h = t.mul_const(h, mask);
                let (fr, fc) = t.value(f).shape();
                let mask = dropout_mask(fr, fc, model.config.dropout, rng);
                f = t.mul_const(f, mask);
            }
        }
    }
    let head_in = match model.config.head_mode {
        HeadMode::NodeEdgeFeature => {
            let hs = t.gather(h, &src);
            let hd = t.gather(h, &dst);
            t.concat_cols(&[hs, f, hd])
        }
        HeadMode::EdgeFeature => f,
    };
    let hp = &params[3 * model.layers.len()..];
    let z1 = t.matmul_t(head_in, hp[0]);
    let z1 = t.add_row_bias(z1, hp[1]);
    let a1 = t.leaky_relu(z1, slope);
    let z2 = t.matmul_t(a1, hp[2]);
    let logits = t.add_row_bias(z2, hp[3]);
    Ok(Forward { tape: t, params, logits, attn })
}

/// Keep probability for every edge of the batch.
pub fn model_forward(
    model: &EgatModel,
    batch: &GraphBatch,
    train_mode: bool,
    rng: &mut dyn RngCore,
) -> Result<Vec<f64>, EgatError> {
    let fwd = forward_tape(model, batch, if train_mode { Some(rng) } else { None })?;
    Ok(fwd.tape.value(fwd.logits).data().iter().map(|&z| sigmoid(z)).collect())
}

/// Mean clamped binary cross-entropy.
pub fn bce_loss(probs: &[f64], labels: &[f64]) -> Result<f64, EgatError> {
    if probs.len() != labels.len() {
        return Err(EgatError::LengthMismatch { probs: probs.len(), labels: labels.len() });
    }
    Ok(bce_mean(probs, labels))
}

/// Loss of the batch under the model (dropout when `dropout_rng` is given).
pub fn batch_loss(model: &EgatModel, batch: &GraphBatch, dropout_rng: Option<&mut dyn RngCore>) -> Result<f64, EgatError> {
    let mut fwd = forward_tape(model, batch, dropout_rng)?;
    let loss = fwd.tape.bce_with_logits(fwd.logits, &batch.labels);
    Ok(fwd.tape.value(loss).get(0, 0))
}

/// Loss and its exact gradient for every parameter, in canonical order.
/// Parameters with no path to the loss get all-zero gradients.
pub fn backward(
    model: &EgatModel,
    batch: &GraphBatch,
    dropout_rng: Option<&mut dyn RngCore>,
) -> Result<(f64, Vec<Matrix>), EgatError> {
    let mut fwd = forward_tape(model, batch, dropout_rng)?;
    let loss = fwd.tape.bce_with_logits(fwd.logits, &batch.labels);
    let grads = fwd.tape.backward(loss);
    let out = fwd
        .params
        .iter()
        .map(|&p| {
            grads[p]
                .clone()
                .unwrap_or_else(|| Matrix::zeros(fwd.tape.value(p).rows(), fwd.tape.value(p).cols()))
        })
        .collect();
    Ok((fwd.tape.value(loss).get(0, 0), out))
}

/// Keep probability per candidate edge, keyed by `(src, dst)`.
pub fn predict_links(
    model: &EgatModel,
    graph: &PrimitiveGraph,
    vocab: &Vocabulary,
) -> Result<BTreeMap<(String, String), f64>, EgatError> {
    if graph.nodes.is_empty() {
        return Err(EgatError::EmptyGraph);
    }
    if graph.edges.is_empty() {
        return Ok(BTreeMap::new());
    }
    let batch = GraphBatch::from_graph(graph, vocab, None);
    let fwd = forward_tape(model, &batch, None)?;
    let probs = fwd.tape.value(fwd.logits);
    Ok(graph
        .edges
        .iter()
        .enumerate()
        .map(|(k, e)| ((e.src.clone(), e.dst.clone()), sigmoid(probs.get(k, 0))))
        .collect())
}

/// Everything needed to reload a trained model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub vocab: Vocabulary,
    pub model: EgatModel,
}

impl Checkpoint {
    pub fn new(model: EgatModel, vocab: Vocabulary) -> Checkpoint {
        Checkpoint { format: CHECKPOINT_FORMAT.into(), version: CHECKPOINT_VERSION, vocab, model }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("checkpoint serializes")
    }

    pub fn from_json(text: &str) -> Result<Checkpoint, EgatError> {
        let c: Checkpoint = serde_json::from_str(text).map_err(|e| EgatError::BadCheckpoint(e.to_string()))?;
        if c.format != CHECKPOINT_FORMAT || c.version != CHECKPOINT_VERSION {
            return Err(EgatError::BadCheckpoint(format!("unsupported format {} v{}", c.format, c.version)));
        }
        c.model.validate().map_err(|e| EgatError::BadCheckpoint(e.to_string()))?;
        if c.model.node_dim != c.vocab.dim() {
            return Err(EgatError::BadCheckpoint("vocabulary does not match node width".into()));
        }
        Ok(c)
    }

    pub fn save(&self, path: &Path) -> Result<(), EgatError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Checkpoint, EgatError> {
        Checkpoint::from_json(&std::fs::read_to_string(path)?)
    }
}
