//! Deterministic synthetic handwritten expressions with exact layout trees.
//!
//! Expressions are sampled as random layout trees, typeset with fixed
//! spacing rules and drawn with schematic polyline glyphs. Each expression
//! depends only on `(seed, index)`.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::BBox;
use crate::ink_io::{GroundTruthGraph, InkExpression, LgRelation, LgSymbol, Point, Stroke, SymbolAnnotation};
use crate::symbol_graph::RelationLabel;

/// Glyph height of top-level symbols, in ink units.
pub const BASE_HEIGHT: f64 = 40.0;
pub const SCRIPT_SCALE: f64 = 0.6;
/// Script rows sit this fraction of the parent height above or below it.
pub const SCRIPT_RAISE: f64 = 0.5;
pub const RIGHT_GAP: f64 = 0.2;
pub const SYMBOL_ASPECT: f64 = 0.6;
const SCRIPT_GAP: f64 = 0.08;
const FRACTION_SCALE: f64 = 0.8;
const FRACTION_GAP: f64 = 0.15;
const FRACTION_OVERHANG: f64 = 0.1;
/// Half the vertical rise of a slanted fraction bar.
const BAR_SLANT: f64 = 0.03;
const RADICAND_SCALE: f64 = 0.9;
const SQRT_HOOK: f64 = 0.4;
const SQRT_PAD: f64 = 0.15;
const POINT_NOISE: f64 = 0.2;

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("no glyph template for symbol class `{0}`")]
    UnknownClass(String),
    #[error("symbol set is empty")]
    EmptySymbolSet,
    #[error("jitter {0} must be finite and non-negative")]
    BadJitter(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub seed: u64,
    pub max_depth: usize,
    pub n_expressions: usize,
    /// Positional noise as a fraction of glyph height.
    pub jitter: f64,
    /// Classes drawn for ordinary symbols; every class needs a template.
    pub symbol_set: Vec<String>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 0,
            max_depth: 4,
            n_expressions: 200,
            jitter: 0.0,
            symbol_set: DEFAULT_SYMBOLS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

pub const DEFAULT_SYMBOLS: [&str; 20] = [
    "0", "1", "2", "3", "4", "5", "6", "7", "8", "9", "a", "b", "c", "n", "x", "y", "z", "+", "=", "\\pi",
];

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.symbol_set.is_empty() {
            return Err(SynthError::EmptySymbolSet);
        }
        if let Some(c) = self.symbol_set.iter().find(|c| glyph_template(c).is_none()) {
            return Err(SynthError::UnknownClass(c.clone()));
        }
        if !(self.jitter.is_finite() && self.jitter >= 0.0) {
            return Err(SynthError::BadJitter(self.jitter));
        }
        Ok(())
    }
}

type Template = &'static [&'static [(f64, f64)]];

/// Unit-box polylines (y grows downward), one slice per stroke. Templates are
/// stretched so their bounding box fills the symbol box.
pub fn glyph_template(class: &str) -> Option<Template> {
    Some(match class {
        "0" => &[&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.0, 0.0)]],
        "1" => &[&[(0.0, 0.25), (0.6, 0.0), (0.6, 1.0)], &[(0.0, 1.0), (1.0, 1.0)]],
        "2" => &[&[(0.0, 0.0), (1.0, 0.0), (1.0, 0.5), (0.0, 0.5), (0.0, 1.0), (1.0, 1.0)]],
        "3" => &[&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)], &[(0.2, 0.5), (1.0, 0.5)]],
        "4" => &[&[(0.0, 0.0), (0.0, 0.5), (1.0, 0.5)], &[(0.7, 0.0), (0.7, 1.0)]],
        "5" => &[&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.5), (1.0, 0.5), (1.0, 1.0), (0.0, 1.0)]],
        "6" => &[&[(1.0, 0.0), (0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.5), (0.0, 0.5)]],
        "7" => &[&[(0.0, 0.0), (1.0, 0.0), (0.4, 1.0)]],
        "8" => &[&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.0, 0.0)], &[(0.0, 0.5), (1.0, 0.5)]],
        "9" => &[&[(1.0, 0.5), (0.0, 0.5), (0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]],
        "a" => &[&[(0.9, 0.3), (0.2, 0.3), (0.0, 0.65), (0.3, 1.0), (1.0, 0.8)], &[(1.0, 0.0), (1.0, 1.0)]],
        "b" => &[&[(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.5), (0.0, 0.5)]],
        "c" => &[&[(1.0, 0.0), (0.0, 0.0), (0.0, 1.0), (1.0, 1.0)]],
        "n" => &[&[(0.0, 1.0), (0.0, 0.0), (1.0, 0.0), (1.0, 1.0)]],
        "x" => &[&[(0.0, 0.0), (1.0, 1.0)], &[(1.0, 0.0), (0.0, 1.0)]],
        "y" => &[&[(0.0, 0.0), (0.5, 0.5)], &[(1.0, 0.0), (0.0, 1.0)]],
        "z" => &[&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]],
        "k" => &[&[(0.0, 0.0), (0.0, 1.0)], &[(1.0, 0.0), (0.0, 0.5), (1.0, 1.0)]],
        "+" => &[&[(0.5, 0.0), (0.5, 1.0)], &[(0.0, 0.5), (1.0, 0.5)]],
        "-" => &[&[(0.0, 0.5), (1.0, 0.5)]],
        "=" => &[&[(0.0, 0.3), (1.0, 0.3)], &[(0.0, 0.7), (1.0, 0.7)]],
        "\\alpha" => &[&[(1.0, 0.1), (0.3, 1.0), (0.0, 0.5), (0.3, 0.0), (1.0, 1.0)]],
        "\\pi" => &[&[(0.0, 0.0), (1.0, 0.0)], &[(0.3, 0.0), (0.3, 1.0)], &[(0.7, 0.0), (0.7, 1.0)]],
        _ => return None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Plain,
    Fraction,
    Sqrt,
}

#[derive(Debug, Clone)]
struct TNode {
    label: String,
    kind: Kind,
    children: Vec<(RelationLabel, usize)>,
}

struct TreeBuilder<'a> {
    rng: &'a mut ChaCha8Rng,
    symbols: &'a [String],
    nodes: Vec<TNode>,
}

impl TreeBuilder<'_> {
    fn push(&mut self, label: String, kind: Kind) -> usize {
        self.nodes.push(TNode { label, kind, children: Vec::new() });
        self.nodes.len() - 1
    }

    /// A row head with `budget` levels of layout-tree height left. `bar_side`
    /// names the script slot facing a fraction bar directly above or below
    /// the row; such heads skip that script and are never fractions, which
    /// keeps them in line of sight of the bar.
    fn node(&mut self, budget: usize, structures: bool, bar_side: Option<RelationLabel>) -> usize {
        let roll: f64 = if budget > 0 { self.rng.gen() } else { 1.0 };
        let kind = if structures && bar_side.is_none() && roll < 0.12 {
            Kind::Fraction
        } else if structures && roll < 0.22 {
            Kind::Sqrt
        } else {
            Kind::Plain
        };
        let label = match kind {
            Kind::Fraction => "-".to_string(),
            Kind::Sqrt => "\\sqrt".to_string(),
            Kind::Plain => self.symbols[self.rng.gen_range(0..self.symbols.len())].clone(),
        };
        let id = self.push(label, kind);
        if budget == 0 {
            return id;
        }
        let sub = budget - 1;
        match kind {
            Kind::Fraction => {
                let num = self.node(sub, true, Some(RelationLabel::Sub));
                let den = self.node(sub, true, Some(RelationLabel::Sup));
                self.nodes[id].children.push((RelationLabel::Above, num));
                self.nodes[id].children.push((RelationLabel::Below, den));
            }
            Kind::Sqrt => {
                let rad = self.node(sub, true, None);
                self.nodes[id].children.push((RelationLabel::Inside, rad));
            }
            Kind::Plain => {
                for (rel, p) in [(RelationLabel::Sup, 0.25), (RelationLabel::Sub, 0.15)] {
                    if self.rng.gen_bool(p) && bar_side != Some(rel) {
                        let s = self.node(sub, false, None);
                        self.nodes[id].children.push((rel, s));
                    }
                }
            }
        }
        if self.rng.gen_bool(0.6) {
            let r = self.node(sub, structures, None);
            self.nodes[id].children.push((RelationLabel::Right, r));
        }
        id
    }
}

/// Placed glyph boxes for a row, relative to the row head's left edge and
/// the row's center line.
#[derive(Debug, Clone, Default)]
struct Block {
    boxes: Vec<(usize, BBox, f64)>,
    min_x: f64,
    max_x: f64,
    min_y: f64,
    max_y: f64,
}

impl Block {
    fn single(node: usize, b: BBox, h: f64) -> Block {
        Block { boxes: vec![(node, b, h)], min_x: b.min_x, max_x: b.max_x, min_y: b.min_y, max_y: b.max_y }
    }

    fn absorb(&mut self, other: Block, dx: f64, dy: f64) {
        for (n, b, h) in other.boxes {
            self.boxes.push((
                n,
                BBox { min_x: b.min_x + dx, min_y: b.min_y + dy, max_x: b.max_x + dx, max_y: b.max_y + dy },
                h,
            ));
        }
        self.min_x = self.min_x.min(other.min_x + dx);
        self.max_x = self.max_x.max(other.max_x + dx);
        self.min_y = self.min_y.min(other.min_y + dy);
        self.max_y = self.max_y.max(other.max_y + dy);
    }

    fn width(&self) -> f64 {
        self.max_x - self.min_x
    }
}

fn child(node: &TNode, rel: RelationLabel) -> Option<usize> {
    node.children.iter().find(|(r, _)| *r == rel).map(|(_, c)| *c)
}

fn layout(tree: &[TNode], id: usize, h: f64) -> Block {
    let node = &tree[id];
    let mut block = match node.kind {
        Kind::Plain => {
            let w = SYMBOL_ASPECT * h;
            let mut b = Block::single(id, BBox { min_x: 0.0, min_y: -h / 2.0, max_x: w, max_y: h / 2.0 }, h);
            for (rel, dy) in [(RelationLabel::Sup, -SCRIPT_RAISE * h), (RelationLabel::Sub, SCRIPT_RAISE * h)] {
                if let Some(c) = child(node, rel) {
                    let s = layout(tree, c, SCRIPT_SCALE * h);
                    b.absorb(s, w + SCRIPT_GAP * h, dy);
                }
            }
            b
        }
        Kind::Fraction => {
            let num = layout(tree, child(node, RelationLabel::Above).expect("numerator"), FRACTION_SCALE * h);
            let den = layout(tree, child(node, RelationLabel::Below).expect("denominator"), FRACTION_SCALE * h);
            let bar_w = num.width().max(den.width()) + 2.0 * FRACTION_OVERHANG * h;
            let slant = BAR_SLANT * h;
            let mut b = Block::single(id, BBox { min_x: 0.0, min_y: -slant, max_x: bar_w, max_y: slant }, h);
            let gap = FRACTION_GAP * h;
            let (nx, dx) = ((bar_w - num.width()) / 2.0 - num.min_x, (bar_w - den.width()) / 2.0 - den.min_x);
            let (ny, dy) = (-gap - num.max_y, gap - den.min_y);
            b.absorb(num, nx, ny);
            b.absorb(den, dx, dy);
            b
        }
        Kind::Sqrt => {
            let rad = layout(tree, child(node, RelationLabel::Inside).expect("radicand"), RADICAND_SCALE * h);
            let half = rad.min_y.abs().max(rad.max_y.abs()) + SQRT_PAD * h;
            let left = SQRT_HOOK * h + SQRT_PAD * h;
            let width = left + rad.width() + SQRT_PAD * h;
            let mut b = Block::single(id, BBox { min_x: 0.0, min_y: -half, max_x: width, max_y: half }, h);
            let rx = left - rad.min_x;
            b.absorb(rad, rx, 0.0);
            b
        }
    };
    if let Some(r) = child(node, RelationLabel::Right) {
        let right = layout(tree, r, h);
        let x = block.max_x + RIGHT_GAP * h - right.min_x;
        block.absorb(right, x, 0.0);
    }
    block
}

fn writing_order(tree: &[TNode], id: usize, out: &mut Vec<usize>) {
    out.push(id);
    for rel in [
        RelationLabel::Inside,
        RelationLabel::Above,
        RelationLabel::Below,
        RelationLabel::Sup,
        RelationLabel::Sub,
        RelationLabel::Right,
    ] {
        if let Some(c) = child(&tree[id], rel) {
            writing_order(tree, c, out);
        }
    }
}

fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

fn densify(poly: &[Point], pieces: usize) -> Vec<Point> {
    let mut out = vec![poly[0]];
    for w in poly.windows(2) {
        for k in 1..=pieces {
            let t = k as f64 / pieces as f64;
            out.push(Point::new(w[0].x + t * (w[1].x - w[0].x), w[0].y + t * (w[1].y - w[0].y)));
        }
    }
    out
}

fn glyph_strokes(kind: Kind, label: &str, b: &BBox, h: f64) -> Vec<Vec<Point>> {
    if kind == Kind::Fraction {
        return vec![vec![Point::new(b.min_x, b.max_y), Point::new(b.max_x, b.min_y)]];
    }
    if kind == Kind::Sqrt {
        let hook = SQRT_HOOK * h;
        let (x0, x1, y0, y1) = (b.min_x, b.max_x, b.min_y, b.max_y);
        let hh = y1 - y0;
        return vec![vec![
            Point::new(x0, y0 + 0.6 * hh),
            Point::new(x0 + 0.35 * hook, y0 + 0.5 * hh),
            Point::new(x0 + 0.65 * hook, y1),
            Point::new(x0 + hook, y0),
            Point::new(x1, y0),
        ]];
    }
    let template = glyph_template(label).expect("validated class");
    let pts = template.iter().flat_map(|s| s.iter());
    let (mut lo_x, mut hi_x, mut lo_y, mut hi_y) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        lo_x = lo_x.min(x);
        hi_x = hi_x.max(x);
        lo_y = lo_y.min(y);
        hi_y = hi_y.max(y);
    }
    let map = |v: f64, lo: f64, hi: f64, out_lo: f64, out_hi: f64| {
        if hi > lo {
            out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo)
        } else {
            0.5 * (out_lo + out_hi)
        }
    };
    template
        .iter()
        .map(|s| {
            s.iter()
                .map(|&(x, y)| Point::new(map(x, lo_x, hi_x, b.min_x, b.max_x), map(y, lo_y, hi_y, b.min_y, b.max_y)))
                .collect()
        })
        .collect()
}

pub fn expression_id(seed: u64, index: usize) -> String {
    format!("synth_{seed}_{index:05}")
}

/// One expression and its layout tree; depends only on `(cfg.seed, index)`
/// and the layout settings.
pub fn generate_expression(cfg: &SynthConfig, index: usize) -> Result<(InkExpression, GroundTruthGraph), SynthError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let mut builder = TreeBuilder { rng: &mut rng, symbols: &cfg.symbol_set, nodes: Vec::new() };
    let root = builder.node(cfg.max_depth, true, None);
    let tree = builder.nodes;

    let block = layout(&tree, root, BASE_HEIGHT);
    let boxes: BTreeMap<usize, (BBox, f64)> = block.boxes.iter().map(|&(n, b, h)| (n, (b, h))).collect();
    let (ox, oy) = (10.0 - block.min_x, 10.0 - block.min_y);

    let mut order = Vec::new();
    writing_order(&tree, root, &mut order);
    let sym_id = |k: usize| format!("s{k:03}");
    let position: BTreeMap<usize, usize> = order.iter().enumerate().map(|(k, &n)| (n, k)).collect();

    let mut strokes = Vec::new();
    let mut annotations = Vec::new();
    let mut symbols = Vec::new();
    for (k, &n) in order.iter().enumerate() {
        let (b, h) = boxes[&n];
        let (jx, jy) = if cfg.jitter > 0.0 {
            (rng.gen_range(-cfg.jitter..=cfg.jitter) * h, rng.gen_range(-cfg.jitter..=cfg.jitter) * h)
        } else {
            (0.0, 0.0)
        };
        let placed = BBox { min_x: b.min_x + ox + jx, min_y: b.min_y + oy + jy, max_x: b.max_x + ox + jx, max_y: b.max_y + oy + jy };
        let mut ids = Vec::new();
        for poly in glyph_strokes(tree[n].kind, &tree[n].label, &placed, h) {
            let noise = cfg.jitter * POINT_NOISE * h;
            let points = densify(&poly, 3)
                .into_iter()
                .map(|p| {
                    let (nx, ny) = if noise > 0.0 {
                        (rng.gen_range(-noise..=noise), rng.gen_range(-noise..=noise))
                    } else {
                        (0.0, 0.0)
                    };
                    Point::new(round2(p.x + nx), round2(p.y + ny))
                })
                .collect();
            let sid = strokes.len() as u32;
            strokes.push(Stroke { id: sid, points });
            ids.push(sid);
        }
        annotations.push(SymbolAnnotation { symbol_id: sym_id(k), label: tree[n].label.clone(), stroke_ids: ids.iter().copied().collect() });
        symbols.push(LgSymbol { id: sym_id(k), label: tree[n].label.clone(), stroke_ids: ids });
    }
    let mut relations = Vec::new();
    for &n in &order {
        for &(rel, c) in &tree[n].children {
            relations.push(LgRelation { parent: sym_id(position[&n]), child: sym_id(position[&c]), relation: rel });
        }
    }
    relations.sort();
    let gt = GroundTruthGraph { symbols, relations };
    let expr = InkExpression {
        id: expression_id(cfg.seed, index),
        strokes,
        annotations: Some(annotations),
        ground_truth: Some(gt.clone()),
    };
    Ok((expr, gt))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub symbols: usize,
    pub relations: usize,
    /// Height of the layout tree.
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: SynthConfig,
    pub entries: Vec<ManifestEntry>,
    pub depth_histogram: BTreeMap<usize, usize>,
}

/// Layout-tree height of a ground-truth graph.
pub fn gt_depth(gt: &GroundTruthGraph) -> usize {
    let mut kids: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for r in &gt.relations {
        kids.entry(r.parent.as_str()).or_default().push(r.child.as_str());
    }
    fn h<'a>(k: &BTreeMap<&'a str, Vec<&'a str>>, n: &'a str) -> usize {
        k.get(n).map_or(0, |cs| cs.iter().map(|c| 1 + h(k, c)).max().unwrap_or(0))
    }
    let children: std::collections::BTreeSet<&str> = gt.relations.iter().map(|r| r.child.as_str()).collect();
    gt.symbols
        .iter()
        .filter(|s| !children.contains(s.id.as_str()))
        .map(|s| h(&kids, &s.id))
        .max()
        .unwrap_or(0)
}

pub fn manifest_entry(gt: &GroundTruthGraph, id: &str) -> ManifestEntry {
    ManifestEntry { id: id.to_string(), symbols: gt.symbols.len(), relations: gt.relations.len(), depth: gt_depth(gt) }
}

pub fn generate_dataset(cfg: &SynthConfig) -> Result<(Vec<(InkExpression, GroundTruthGraph)>, Manifest), SynthError> {
    let pairs = (0..cfg.n_expressions)
        .map(|i| generate_expression(cfg, i))
        .collect::<Result<Vec<_>, _>>()?;
    let entries: Vec<ManifestEntry> = pairs.iter().map(|(e, g)| manifest_entry(g, &e.id)).collect();
    let mut depth_histogram = BTreeMap::new();
    for e in &entries {
        *depth_histogram.entry(e.depth).or_insert(0) += 1;
    }
    Ok((pairs, Manifest { config: cfg.clone(), entries, depth_histogram }))
}
