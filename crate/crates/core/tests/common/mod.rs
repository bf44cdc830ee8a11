//! Independent oracles and random generators shared by integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use hme_core::egat::{EgatLayerParams, GraphBatch, Matrix};
use hme_core::ink_io::{GroundTruthGraph, LgRelation, LgSymbol, Point};
use hme_core::symbol_graph::{CandidateEdge, PrimitiveGraph, RelDist, RelationLabel, SourceTag, SymbolNode};
use rand::seq::SliceRandom;
use rand::Rng;

// ---------------------------------------------------------------------------
// Random graphs

pub fn sid(i: usize) -> String {
    format!("n{i}")
}

/// Square node centered at `(cx, cy)`.
pub fn square(id: &str, label: &str, cx: f64, cy: f64, half: f64) -> SymbolNode {
    let pts = [
        Point::new(cx - half, cy - half),
        Point::new(cx + half, cy - half),
        Point::new(cx + half, cy + half),
        Point::new(cx - half, cy + half),
    ];
    SymbolNode::from_points(id, label, BTreeSet::new(), &pts).unwrap()
}

/// Nodes laid out left to right with random labels.
pub fn row_nodes(n: usize, rng: &mut impl Rng) -> Vec<SymbolNode> {
    let labels = ["x", "y", "2", "+", "a"];
    (0..n)
        .map(|i| square(&sid(i), labels[rng.gen_range(0..labels.len())], 10.0 * i as f64, rng.gen_range(-3.0..3.0), 3.0))
        .collect()
}

/// Random rooted tree over `n0..n{n-1}`; every parent precedes its child.
pub fn random_tree(n: usize, rng: &mut impl Rng) -> GroundTruthGraph {
    let symbols = (0..n).map(|i| LgSymbol { id: sid(i), label: "x".into(), stroke_ids: vec![i as u32] }).collect();
    let relations = (1..n)
        .map(|c| LgRelation {
            parent: sid(rng.gen_range(0..c)),
            child: sid(c),
            relation: RelationLabel::ALL[rng.gen_range(0..RelationLabel::COUNT)],
        })
        .collect();
    GroundTruthGraph { symbols, relations }
}

pub fn random_dist(rng: &mut impl Rng) -> RelDist {
    let mut p = [0.0; RelationLabel::COUNT];
    for v in &mut p {
        *v = rng.gen_range(0.01..1.0);
    }
    let s: f64 = p.iter().sum();
    RelDist(p.map(|v| v / s))
}

/// Random directed candidate graph (no self-loops) over `nodes`.
pub fn random_candidates(nodes: Vec<SymbolNode>, density: f64, rng: &mut impl Rng) -> PrimitiveGraph {
    let n = nodes.len();
    let mut edges = Vec::new();
    for s in 0..n {
        for d in 0..n {
            if s != d && rng.gen_bool(density) {
                let rel_dist = random_dist(rng);
                edges.push(CandidateEdge {
                    src: nodes[s].symbol_id.clone(),
                    dst: nodes[d].symbol_id.clone(),
                    confidence: rel_dist.max(),
                    rel_dist,
                    source_tag: SourceTag::Both,
                });
            }
        }
    }
    edges.shuffle(rng);
    PrimitiveGraph::new(nodes, edges).unwrap()
}

/// Exact percentage `100 * num / den` as the correctly rounded double.
pub fn exact_percent(num: i64, den: i64) -> f64 {
    (100 * num) as f64 / den as f64
}

// ---------------------------------------------------------------------------
// Line of sight by ray casting

fn ray_segment(o: &Point, d: (f64, f64), a: &Point, b: &Point) -> Option<f64> {
    // solve o + t d = a + u (b - a)
    let e = (b.x - a.x, b.y - a.y);
    let den = d.0 * e.1 - d.1 * e.0;
    if den.abs() < 1e-15 {
        return None;
    }
    let w = (a.x - o.x, a.y - o.y);
    let t = (w.0 * e.1 - w.1 * e.0) / den;
    let u = (w.0 * d.1 - w.1 * d.0) / den;
    (t >= 0.0 && (-1e-12..=1.0 + 1e-12).contains(&u)).then_some(t)
}

fn first_hit(o: &Point, d: (f64, f64), poly: &[Point]) -> Option<f64> {
    (0..poly.len())
        .filter_map(|i| ray_segment(o, d, &poly[i], &poly[(i + 1) % poly.len()]))
        .min_by(f64::total_cmp)
}

fn inside_convex(poly: &[Point], p: &Point) -> bool {
    if poly.len() < 3 {
        return false;
    }
    let sign = |a: &Point, b: &Point| (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    let s: Vec<f64> = (0..poly.len()).map(|i| sign(&poly[i], &poly[(i + 1) % poly.len()])).collect();
    s.iter().all(|v| *v >= 0.0) || s.iter().all(|v| *v <= 0.0)
}

fn box_contains(outer: &SymbolNode, inner: &SymbolNode) -> bool {
    let (o, i) = (&outer.bbox, &inner.bbox);
    i.min_x >= o.min_x && i.max_x <= o.max_x && i.min_y >= o.min_y && i.max_y <= o.max_y
}

/// Whether some of `rays` evenly spread rays across `b`'s angular extent, as
/// seen from the center of `a`'s box, reaches `b` first. Occluders follow the
/// same conventions as the library: symbols whose box holds the eye or whose
/// box nests inside `a`'s box never block.
pub fn ray_visible(nodes: &[SymbolNode], a: usize, b: usize, rays: usize) -> bool {
    let bb = &nodes[a].bbox;
    let eye = Point::new(0.5 * (bb.min_x + bb.max_x), 0.5 * (bb.min_y + bb.max_y));
    let target = &nodes[b].hull;
    if inside_convex(target, &eye) {
        return true;
    }
    let cx = target.iter().map(|p| p.x).sum::<f64>() / target.len() as f64;
    let cy = target.iter().map(|p| p.y).sum::<f64>() / target.len() as f64;
    let base = (cy - eye.y).atan2(cx - eye.x);
    let rel = |p: &Point| {
        let mut t = (p.y - eye.y).atan2(p.x - eye.x) - base;
        while t > std::f64::consts::PI {
            t -= 2.0 * std::f64::consts::PI;
        }
        while t <= -std::f64::consts::PI {
            t += 2.0 * std::f64::consts::PI;
        }
        t
    };
    let lo = target.iter().map(rel).fold(f64::INFINITY, f64::min);
    let hi = target.iter().map(rel).fold(f64::NEG_INFINITY, f64::max);
    let occluders: Vec<&SymbolNode> = (0..nodes.len())
        .filter(|&o| o != a && o != b)
        .map(|o| &nodes[o])
        .filter(|o| {
            let ob = &o.bbox;
            let holds_eye = eye.x >= ob.min_x && eye.x <= ob.max_x && eye.y >= ob.min_y && eye.y <= ob.max_y;
            o.hull.len() >= 2 && !holds_eye && !box_contains(&nodes[a], o)
        })
        .collect();
    (0..rays).any(|k| {
        let theta = base + lo + (hi - lo) * (k as f64 + 0.5) / rays as f64;
        let d = (theta.cos(), theta.sin());
        let Some(t) = first_hit(&eye, d, target) else { return false };
        occluders.iter().all(|o| first_hit(&eye, d, &o.hull).map_or(true, |u| u >= t))
    })
}

/// Random convex-ish symbol: a few points scattered around a center.
pub fn random_blob(id: &str, rng: &mut impl Rng) -> SymbolNode {
    let (cx, cy) = (rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0));
    let r = rng.gen_range(2.0..12.0);
    let k = rng.gen_range(3..7);
    let pts: Vec<Point> = (0..k)
        .map(|_| {
            let a = rng.gen_range(0.0..std::f64::consts::TAU);
            let s = rng.gen_range(0.3..1.0) * r;
            Point::new(cx + s * a.cos(), cy + s * a.sin())
        })
        .collect();
    SymbolNode::from_points(id, "x", BTreeSet::new(), &pts).unwrap()
}

// ---------------------------------------------------------------------------
// Dense EGAT layer

fn leaky(v: f64, slope: f64) -> f64 {
    if v >= 0.0 {
        v
    } else {
        slope * v
    }
}

pub struct DenseOut {
    pub nodes: Vec<Vec<f64>>,
    /// Per edge (in `edges` order) updated features.
    pub edges: Vec<Vec<f64>>,
    /// Per edge, per head attention.
    pub attn: Vec<Vec<f64>>,
}

/// Reference layer over an explicit adjacency tensor, written with plain
/// loops: edge update, per-head destination softmax and weighted sum of
/// projected neighbours, with isolated nodes keeping their own projection.
pub fn dense_layer(
    p: &EgatLayerParams,
    h: &[Vec<f64>],
    edges: &[(usize, usize)],
    f: &[Vec<f64>],
    slope: f64,
) -> DenseOut {
    let n = h.len();
    let mut adj: Vec<Vec<Option<usize>>> = vec![vec![None; n]; n];
    for (k, &(s, d)) in edges.iter().enumerate() {
        adj[s][d] = Some(k);
    }
    let a = p.a.data();
    let a_cols = p.a.cols();
    let eo = p.a.rows();
    let heads = p.heads;
    let hw = eo / heads;
    let mut f_new = vec![vec![0.0; eo]; edges.len()];
    let mut score = vec![vec![0.0; heads]; edges.len()];
    for s in 0..n {
        for d in 0..n {
            let Some(k) = adj[s][d] else { continue };
            let x: Vec<f64> = h[s].iter().chain(&f[k]).chain(&h[d]).copied().collect();
            for r in 0..eo {
                let mut acc = 0.0;
                for c in 0..a_cols {
                    acc += a[r * a_cols + c] * x[c];
                }
                f_new[k][r] = leaky(acc, slope);
            }
            for hd in 0..heads {
                score[k][hd] = (hd * hw..(hd + 1) * hw).map(|c| f_new[k][c] * p.a_att.get(0, c)).sum();
            }
        }
    }
    let no = p.w_node.rows();
    let nw = no / heads;
    let proj: Vec<Vec<f64>> = h
        .iter()
        .map(|row| (0..no).map(|r| (0..row.len()).map(|c| p.w_node.get(r, c) * row[c]).sum()).collect())
        .collect();
    let mut attn = vec![vec![0.0; heads]; edges.len()];
    let mut nodes = vec![vec![0.0; no]; n];
    for d in 0..n {
        let incoming: Vec<(usize, usize)> = (0..n).filter_map(|s| adj[s][d].map(|k| (s, k))).collect();
        if incoming.is_empty() {
            nodes[d] = proj[d].iter().map(|&v| leaky(v, slope)).collect();
            continue;
        }
        for hd in 0..heads {
            let z: f64 = incoming.iter().map(|&(_, k)| score[k][hd].exp()).sum();
            for &(s, k) in &incoming {
                let w = score[k][hd].exp() / z;
                attn[k][hd] = w;
                for c in hd * nw..(hd + 1) * nw {
                    nodes[d][c] += w * proj[s][c];
                }
            }
        }
        for v in &mut nodes[d] {
            *v = leaky(*v, slope);
        }
    }
    DenseOut { nodes, edges: f_new, attn }
}

pub fn rows_of(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|r| m.row(r).to_vec()).collect()
}

pub fn random_matrix(rows: usize, cols: usize, scale: f64, rng: &mut impl Rng) -> Matrix {
    Matrix::from_vec(rows, cols, (0..rows * cols).map(|_| rng.gen_range(-scale..scale)).collect()).unwrap()
}

/// Random batch with distinct ordered edges and no self-loops.
pub fn random_batch(n: usize, m: usize, node_dim: usize, edge_dim: usize, rng: &mut impl Rng) -> GraphBatch {
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|s| (0..n).map(move |d| (s, d))).filter(|(s, d)| s != d).collect();
    pairs.shuffle(rng);
    pairs.truncate(m);
    let mut node_feats = Matrix::zeros(n, node_dim);
    for i in 0..n {
        node_feats.set(i, rng.gen_range(0..node_dim), 1.0);
    }
    let mut edge_feats = Matrix::zeros(pairs.len(), edge_dim);
    for k in 0..pairs.len() {
        edge_feats.set(k, rng.gen_range(0..edge_dim), rng.gen_range(0.2..1.0));
    }
    let labels = (0..pairs.len()).map(|_| if rng.gen_bool(0.4) { 1.0 } else { 0.0 }).collect();
    GraphBatch { node_feats, edge_feats, edge_index: pairs, labels }
}

// ---------------------------------------------------------------------------
// Arborescence by enumeration

/// Best total weight over every choice of one incoming edge per non-root node
/// that reaches the root from everywhere, with the chosen edge indices.
pub fn brute_force_arborescence(n: usize, edges: &[(usize, usize, f64)], root: usize) -> Option<(f64, Vec<Option<usize>>)> {
    let incoming: Vec<Vec<usize>> = (0..n)
        .map(|v| (0..edges.len()).filter(|&k| edges[k].1 == v && edges[k].0 != v).collect())
        .collect();
    let mut best: Option<(f64, Vec<Option<usize>>)> = None;
    let mut choice: Vec<Option<usize>> = vec![None; n];
    fn rec(
        v: usize,
        n: usize,
        root: usize,
        edges: &[(usize, usize, f64)],
        incoming: &[Vec<usize>],
        choice: &mut Vec<Option<usize>>,
        best: &mut Option<(f64, Vec<Option<usize>>)>,
    ) {
        if v == n {
            for start in 0..n {
                let (mut cur, mut steps) = (start, 0);
                while cur != root {
                    cur = edges[choice[cur].unwrap()].0;
                    steps += 1;
                    if steps > n {
                        return;
                    }
                }
            }
            let w: f64 = choice.iter().flatten().map(|&k| edges[k].2).sum();
            if best.as_ref().map_or(true, |(b, _)| w > *b) {
                *best = Some((w, choice.clone()));
            }
            return;
        }
        if v == root {
            rec(v + 1, n, root, edges, incoming, choice, best);
            return;
        }
        for &k in &incoming[v] {
            choice[v] = Some(k);
            rec(v + 1, n, root, edges, incoming, choice, best);
        }
        choice[v] = None;
    }
    rec(0, n, root, edges, &incoming, &mut choice, &mut best);
    best
}

/// Map from `(src, dst)` to a uniform random probability for every edge.
pub fn random_probs(graph: &PrimitiveGraph, rng: &mut impl Rng) -> BTreeMap<(String, String), f64> {
    graph
        .edges
        .iter()
        .map(|e| ((e.src.clone(), e.dst.clone()), rng.gen_range(0.0..1.0)))
        .collect()
}
