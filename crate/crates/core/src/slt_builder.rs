//! Turning per-edge keep probabilities into a Symbol Layout Tree.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ink_io::{GroundTruthGraph, LgRelation, LgSymbol};
use crate::symbol_graph::{dot_escape, PrimitiveGraph, RelationLabel, ToDot};

pub const DEFAULT_TAU: f64 = 0.5;

/// Probabilities below this are treated as this when taking logs.
const PROB_FLOOR: f64 = 1e-12;

pub type EdgeProbs = BTreeMap<(String, String), f64>;

#[derive(Debug, Error, PartialEq)]
pub enum SltError {
    #[error("no symbols to build a tree from")]
    EmptyGraph,
    #[error("no probability for candidate edge {0} -> {1}")]
    MissingProbability(String, String),
    #[error("no tree root: {0}")]
    NoRoot(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SltTree {
    pub nodes: Vec<LgSymbol>,
    pub edges: Vec<LgRelation>,
    pub root: String,
}

impl SltTree {
    /// Wraps a ground-truth graph whose relations form a tree; the root is
    /// the unique symbol without a parent.
    pub fn from_ground_truth(gt: &GroundTruthGraph) -> Result<SltTree, SltError> {
        if gt.symbols.is_empty() {
            return Err(SltError::EmptyGraph);
        }
        let children: BTreeSet<&str> = gt.relations.iter().map(|r| r.child.as_str()).collect();
        let roots: Vec<&LgSymbol> = gt.symbols.iter().filter(|s| !children.contains(s.id.as_str())).collect();
        match roots.as_slice() {
            [r] => Ok(SltTree { nodes: gt.symbols.clone(), edges: gt.relations.clone(), root: r.id.clone() }),
            _ => Err(SltError::NoRoot(format!("{} parentless symbols", roots.len()))),
        }
    }

    pub fn triples(&self) -> BTreeSet<(String, String, RelationLabel)> {
        self.edges
            .iter()
            .map(|e| (e.parent.clone(), e.child.clone(), e.relation))
            .collect()
    }

    pub fn label_of(&self, id: &str) -> Option<&str> {
        self.nodes.iter().find(|n| n.id == id).map(|n| n.label.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeptEdge {
    pub src: String,
    pub dst: String,
    pub relation: RelationLabel,
    pub prob: f64,
}

/// Candidate edges with `p >= tau`, in graph order, labelled by the argmax of
/// their relation distribution. Edges without a probability are dropped.
pub fn threshold_edges(probs: &EdgeProbs, graph: &PrimitiveGraph, tau: f64) -> Vec<KeptEdge> {
    graph
        .edges
        .iter()
        .filter_map(|e| {
            let p = *probs.get(&(e.src.clone(), e.dst.clone()))?;
            (p >= tau).then(|| KeptEdge { src: e.src.clone(), dst: e.dst.clone(), relation: e.rel_dist.argmax(), prob: p })
        })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RepairReport {
    /// Kept edges dropped because their child already had a likelier parent.
    pub dropped_parents: usize,
    /// Whether the spanning-arborescence fallback was needed.
    pub used_arborescence: bool,
    /// Symbols no candidate path reached; attached to their writing-order
    /// predecessor with `Right`.
    pub stranded: Vec<String>,
}

/// Maximum-weight spanning arborescence rooted at `root` (Chu-Liu/Edmonds).
///
/// `edges` are `(src, dst, weight)` over nodes `0..n`. Returns, for every
/// node, the index into `edges` of its chosen incoming edge (`None` for the
/// root), or `None` if some node cannot be reached. Among equal weights the
/// earlier edge wins.
pub fn max_arborescence(n: usize, edges: &[(usize, usize, f64)], root: usize) -> Option<Vec<Option<usize>>> {
    let mut best: Vec<Option<usize>> = vec![None; n];
    for (k, &(u, v, w)) in edges.iter().enumerate() {
        if u == v || v == root {
            continue;
        }
        if best[v].map_or(true, |b| w > edges[b].2) {
            best[v] = Some(k);
        }
    }
    if (0..n).any(|v| v != root && best[v].is_none()) {
        return None;
    }

    // look for a cycle among the chosen edges
    let mut color = vec![0u8; n];
    let mut cycle: Option<Vec<usize>> = None;
    for start in 0..n {
        if color[start] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut v = start;
        while color[v] == 0 {
            color[v] = 1;
            path.push(v);
            match best[v] {
                Some(k) => v = edges[k].0,
                None => break,
            }
        }
        if color[v] == 1 && best[v].is_some() {
            if let Some(pos) = path.iter().position(|&p| p == v) {
                cycle = Some(path[pos..].to_vec());
            }
        }
        for p in path {
            color[p] = 2;
        }
        if cycle.is_some() {
            break;
        }
    }
    let Some(cycle) = cycle else {
        return Some(best);
    };

    // contract the cycle into one node and recurse
    let in_cycle: BTreeSet<usize> = cycle.iter().copied().collect();
    let mut map = vec![0usize; n];
    let mut next = 0;
    for v in 0..n {
        if !in_cycle.contains(&v) {
            map[v] = next;
            next += 1;
        }
    }
    let c = next;
    for &v in &cycle {
        map[v] = c;
    }
    let mut sub_edges = Vec::new();
    let mut origin = Vec::new();
    for (k, &(u, v, w)) in edges.iter().enumerate() {
        let (cu, cv) = (in_cycle.contains(&u), in_cycle.contains(&v));
        if cu && cv {
            continue;
        }
        let w = if cv { w - edges[best[v].expect("cycle node has a parent")].2 } else { w };
        sub_edges.push((map[u], map[v], w));
        origin.push(k);
    }
    let sub = max_arborescence(c + 1, &sub_edges, map[root])?;

    let mut out: Vec<Option<usize>> = vec![None; n];
    for &v in &cycle {
        out[v] = best[v];
    }
    for choice in sub.into_iter().flatten() {
        let k = origin[choice];
        out[edges[k].1] = Some(k);
    }
    Some(out)
}

fn writing_key(sym: &LgSymbol, idx: usize) -> (u32, usize) {
    (sym.stroke_ids.iter().copied().min().unwrap_or(u32::MAX), idx)
}

/// Turns kept edges into a valid tree over every node of `graph`.
///
/// Each child keeps only its likeliest kept parent. If the survivors already
/// form a tree they are returned unchanged; otherwise the tree is the
/// maximum spanning arborescence over all candidates under `log p`, rooted at
/// the node without a kept parent (leftmost such node, or leftmost overall).
pub fn repair_to_tree(
    kept: &[KeptEdge],
    graph: &PrimitiveGraph,
    probs: &EdgeProbs,
) -> Result<(SltTree, RepairReport), SltError> {
    let n = graph.nodes.len();
    if n == 0 {
        return Err(SltError::EmptyGraph);
    }
    let index = graph.node_index();
    let nodes: Vec<LgSymbol> = graph
        .nodes
        .iter()
        .map(|s| LgSymbol { id: s.symbol_id.clone(), label: s.top_label.clone(), stroke_ids: s.stroke_ids.iter().copied().collect() })
        .collect();
    let mut report = RepairReport::default();

    let mut parent: Vec<Option<&KeptEdge>> = vec![None; n];
    for e in kept {
        let (Some(&s), Some(&d)) = (index.get(e.src.as_str()), index.get(e.dst.as_str())) else {
            continue;
        };
        if s == d {
            continue;
        }
        match parent[d] {
            None => parent[d] = Some(e),
            Some(cur) => {
                report.dropped_parents += 1;
                let cur_s = index[cur.src.as_str()];
                if e.prob > cur.prob || (e.prob == cur.prob && s < cur_s) {
                    parent[d] = Some(e);
                }
            }
        }
    }

    let leftmost = |cands: &[usize]| -> usize {
        *cands
            .iter()
            .min_by(|&&a, &&b| graph.nodes[a].bbox.min_x.total_cmp(&graph.nodes[b].bbox.min_x).then(a.cmp(&b)))
            .expect("non-empty")
    };
    let orphans: Vec<usize> = (0..n).filter(|&v| parent[v].is_none()).collect();
    let root = match orphans.as_slice() {
        [r] => *r,
        [] => leftmost(&(0..n).collect::<Vec<_>>()),
        many => leftmost(many),
    };

    let tree_edges = |parent: &[Option<&KeptEdge>]| -> Vec<LgRelation> {
        parent
            .iter()
            .flatten()
            .map(|e| LgRelation { parent: e.src.clone(), child: e.dst.clone(), relation: e.relation })
            .collect()
    };
    if orphans.len() == 1 {
        let tree = SltTree { nodes: nodes.clone(), edges: tree_edges(&parent), root: nodes[root].id.clone() };
        if validate_slt(&tree).is_empty() {
            return Ok((tree, report));
        }
    }

    report.used_arborescence = true;
    let mut cand: Vec<(usize, usize, f64)> = Vec::with_capacity(graph.edges.len());
    let mut labels: Vec<RelationLabel> = Vec::with_capacity(graph.edges.len());
    for e in &graph.edges {
        let p = *probs
            .get(&(e.src.clone(), e.dst.clone()))
            .ok_or_else(|| SltError::MissingProbability(e.src.clone(), e.dst.clone()))?;
        cand.push((index[e.src.as_str()], index[e.dst.as_str()], p.max(PROB_FLOOR).ln()));
        labels.push(e.rel_dist.argmax());
    }

    // reachability from the root over candidates; unreachable nodes get a
    // last-resort edge from their writing-order predecessor
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v, _) in &cand {
        adj[u].push(v);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![root];
    seen[root] = true;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    let order: Vec<usize> = {
        let mut o: Vec<usize> = (0..n).collect();
        o.sort_by_key(|&i| writing_key(&nodes[i], i));
        o
    };
    let n_real = cand.len();
    for (pos, &v) in order.iter().enumerate() {
        if !seen[v] {
            let pred = if pos == 0 { root } else { order[pos - 1] };
            let pred = if pred == v { root } else { pred };
            cand.push((pred, v, PROB_FLOOR.ln() * 2.0));
            labels.push(RelationLabel::Right);
        }
    }

    let choice = max_arborescence(n, &cand, root).ok_or_else(|| SltError::NoRoot("arborescence failed".into()))?;
    let mut edges = Vec::with_capacity(n - 1);
    for (v, k) in choice.iter().enumerate() {
        let Some(k) = *k else { continue };
        if k >= n_real {
            report.stranded.push(nodes[v].id.clone());
        }
        edges.push(LgRelation { parent: nodes[cand[k].0].id.clone(), child: nodes[v].id.clone(), relation: labels[k] });
    }
    report.stranded.sort();
    Ok((SltTree { nodes: nodes.clone(), edges, root: nodes[root].id.clone() }, report))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SltViolation {
    Cycle,
    MultiParent,
    Disconnected,
    BadRoot,
}

impl fmt::Display for SltViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Every tree invariant that fails, each reported once. Self-loops count
/// only as `Cycle`; edges to unknown symbols count as `Disconnected`.
pub fn validate_slt(tree: &SltTree) -> Vec<SltViolation> {
    let mut out = BTreeSet::new();
    let ids: HashMap<&str, usize> = tree.nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect();
    let n = tree.nodes.len();
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in &tree.edges {
        if e.parent == e.child {
            out.insert(SltViolation::Cycle);
            continue;
        }
        match (ids.get(e.parent.as_str()), ids.get(e.child.as_str())) {
            (Some(&p), Some(&c)) => {
                parents[c].push(p);
                children[p].push(c);
            }
            _ => {
                out.insert(SltViolation::Disconnected);
            }
        }
    }
    if parents.iter().any(|p| p.len() > 1) {
        out.insert(SltViolation::MultiParent);
    }
    let root = ids.get(tree.root.as_str()).copied();
    match root {
        Some(r) if parents[r].is_empty() => {}
        _ => {
            out.insert(SltViolation::BadRoot);
        }
    }

    // Kahn's algorithm leaves exactly the nodes on or behind a cycle
    let mut indeg: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut removed = 0;
    while let Some(u) = queue.pop() {
        removed += 1;
        for &c in &children[u] {
            indeg[c] -= 1;
            if indeg[c] == 0 {
                queue.push(c);
            }
        }
    }
    if removed < n {
        out.insert(SltViolation::Cycle);
    }

    if let Some(r) = root {
        let mut seen = vec![false; n];
        let mut stack = vec![r];
        seen[r] = true;
        while let Some(u) = stack.pop() {
            for &c in &children[u] {
                if !seen[c] {
                    seen[c] = true;
                    stack.push(c);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            out.insert(SltViolation::Disconnected);
        }
    } else if n > 1 {
        out.insert(SltViolation::Disconnected);
    }
    out.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Latex {
    pub text: String,
    /// Structures with no LaTeX rendering; the text is best effort.
    pub unsupported: Vec<String>,
}

const FRACTION_BARS: [&str; 2] = ["-", "\\frac"];

fn push_token(out: &mut String, token: &str) {
    let ends_in_command = {
        let tail: String = out.chars().rev().take_while(|c| c.is_ascii_alphabetic()).collect();
        !tail.is_empty() && out[..out.len() - tail.len()].ends_with('\\')
    };
    if ends_in_command && token.starts_with(|c: char| c.is_ascii_alphabetic()) {
        out.push(' ');
    }
    out.push_str(token);
}

/// LaTeX for a valid tree. Children under one relation are emitted in
/// writing order.
pub fn slt_to_latex(tree: &SltTree) -> Latex {
    let order: HashMap<&str, (u32, usize)> =
        tree.nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), writing_key(n, i))).collect();
    let mut kids: HashMap<&str, BTreeMap<RelationLabel, Vec<&str>>> = HashMap::new();
    for e in &tree.edges {
        kids.entry(e.parent.as_str()).or_default().entry(e.relation).or_default().push(e.child.as_str());
    }
    for rels in kids.values_mut() {
        for v in rels.values_mut() {
            v.sort_by_key(|id| order.get(id).copied().unwrap_or((u32::MAX, usize::MAX)));
        }
    }
    let mut unsupported = Vec::new();
    let mut visiting = BTreeSet::new();
    let text = render(tree, &tree.root, &kids, &mut unsupported, &mut visiting);
    Latex { text, unsupported }
}

fn render<'a>(
    tree: &'a SltTree,
    id: &'a str,
    kids: &HashMap<&'a str, BTreeMap<RelationLabel, Vec<&'a str>>>,
    unsupported: &mut Vec<String>,
    visiting: &mut BTreeSet<&'a str>,
) -> String {
    if !visiting.insert(id) {
        unsupported.push(format!("cycle through {id}"));
        return String::new();
    }
    let label = tree.label_of(id).unwrap_or(id);
    let empty = BTreeMap::new();
    let rels = kids.get(id).unwrap_or(&empty);
    let group = |rel: RelationLabel, unsupported: &mut Vec<String>, visiting: &mut BTreeSet<&'a str>| -> Option<String> {
        let ids = rels.get(&rel)?;
        if ids.len() > 1 {
            unsupported.push(format!("{id} has {} {rel} children", ids.len()));
        }
        let mut s = String::new();
        for c in ids {
            push_token(&mut s, &render(tree, c, kids, unsupported, visiting));
        }
        Some(s)
    };
    let above = group(RelationLabel::Above, unsupported, visiting);
    let below = group(RelationLabel::Below, unsupported, visiting);
    let inside = group(RelationLabel::Inside, unsupported, visiting);
    let sub = group(RelationLabel::Sub, unsupported, visiting);
    let sup = group(RelationLabel::Sup, unsupported, visiting);
    let right = group(RelationLabel::Right, unsupported, visiting);

    let mut base = if FRACTION_BARS.contains(&label) && (above.is_some() || below.is_some()) {
        format!("\\frac{{{}}}{{{}}}", above.unwrap_or_default(), below.unwrap_or_default())
    } else {
        let mut b = label.to_string();
        if let Some(a) = above {
            b = format!("\\overset{{{a}}}{{{b}}}");
        }
        if let Some(w) = below {
            b = format!("\\underset{{{w}}}{{{b}}}");
        }
        b
    };
    if let Some(ins) = inside {
        if label == "\\sqrt" {
            base = format!("\\sqrt{{{ins}}}");
        } else {
            unsupported.push(format!("Inside under `{label}`"));
            base = format!("{base}{{{ins}}}");
        }
    }
    let mut out = base;
    if let Some(s) = sub {
        out.push_str(&format!("_{{{s}}}"));
    }
    if let Some(s) = sup {
        out.push_str(&format!("^{{{s}}}"));
    }
    if let Some(r) = right {
        push_token(&mut out, &r);
    }
    visiting.remove(id);
    out
}

impl ToDot for SltTree {
    fn to_dot(&self) -> String {
        let mut out = String::from("digraph {\n");
        for n in &self.nodes {
            out.push_str(&format!(
                "  \"{}\" [label=\"{}:{}\"{}];\n",
                dot_escape(&n.id),
                dot_escape(&n.id),
                dot_escape(&n.label),
                if n.id == self.root { ", shape=box" } else { "" }
            ));
        }
        let mut edges: Vec<&LgRelation> = self.edges.iter().collect();
        edges.sort();
        for e in edges {
            out.push_str(&format!(
                "  \"{}\" -> \"{}\" [label=\"{}\"];\n",
                dot_escape(&e.parent),
                dot_escape(&e.child),
                e.relation
            ));
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ink_io::Point;
    use crate::symbol_graph::{CandidateEdge, RelDist, SourceTag, SymbolNode};

    fn sym(id: &str, label: &str, stroke: u32) -> LgSymbol {
        LgSymbol { id: id.into(), label: label.into(), stroke_ids: vec![stroke] }
    }

    fn rel(p: &str, c: &str, r: RelationLabel) -> LgRelation {
        LgRelation { parent: p.into(), child: c.into(), relation: r }
    }

    fn running_example() -> SltTree {
        SltTree {
            nodes: vec![sym("x", "x", 0), sym("2", "2", 1), sym("+", "+", 2), sym("a", "a", 3)],
            edges: vec![
                rel("x", "2", RelationLabel::Sup),
                rel("x", "+", RelationLabel::Right),
                rel("+", "a", RelationLabel::Right),
            ],
            root: "x".into(),
        }
    }

    fn graph(n: usize, edges: &[(usize, usize, RelationLabel)]) -> PrimitiveGraph {
        let nodes = (0..n)
            .map(|i| {
                let x = i as f64 * 10.0;
                SymbolNode::from_points(
                    format!("n{i}"),
                    "x",
                    [i as u32].into(),
                    &[Point::new(x, 0.0), Point::new(x + 5.0, 5.0)],
                )
                .unwrap()
            })
            .collect();
        let edges = edges
            .iter()
            .map(|&(s, d, r)| CandidateEdge {
                src: format!("n{s}"),
                dst: format!("n{d}"),
                rel_dist: RelDist::one_hot(r),
                confidence: 1.0,
                source_tag: SourceTag::Both,
            })
            .collect();
        PrimitiveGraph::new(nodes, edges).unwrap()
    }

    fn probs(list: &[(usize, usize, f64)]) -> EdgeProbs {
        list.iter().map(|&(s, d, p)| ((format!("n{s}"), format!("n{d}")), p)).collect()
    }

    #[test]
    fn latex_examples() {
        assert_eq!(slt_to_latex(&running_example()).text, "x^{2}+a");
        let single = SltTree { nodes: vec![sym("x", "x", 0)], edges: vec![], root: "x".into() };
        assert_eq!(slt_to_latex(&single).text, "x");
        let sup = SltTree {
            nodes: vec![sym("x", "x", 0), sym("2", "2", 1)],
            edges: vec![rel("x", "2", RelationLabel::Sup)],
            root: "x".into(),
        };
        assert_eq!(slt_to_latex(&sup).text, "x^{2}");
        let frac = SltTree {
            nodes: vec![sym("bar", "-", 0), sym("a", "a", 1), sym("b", "b", 2), sym("s", "\\sqrt", 3), sym("y", "y", 4)],
            edges: vec![
                rel("bar", "a", RelationLabel::Above),
                rel("bar", "b", RelationLabel::Below),
                rel("bar", "s", RelationLabel::Right),
                rel("s", "y", RelationLabel::Inside),
            ],
            root: "bar".into(),
        };
        let l = slt_to_latex(&frac);
        assert_eq!(l.text, "\\frac{a}{b}\\sqrt{y}");
        assert!(l.unsupported.is_empty());
        let greek = SltTree {
            nodes: vec![sym("p", "\\pi", 0), sym("r", "r", 1)],
            edges: vec![rel("p", "r", RelationLabel::Right)],
            root: "p".into(),
        };
        assert_eq!(slt_to_latex(&greek).text, "\\pi r");
    }

    #[test]
    fn validation_examples() {
        assert!(validate_slt(&running_example()).is_empty());
        let looped = SltTree { nodes: vec![sym("a", "a", 0)], edges: vec![rel("a", "a", RelationLabel::Right)], root: "a".into() };
        assert_eq!(validate_slt(&looped), vec![SltViolation::Cycle]);
        let two_roots = SltTree { nodes: vec![sym("a", "a", 0), sym("b", "b", 1)], edges: vec![], root: "a".into() };
        assert_eq!(validate_slt(&two_roots), vec![SltViolation::Disconnected]);
        let mut multi = running_example();
        multi.edges.push(rel("2", "a", RelationLabel::Right));
        assert!(validate_slt(&multi).contains(&SltViolation::MultiParent));
        let mut bad_root = running_example();
        bad_root.root = "a".into();
        assert!(validate_slt(&bad_root).contains(&SltViolation::BadRoot));
    }

    #[test]
    fn thresholding() {
        let g = graph(3, &[(0, 1, RelationLabel::Sup), (1, 2, RelationLabel::Right)]);
        let kept = threshold_edges(&probs(&[(0, 1, 0.9), (1, 2, 0.1)]), &g, 0.5);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].relation, RelationLabel::Sup);
        assert_eq!(threshold_edges(&probs(&[(0, 1, 0.5), (1, 2, 0.1)]), &g, 0.5).len(), 1);
        assert!(threshold_edges(&probs(&[(0, 1, 0.2), (1, 2, 0.1)]), &g, 0.5).is_empty());
    }

    #[test]
    fn valid_kept_tree_is_unchanged() {
        let g = graph(3, &[(0, 1, RelationLabel::Sup), (0, 2, RelationLabel::Right), (1, 2, RelationLabel::Right)]);
        let p = probs(&[(0, 1, 0.9), (0, 2, 0.8), (1, 2, 0.3)]);
        let kept = threshold_edges(&p, &g, 0.5);
        let (tree, report) = repair_to_tree(&kept, &g, &p).unwrap();
        assert!(!report.used_arborescence);
        assert_eq!(tree.root, "n0");
        let want: BTreeSet<_> = kept.iter().map(|e| (e.src.clone(), e.dst.clone(), e.relation)).collect();
        assert_eq!(tree.triples(), want);
    }

    #[test]
    fn weaker_parent_dropped() {
        let g = graph(3, &[(0, 2, RelationLabel::Right), (1, 2, RelationLabel::Sub), (0, 1, RelationLabel::Sup)]);
        let p = probs(&[(0, 2, 0.6), (1, 2, 0.9), (0, 1, 0.95)]);
        let (tree, report) = repair_to_tree(&threshold_edges(&p, &g, 0.5), &g, &p).unwrap();
        assert_eq!(report.dropped_parents, 1);
        assert!(tree.triples().contains(&("n1".into(), "n2".into(), RelationLabel::Sub)));
        assert!(!tree.edges.iter().any(|e| e.parent == "n0" && e.child == "n2"));
    }

    #[test]
    fn stranded_node_attached_to_predecessor() {
        let g = graph(3, &[(0, 1, RelationLabel::Right)]);
        let p = probs(&[(0, 1, 0.9)]);
        let (tree, report) = repair_to_tree(&threshold_edges(&p, &g, 0.5), &g, &p).unwrap();
        assert_eq!(report.stranded, vec!["n2".to_string()]);
        assert!(tree.triples().contains(&("n1".into(), "n2".into(), RelationLabel::Right)));
        assert!(validate_slt(&tree).is_empty());
    }

    #[test]
    fn missing_probability_is_an_error() {
        let g = graph(3, &[(0, 1, RelationLabel::Right), (1, 2, RelationLabel::Right)]);
        let p = probs(&[(0, 1, 0.9)]);
        assert!(matches!(
            repair_to_tree(&threshold_edges(&p, &g, 0.5), &g, &p),
            Err(SltError::MissingProbability(..))
        ));
    }

    #[test]
    fn arborescence_contracts_cycles() {
        // 1 and 2 prefer each other; the root edge into the cycle must break it
        let edges = [(0, 1, 1.0), (0, 2, 0.5), (1, 2, 10.0), (2, 1, 10.0), (2, 3, 1.0)];
        let best = max_arborescence(4, &edges, 0).unwrap();
        assert_eq!(best, vec![None, Some(0), Some(2), Some(4)]);
        assert!(max_arborescence(3, &[(0, 1, 1.0)], 0).is_none());
    }

    #[test]
    fn ground_truth_root() {
        let t = running_example();
        let gt = GroundTruthGraph { symbols: t.nodes.clone(), relations: t.edges.clone() };
        assert_eq!(SltTree::from_ground_truth(&gt).unwrap(), t);
    }
}
