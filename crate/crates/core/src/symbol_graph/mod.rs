//! Symbol-level graph model: symbol nodes, candidate relation edges, edge-set
//! intersection, primitive-graph quality metrics and DOT export.

mod los;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{convex_hull, BBox};
use crate::ink_io::{GroundTruthGraph, InkError, InkExpression, Point};

pub use los::{build_los_edges, build_los_edges_with, LosOptions};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("expression `{0}` has no symbol annotations")]
    NoAnnotations(String),
    #[error("symbol `{0}` has no ink")]
    EmptySymbol(String),
    #[error("all symbols collapse onto a single point")]
    DegenerateGeometry,
    #[error("edge references unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(String, String),
    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("primitive graph and ground truth disagree on the symbol set")]
    MisalignedSegmentation,
    #[error("redundancy is undefined for a ground truth without relations")]
    EmptyGroundTruth,
}

/// Spatial relation between a parent symbol and a child symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RelationLabel {
    Right,
    Sub,
    Sup,
    Above,
    Below,
    Inside,
}

impl RelationLabel {
    pub const ALL: [RelationLabel; 6] = [
        RelationLabel::Right,
        RelationLabel::Sub,
        RelationLabel::Sup,
        RelationLabel::Above,
        RelationLabel::Below,
        RelationLabel::Inside,
    ];
    pub const COUNT: usize = 6;

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RelationLabel::Right => "Right",
            RelationLabel::Sub => "Sub",
            RelationLabel::Sup => "Sup",
            RelationLabel::Above => "Above",
            RelationLabel::Below => "Below",
            RelationLabel::Inside => "Inside",
        }
    }
}

impl fmt::Display for RelationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationLabel {
    type Err = InkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "right" | "r" => RelationLabel::Right,
            "sub" | "subscript" => RelationLabel::Sub,
            "sup" | "superscript" => RelationLabel::Sup,
            "above" | "a" => RelationLabel::Above,
            "below" | "b" => RelationLabel::Below,
            "inside" | "i" => RelationLabel::Inside,
            _ => return Err(InkError::UnknownRelation(s.trim().to_string())),
        })
    }
}

/// Probability distribution over the six relations, indexed by
/// [`RelationLabel::index`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelDist(pub [f64; RelationLabel::COUNT]);

impl RelDist {
    pub fn one_hot(label: RelationLabel) -> Self {
        let mut p = [0.0; RelationLabel::COUNT];
        p[label.index()] = 1.0;
        RelDist(p)
    }

    pub fn uniform() -> Self {
        RelDist([1.0 / RelationLabel::COUNT as f64; RelationLabel::COUNT])
    }

    pub fn get(&self, label: RelationLabel) -> f64 {
        self.0[label.index()]
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Most probable relation; ties go to the earlier label.
    pub fn argmax(&self) -> RelationLabel {
        let mut best = 0;
        for i in 1..RelationLabel::COUNT {
            if self.0[i] > self.0[best] {
                best = i;
            }
        }
        RelationLabel::ALL[best]
    }

    pub fn max(&self) -> f64 {
        self.get(self.argmax())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolNode {
    pub symbol_id: String,
    pub label_dist: BTreeMap<String, f64>,
    pub top_label: String,
    pub stroke_ids: BTreeSet<u32>,
    pub bbox: BBox,
    /// Counter-clockwise convex hull of the member ink.
    pub hull: Vec<Point>,
}

impl SymbolNode {
    /// Node with a one-hot label distribution built from raw ink points.
    pub fn from_points(
        symbol_id: impl Into<String>,
        label: impl Into<String>,
        stroke_ids: BTreeSet<u32>,
        points: &[Point],
    ) -> Result<Self, GraphError> {
        let symbol_id = symbol_id.into();
        let label = label.into();
        let bbox = BBox::from_points(points).ok_or_else(|| GraphError::EmptySymbol(symbol_id.clone()))?;
        Ok(SymbolNode {
            label_dist: BTreeMap::from([(label.clone(), 1.0)]),
            top_label: label,
            stroke_ids,
            bbox,
            hull: convex_hull(points),
            symbol_id,
        })
    }

    pub fn first_stroke(&self) -> u32 {
        self.stroke_ids.iter().next().copied().unwrap_or(u32::MAX)
    }
}

/// Builds one node per annotated symbol, ordered by writing order (smallest
/// member stroke id).
pub fn symbol_nodes(expr: &InkExpression) -> Result<Vec<SymbolNode>, GraphError> {
    let anns = expr
        .annotations
        .as_ref()
        .ok_or_else(|| GraphError::NoAnnotations(expr.id.clone()))?;
    let mut nodes = anns
        .iter()
        .map(|a| {
            let pts: Vec<Point> = a
                .stroke_ids
                .iter()
                .filter_map(|sid| expr.stroke(*sid))
                .flat_map(|s| s.points.iter().copied())
                .collect();
            SymbolNode::from_points(&a.symbol_id, &a.label, a.stroke_ids.clone(), &pts)
        })
        .collect::<Result<Vec<_>, _>>()?;
    nodes.sort_by_key(|n| n.first_stroke());
    Ok(nodes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SourceTag {
    #[serde(rename = "CYK")]
    Cyk,
    #[serde(rename = "LOS")]
    Los,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateEdge {
    pub src: String,
    pub dst: String,
    pub rel_dist: RelDist,
    pub confidence: f64,
    pub source_tag: SourceTag,
}

/// Symbol nodes plus candidate directed edges; no self-loops, at most one edge
/// per ordered pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveGraph {
    pub nodes: Vec<SymbolNode>,
    pub edges: Vec<CandidateEdge>,
}

impl PrimitiveGraph {
    pub fn new(nodes: Vec<SymbolNode>, edges: Vec<CandidateEdge>) -> Result<Self, GraphError> {
        let g = PrimitiveGraph { nodes, edges };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        let ids: BTreeSet<&str> = self.nodes.iter().map(|n| n.symbol_id.as_str()).collect();
        let mut pairs = BTreeSet::new();
        for e in &self.edges {
            for end in [&e.src, &e.dst] {
                if !ids.contains(end.as_str()) {
                    return Err(GraphError::UnknownSymbol(end.clone()));
                }
            }
            if e.src == e.dst {
                return Err(GraphError::SelfLoop(e.src.clone()));
            }
            if !pairs.insert((e.src.as_str(), e.dst.as_str())) {
                return Err(GraphError::DuplicateEdge(e.src.clone(), e.dst.clone()));
            }
        }
        Ok(())
    }

    pub fn node_index(&self) -> HashMap<&str, usize> {
        self.nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.symbol_id.as_str(), i))
            .collect()
    }

    pub fn edge_pairs(&self) -> BTreeSet<(String, String)> {
        self.edges.iter().map(|e| (e.src.clone(), e.dst.clone())).collect()
    }

    pub fn edge(&self, src: &str, dst: &str) -> Option<&CandidateEdge> {
        self.edges.iter().find(|e| e.src == src && e.dst == dst)
    }
}

pub type EdgeSet = BTreeSet<(String, String)>;

/// Ordered-pair set intersection of two proposal sets.
pub fn intersect_edges(e_cyk: &EdgeSet, e_los: &EdgeSet) -> EdgeSet {
    e_cyk.intersection(e_los).cloned().collect()
}

fn check_alignment(primitive: &PrimitiveGraph, gt: &GroundTruthGraph) -> Result<(), GraphError> {
    let ours: BTreeSet<&str> = primitive.nodes.iter().map(|n| n.symbol_id.as_str()).collect();
    if ours != gt.symbol_ids() {
        return Err(GraphError::MisalignedSegmentation);
    }
    Ok(())
}

/// Percentage of ground-truth (parent, child) pairs present among the
/// primitive edges. Relation labels are not compared. Vacuously 100 when the
/// ground truth has no relations.
pub fn coverage(primitive: &PrimitiveGraph, gt: &GroundTruthGraph) -> Result<f64, GraphError> {
    check_alignment(primitive, gt)?;
    let gt_pairs = gt.edge_pairs();
    if gt_pairs.is_empty() {
        return Ok(100.0);
    }
    let ours = primitive.edge_pairs();
    let hit = gt_pairs.iter().filter(|p| ours.contains(*p)).count();
    Ok(100.0 * hit as f64 / gt_pairs.len() as f64)
}

/// Excess of primitive edges over ground-truth edges, in percent.
pub fn redundancy(primitive: &PrimitiveGraph, gt: &GroundTruthGraph) -> Result<f64, GraphError> {
    check_alignment(primitive, gt)?;
    let n_gt = gt.edge_pairs().len();
    if n_gt == 0 {
        return Err(GraphError::EmptyGroundTruth);
    }
    Ok(100.0 * (primitive.edges.len() as f64 - n_gt as f64) / n_gt as f64)
}

/// Graphviz export.
pub trait ToDot {
    fn to_dot(&self) -> String;
}

pub(crate) fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

impl ToDot for PrimitiveGraph {
    fn to_dot(&self) -> String {
        let mut out = String::from("digraph {\n");
        for n in &self.nodes {
            out.push_str(&format!(
                "  \"{}\" [label=\"{}:{}\"];\n",
                dot_escape(&n.symbol_id),
                dot_escape(&n.symbol_id),
                dot_escape(&n.top_label)
            ));
        }
        let mut edges: Vec<&CandidateEdge> = self.edges.iter().collect();
        edges.sort_by(|a, b| (&a.src, &a.dst).cmp(&(&b.src, &b.dst)));
        for e in edges {
            out.push_str(&format!(
                "  \"{}\" -> \"{}\" [label=\"{} {:.2}\"];\n",
                dot_escape(&e.src),
                dot_escape(&e.dst),
                e.rel_dist.argmax(),
                e.confidence
            ));
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ink_io::{LgRelation, LgSymbol};

    pub(crate) fn square(id: &str, cx: f64, cy: f64, half: f64) -> SymbolNode {
        let pts = [
            Point::new(cx - half, cy - half),
            Point::new(cx + half, cy - half),
            Point::new(cx + half, cy + half),
            Point::new(cx - half, cy + half),
        ];
        SymbolNode::from_points(id, "x", BTreeSet::new(), &pts).unwrap()
    }

    fn edge(src: &str, dst: &str) -> CandidateEdge {
        CandidateEdge {
            src: src.into(),
            dst: dst.into(),
            rel_dist: RelDist::one_hot(RelationLabel::Right),
            confidence: 1.0,
            source_tag: SourceTag::Cyk,
        }
    }

    fn gt(ids: &[&str], rels: &[(&str, &str)]) -> GroundTruthGraph {
        GroundTruthGraph {
            symbols: ids
                .iter()
                .map(|i| LgSymbol { id: i.to_string(), label: "x".into(), stroke_ids: vec![] })
                .collect(),
            relations: rels
                .iter()
                .map(|(p, c)| LgRelation {
                    parent: p.to_string(),
                    child: c.to_string(),
                    relation: RelationLabel::Right,
                })
                .collect(),
        }
    }

    fn pairs(v: &[(&str, &str)]) -> EdgeSet {
        v.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    #[test]
    fn intersection_examples() {
        let a = pairs(&[("a", "b"), ("b", "c")]);
        assert_eq!(intersect_edges(&a, &pairs(&[("a", "b")])), pairs(&[("a", "b")]));
        assert!(intersect_edges(&a, &pairs(&[("c", "a")])).is_empty());
        assert_eq!(intersect_edges(&a, &a), a);
    }

    #[test]
    fn coverage_and_redundancy_formulas() {
        let ids = ["a", "b", "c", "d", "e"];
        let nodes: Vec<SymbolNode> = ids.iter().enumerate().map(|(i, id)| square(id, i as f64, 0.0, 0.2)).collect();
        let truth = gt(&ids, &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "e")]);

        let all4 = PrimitiveGraph::new(
            nodes.clone(),
            vec![edge("a", "b"), edge("b", "c"), edge("c", "d"), edge("d", "e")],
        )
        .unwrap();
        assert_eq!(coverage(&all4, &truth).unwrap(), 100.0);
        assert_eq!(redundancy(&all4, &truth).unwrap(), 0.0);

        let seven = PrimitiveGraph::new(
            nodes.clone(),
            vec![
                edge("a", "b"),
                edge("b", "c"),
                edge("c", "d"),
                edge("a", "c"),
                edge("a", "d"),
                edge("a", "e"),
                edge("b", "e"),
            ],
        )
        .unwrap();
        assert_eq!(coverage(&seven, &truth).unwrap(), 75.0);
        assert_eq!(redundancy(&seven, &truth).unwrap(), 75.0);

        let empty_truth = gt(&ids, &[]);
        assert_eq!(coverage(&seven, &empty_truth).unwrap(), 100.0);
        assert!(matches!(redundancy(&seven, &empty_truth), Err(GraphError::EmptyGroundTruth)));

        let other = gt(&["a", "b"], &[("a", "b")]);
        assert!(matches!(coverage(&seven, &other), Err(GraphError::MisalignedSegmentation)));
    }

    #[test]
    fn graph_invariants_enforced() {
        let nodes = vec![square("a", 0.0, 0.0, 1.0), square("b", 3.0, 0.0, 1.0)];
        assert!(matches!(
            PrimitiveGraph::new(nodes.clone(), vec![edge("a", "a")]),
            Err(GraphError::SelfLoop(_))
        ));
        assert!(matches!(
            PrimitiveGraph::new(nodes.clone(), vec![edge("a", "b"), edge("a", "b")]),
            Err(GraphError::DuplicateEdge(..))
        ));
        assert!(matches!(
            PrimitiveGraph::new(nodes, vec![edge("a", "z")]),
            Err(GraphError::UnknownSymbol(_))
        ));
    }

    #[test]
    fn dot_output() {
        let mut n = square("s1", 0.0, 0.0, 1.0);
        n.top_label = "\\sqrt".into();
        let g = PrimitiveGraph::new(vec![n.clone()], vec![]).unwrap();
        assert_eq!(g.to_dot(), "digraph {\n  \"s1\" [label=\"s1:\\\\sqrt\"];\n}\n");

        let g = PrimitiveGraph::new(vec![n, square("s2", 3.0, 0.0, 1.0)], vec![edge("s1", "s2")]).unwrap();
        let dot = g.to_dot();
        assert_eq!(dot.matches("->").count(), 1);
        assert!(dot.contains("label=\"Right 1.00\""));
        assert_eq!(dot, g.to_dot());
    }

    #[test]
    fn relation_names() {
        for r in RelationLabel::ALL {
            assert_eq!(r.as_str().parse::<RelationLabel>().unwrap(), r);
        }
        assert_eq!("Superscript".parse::<RelationLabel>().unwrap(), RelationLabel::Sup);
        assert!("NoRel".parse::<RelationLabel>().is_err());
    }
}
