//! Online ink ingestion and serialization.
//!
//! Reads CROHME-style InkML (traces plus symbol trace groups) and label-graph
//! (`.lg`) files, writes both formats back, and provides the stroke
//! preprocessing used before graph construction: normalization, Ramer
//! resampling and per-point feature extraction.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::symbol_graph::RelationLabel;

/// Default height of the normalized ink bounding box.
pub const DEFAULT_TARGET_HEIGHT: f64 = 100.0;
/// Default Ramer tolerance, in normalized units.
pub const DEFAULT_RAMER_EPSILON: f64 = 2.0;

#[derive(Debug, Error)]
pub enum InkError {
    #[error("malformed InkML: {0}")]
    MalformedXml(String),
    #[error("trace group references missing trace `{0}`")]
    DanglingTraceReference(String),
    #[error("ink contains no traces")]
    EmptyInk,
    #[error("line {line}: unknown line tag `{tag}`")]
    UnknownLineTag { line: usize, tag: String },
    #[error("line {line}: malformed label-graph line: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("relation {parent} -> {child} references unknown symbol")]
    RelationToUnknownSymbol { parent: String, child: String },
    #[error("symbol `{0}` has more than one parent")]
    MultipleParents(String),
    #[error("unknown relation label `{0}`")]
    UnknownRelation(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stroke {
    pub id: u32,
    pub points: Vec<Point>,
}

/// Per-point input features: writing direction, normalized step length and
/// pen state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointFeature {
    pub sin_dir: f64,
    pub cos_dir: f64,
    pub norm_dist: f64,
    /// 1 on the first point of each stroke.
    pub pen_state: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolAnnotation {
    pub symbol_id: String,
    pub label: String,
    pub stroke_ids: BTreeSet<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LgSymbol {
    pub id: String,
    pub label: String,
    pub stroke_ids: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LgRelation {
    pub parent: String,
    pub child: String,
    pub relation: RelationLabel,
}

/// Symbols and parent→child relations of a label graph. Every symbol has at
/// most one parent.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthGraph {
    pub symbols: Vec<LgSymbol>,
    pub relations: Vec<LgRelation>,
}

impl GroundTruthGraph {
    pub fn symbol_ids(&self) -> BTreeSet<&str> {
        self.symbols.iter().map(|s| s.id.as_str()).collect()
    }

    /// Relation lookup keyed by ordered (parent, child).
    pub fn relation_map(&self) -> BTreeMap<(String, String), RelationLabel> {
        self.relations
            .iter()
            .map(|r| ((r.parent.clone(), r.child.clone()), r.relation))
            .collect()
    }

    pub fn edge_pairs(&self) -> BTreeSet<(String, String)> {
        self.relations
            .iter()
            .map(|r| (r.parent.clone(), r.child.clone()))
            .collect()
    }

    pub fn label_of(&self, id: &str) -> Option<&str> {
        self.symbols
            .iter()
            .find(|s| s.id == id)
            .map(|s| s.label.as_str())
    }

    /// Checks endpoint existence and the single-parent rule.
    pub fn validate(&self) -> Result<(), InkError> {
        let ids = self.symbol_ids();
        let mut seen_child = HashSet::new();
        for r in &self.relations {
            if !ids.contains(r.parent.as_str()) || !ids.contains(r.child.as_str()) {
                return Err(InkError::RelationToUnknownSymbol {
                    parent: r.parent.clone(),
                    child: r.child.clone(),
                });
            }
            if !seen_child.insert(r.child.as_str()) {
                return Err(InkError::MultipleParents(r.child.clone()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InkExpression {
    pub id: String,
    /// Strokes in writing order.
    pub strokes: Vec<Stroke>,
    pub annotations: Option<Vec<SymbolAnnotation>>,
    pub ground_truth: Option<GroundTruthGraph>,
}

impl InkExpression {
    pub fn stroke(&self, id: u32) -> Option<&Stroke> {
        self.strokes.iter().find(|s| s.id == id)
    }

    pub fn point_count(&self) -> usize {
        self.strokes.iter().map(|s| s.points.len()).sum()
    }

    fn bounds(&self) -> Option<(f64, f64, f64, f64)> {
        let mut it = self.strokes.iter().flat_map(|s| s.points.iter());
        let first = it.next()?;
        let init = (first.x, first.y, first.x, first.y);
        Some(it.fold(init, |(x0, y0, x1, y1), p| {
            (x0.min(p.x), y0.min(p.y), x1.max(p.x), y1.max(p.y))
        }))
    }
}

// ---------------------------------------------------------------------------
// InkML

/// Parses a CROHME-style InkML document.
///
/// Only the first two channels of each trace point are kept. Trace groups that
/// reference traces through `traceView` become symbol annotations; the symbol
/// id is taken from `annotationXML/@href`, falling back to `xml:id`.
pub fn parse_inkml(bytes: &[u8]) -> Result<InkExpression, InkError> {
    let text = std::str::from_utf8(bytes).map_err(|e| InkError::MalformedXml(e.to_string()))?;
    let doc = roxmltree::Document::parse(text).map_err(|e| InkError::MalformedXml(e.to_string()))?;
    let root = doc.root_element();

    let mut id = String::new();
    for child in root.children().filter(|n| n.has_tag_name("annotation")) {
        if child.attribute("type") == Some("UI") {
            id = child.text().unwrap_or("").trim().to_string();
        }
    }

    let mut strokes = Vec::new();
    let mut seen = HashSet::new();
    for trace in root.descendants().filter(|n| n.has_tag_name("trace")) {
        let raw_id = trace
            .attribute("id")
            .or_else(|| trace.attribute(("http://www.w3.org/XML/1998/namespace", "id")))
            .ok_or_else(|| InkError::MalformedXml("trace without id".into()))?;
        let stroke_id: u32 = raw_id
            .trim()
            .parse()
            .map_err(|_| InkError::MalformedXml(format!("non-integer trace id `{raw_id}`")))?;
        if !seen.insert(stroke_id) {
            return Err(InkError::MalformedXml(format!("duplicate trace id {stroke_id}")));
        }
        let points = parse_trace_points(trace.text().unwrap_or(""))?;
        strokes.push(Stroke { id: stroke_id, points });
    }
    if strokes.is_empty() {
        return Err(InkError::EmptyInk);
    }

    let mut annotations = Vec::new();
    for group in root.descendants().filter(|n| n.has_tag_name("traceGroup")) {
        let refs: Vec<&str> = group
            .children()
            .filter(|n| n.has_tag_name("traceView"))
            .filter_map(|n| n.attribute("traceDataRef"))
            .collect();
        if refs.is_empty() {
            continue;
        }
        let label = group
            .children()
            .find(|n| n.has_tag_name("annotation") && n.attribute("type") == Some("truth"))
            .and_then(|n| n.text())
            .unwrap_or("")
            .trim()
            .to_string();
        let symbol_id = group
            .children()
            .find(|n| n.has_tag_name("annotationXML"))
            .and_then(|n| n.attribute("href"))
            .or_else(|| group.attribute(("http://www.w3.org/XML/1998/namespace", "id")))
            .map(str::to_string)
            .unwrap_or_else(|| format!("sym{}", annotations.len()));
        let mut stroke_ids = BTreeSet::new();
        for r in refs {
            let sid: u32 = r
                .trim()
                .parse()
                .map_err(|_| InkError::DanglingTraceReference(r.to_string()))?;
            if !seen.contains(&sid) {
                return Err(InkError::DanglingTraceReference(r.to_string()));
            }
            stroke_ids.insert(sid);
        }
        annotations.push(SymbolAnnotation { symbol_id, label, stroke_ids });
    }

    let mut owner: HashMap<u32, &str> = HashMap::new();
    for a in &annotations {
        for s in &a.stroke_ids {
            if let Some(prev) = owner.insert(*s, &a.symbol_id) {
                return Err(InkError::MalformedXml(format!(
                    "trace {s} claimed by both `{prev}` and `{}`",
                    a.symbol_id
                )));
            }
        }
    }

    Ok(InkExpression {
        id,
        strokes,
        annotations: if annotations.is_empty() { None } else { Some(annotations) },
        ground_truth: None,
    })
}

fn parse_trace_points(text: &str) -> Result<Vec<Point>, InkError> {
    let mut points = Vec::new();
    for chunk in text.split(',') {
        let mut nums = chunk.split_whitespace();
        let (Some(x), Some(y)) = (nums.next(), nums.next()) else {
            if chunk.trim().is_empty() {
                continue;
            }
            return Err(InkError::MalformedXml(format!("bad trace point `{}`", chunk.trim())));
        };
        let parse = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| InkError::MalformedXml(format!("bad coordinate `{s}`")))
        };
        points.push(Point::new(parse(x)?, parse(y)?));
    }
    if points.is_empty() {
        return Err(InkError::MalformedXml("empty trace".into()));
    }
    Ok(points)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Writes an expression as CROHME-style InkML. Annotations, if any, are
/// emitted as one trace group per symbol under a `Segmentation` group.
pub fn write_inkml(expr: &InkExpression) -> String {
    let mut out = String::new();
    out.push_str("<ink xmlns=\"http://www.w3.org/2003/InkML\">\n");
    out.push_str("<traceFormat>\n<channel name=\"X\" type=\"decimal\"/>\n<channel name=\"Y\" type=\"decimal\"/>\n</traceFormat>\n");
    let _ = writeln!(out, "<annotation type=\"UI\">{}</annotation>", xml_escape(&expr.id));
    for s in &expr.strokes {
        let coords: Vec<String> = s.points.iter().map(|p| format!("{} {}", p.x, p.y)).collect();
        let _ = writeln!(out, "<trace id=\"{}\">{}</trace>", s.id, coords.join(", "));
    }
    if let Some(anns) = &expr.annotations {
        out.push_str("<traceGroup xml:id=\"seg\">\n<annotation type=\"truth\">Segmentation</annotation>\n");
        for (i, a) in anns.iter().enumerate() {
            let _ = writeln!(out, "<traceGroup xml:id=\"tg{i}\">");
            let _ = writeln!(out, "<annotation type=\"truth\">{}</annotation>", xml_escape(&a.label));
            for s in &a.stroke_ids {
                let _ = writeln!(out, "<traceView traceDataRef=\"{s}\"/>");
            }
            let _ = writeln!(out, "<annotationXML href=\"{}\"/>", xml_escape(&a.symbol_id));
            out.push_str("</traceGroup>\n");
        }
        out.push_str("</traceGroup>\n");
    }
    out.push_str("</ink>\n");
    out
}

// ---------------------------------------------------------------------------
// Label graphs

// Commas are field separators, so the comma symbol travels as COMMA.
fn lg_encode_label(label: &str) -> &str {
    if label == "," {
        "COMMA"
    } else {
        label
    }
}

fn lg_decode_label(label: &str) -> String {
    if label == "COMMA" {
        ",".to_string()
    } else {
        label.to_string()
    }
}

/// Parses a label-graph file (`O` object lines and `R`/`EO` relation lines).
pub fn parse_lg(bytes: &[u8]) -> Result<GroundTruthGraph, InkError> {
    let text = String::from_utf8_lossy(bytes);
    let mut graph = GroundTruthGraph::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        match fields[0] {
            "O" => {
                if fields.len() < 3 {
                    return Err(InkError::MalformedLine {
                        line: line_no,
                        reason: "object line needs id and label".into(),
                    });
                }
                let stroke_ids = fields
                    .iter()
                    .skip(4)
                    .filter(|f| !f.is_empty())
                    .map(|f| {
                        f.parse::<u32>().map_err(|_| InkError::MalformedLine {
                            line: line_no,
                            reason: format!("bad stroke id `{f}`"),
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                graph.symbols.push(LgSymbol {
                    id: fields[1].to_string(),
                    label: lg_decode_label(fields[2]),
                    stroke_ids,
                });
            }
            "R" | "EO" => {
                if fields.len() < 4 {
                    return Err(InkError::MalformedLine {
                        line: line_no,
                        reason: "relation line needs parent, child and label".into(),
                    });
                }
                let relation: RelationLabel = fields[3].parse()?;
                graph.relations.push(LgRelation {
                    parent: fields[1].to_string(),
                    child: fields[2].to_string(),
                    relation,
                });
            }
            tag => {
                return Err(InkError::UnknownLineTag { line: line_no, tag: tag.to_string() });
            }
        }
    }
    graph.validate()?;
    Ok(graph)
}

/// Renders symbols and relations as label-graph text in sorted order.
pub fn render_lg(symbols: &[LgSymbol], relations: &[LgRelation]) -> String {
    let mut symbols: Vec<&LgSymbol> = symbols.iter().collect();
    symbols.sort_by(|a, b| a.id.cmp(&b.id));
    let mut relations: Vec<&LgRelation> = relations.iter().collect();
    relations.sort();

    let mut out = String::new();
    let _ = writeln!(out, "# {} symbols, {} relations", symbols.len(), relations.len());
    for s in symbols {
        let _ = write!(out, "O, {}, {}, 1.0", s.id, lg_encode_label(&s.label));
        for sid in &s.stroke_ids {
            let _ = write!(out, ", {sid}");
        }
        out.push('\n');
    }
    for r in relations {
        let _ = writeln!(out, "R, {}, {}, {}, 1.0", r.parent, r.child, r.relation);
    }
    out
}

pub fn write_lg(tree: &crate::slt_builder::SltTree) -> String {
    render_lg(&tree.nodes, &tree.edges)
}

// ---------------------------------------------------------------------------
// Preprocessing

/// Ramer–Douglas–Peucker simplification. Endpoints are always kept and every
/// dropped point lies within `epsilon` of the retained polyline.
pub fn resample_ramer(stroke: &Stroke, epsilon: f64) -> Stroke {
    let pts = &stroke.points;
    if pts.len() <= 2 {
        return stroke.clone();
    }
    let mut keep = vec![false; pts.len()];
    keep[0] = true;
    keep[pts.len() - 1] = true;
    let mut stack = vec![(0usize, pts.len() - 1)];
    while let Some((lo, hi)) = stack.pop() {
        if hi <= lo + 1 {
            continue;
        }
        let (mut best, mut best_d) = (lo, -1.0);
        for i in lo + 1..hi {
            let d = point_segment_distance(&pts[i], &pts[lo], &pts[hi]);
            if d > best_d {
                best = i;
                best_d = d;
            }
        }
        if best_d > epsilon {
            keep[best] = true;
            stack.push((lo, best));
            stack.push((best, hi));
        }
    }
    Stroke {
        id: stroke.id,
        points: pts
            .iter()
            .zip(&keep)
            .filter(|(_, k)| **k)
            .map(|(p, _)| *p)
            .collect(),
    }
}

/// Distance from `p` to the closed segment `a`–`b`.
pub fn point_segment_distance(p: &Point, a: &Point, b: &Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len_sq = dx * dx + dy * dy;
    if len_sq == 0.0 {
        return p.dist(a);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len_sq).clamp(0.0, 1.0);
    p.dist(&Point::new(a.x + t * dx, a.y + t * dy))
}

/// Uniformly rescales the ink so its bounding-box height equals
/// `target_height` (width when the ink is flat) and moves the min corner to
/// the origin.
pub fn normalize(expr: &InkExpression, target_height: f64) -> InkExpression {
    let mut out = expr.clone();
    let Some((x0, y0, x1, y1)) = expr.bounds() else {
        return out;
    };
    let (w, h) = (x1 - x0, y1 - y0);
    let scale = if h > 0.0 {
        target_height / h
    } else if w > 0.0 {
        target_height / w
    } else {
        1.0
    };
    for s in &mut out.strokes {
        for p in &mut s.points {
            p.x = (p.x - x0) * scale;
            p.y = (p.y - y0) * scale;
        }
    }
    out
}

/// Applies [`resample_ramer`] to every stroke.
pub fn resample_expression(expr: &InkExpression, epsilon: f64) -> InkExpression {
    let mut out = expr.clone();
    out.strokes = expr.strokes.iter().map(|s| resample_ramer(s, epsilon)).collect();
    out
}

/// One feature per point over the concatenated stroke sequence. Direction and
/// distance are measured from the previous point, across pen-ups; the first
/// point gets direction 0 (sin 0, cos 1) and distance 0.
pub fn extract_point_features(expr: &InkExpression, scale: f64) -> Vec<PointFeature> {
    let mut feats = Vec::with_capacity(expr.point_count());
    let mut prev: Option<Point> = None;
    for stroke in &expr.strokes {
        for (i, p) in stroke.points.iter().enumerate() {
            let pen_state = u8::from(i == 0);
            let (sin_dir, cos_dir, dist) = match prev {
                Some(q) => {
                    let d = q.dist(p);
                    if d > 0.0 {
                        ((p.y - q.y) / d, (p.x - q.x) / d, d)
                    } else {
                        (0.0, 1.0, 0.0)
                    }
                }
                None => (0.0, 1.0, 0.0),
            };
            feats.push(PointFeature { sin_dir, cos_dir, norm_dist: dist / scale, pen_state });
            prev = Some(*p);
        }
    }
    feats
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stroke(id: u32, pts: &[(f64, f64)]) -> Stroke {
        Stroke { id, points: pts.iter().map(|&(x, y)| Point::new(x, y)).collect() }
    }

    fn expr(strokes: Vec<Stroke>) -> InkExpression {
        InkExpression { id: "e".into(), strokes, annotations: None, ground_truth: None }
    }

    const ONE_TRACE: &str = r#"<ink xmlns="http://www.w3.org/2003/InkML">
<trace id="0">0 0, 10 0</trace>
</ink>"#;

    #[test]
    fn parses_single_trace() {
        let e = parse_inkml(ONE_TRACE.as_bytes()).unwrap();
        assert_eq!(e.strokes.len(), 1);
        assert_eq!(e.strokes[0].points, vec![Point::new(0.0, 0.0), Point::new(10.0, 0.0)]);
        assert!(e.annotations.is_none());
    }

    #[test]
    fn trace_group_becomes_annotation() {
        let src = r#"<ink xmlns="http://www.w3.org/2003/InkML">
<trace id="0">0 0 12, 1 1 13</trace>
<trace id="1">1 0, 0 1</trace>
<traceGroup xml:id="5"><annotation type="truth">Segmentation</annotation>
<traceGroup xml:id="6"><annotation type="truth">x</annotation>
<traceView traceDataRef="0"/><traceView traceDataRef="1"/>
<annotationXML href="x_1"/></traceGroup></traceGroup></ink>"#;
        let e = parse_inkml(src.as_bytes()).unwrap();
        // time channel dropped
        assert_eq!(e.strokes[0].points[1], Point::new(1.0, 1.0));
        let anns = e.annotations.unwrap();
        assert_eq!(anns.len(), 1);
        assert_eq!(anns[0].label, "x");
        assert_eq!(anns[0].symbol_id, "x_1");
        assert_eq!(anns[0].stroke_ids, BTreeSet::from([0, 1]));
    }

    #[test]
    fn inkml_errors() {
        assert!(matches!(
            parse_inkml(&ONE_TRACE.as_bytes()[..40]),
            Err(InkError::MalformedXml(_))
        ));
        let dangling = r#"<ink><trace id="0">0 0</trace><traceGroup><annotation type="truth">x</annotation><traceView traceDataRef="3"/></traceGroup></ink>"#;
        assert!(matches!(
            parse_inkml(dangling.as_bytes()),
            Err(InkError::DanglingTraceReference(_))
        ));
        assert!(matches!(parse_inkml(b"<ink></ink>"), Err(InkError::EmptyInk)));
    }

    #[test]
    fn inkml_write_parse() {
        let e = InkExpression {
            id: "demo".into(),
            strokes: vec![stroke(0, &[(0.5, 1.25), (3.0, 4.0)]), stroke(1, &[(7.0, 8.0)])],
            annotations: Some(vec![SymbolAnnotation {
                symbol_id: "s0".into(),
                label: "<".into(),
                stroke_ids: BTreeSet::from([0, 1]),
            }]),
            ground_truth: None,
        };
        let back = parse_inkml(write_inkml(&e).as_bytes()).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn parses_lg() {
        let g = parse_lg(b"O, s1, x, 1.0, 0\nO, s2, 2, 1.0, 1\nR, s1, s2, Sup, 1.0\n").unwrap();
        assert_eq!(g.symbols.len(), 2);
        assert_eq!(g.relations.len(), 1);
        assert_eq!(g.relations[0].relation, RelationLabel::Sup);

        let g = parse_lg(b"# only objects\nO,a,x,1.0,0\n\nO , b , y , 1.0 , 1, 2\n").unwrap();
        assert!(g.relations.is_empty());
        assert_eq!(g.symbols[1].stroke_ids, vec![1, 2]);

        let g = parse_lg(b"O, a, x, 1.0, 0\nO, b, y, 1.0, 1\nEO, a, b, Right, 1.0\n").unwrap();
        assert_eq!(g.relations[0].relation, RelationLabel::Right);
    }

    #[test]
    fn lg_errors() {
        let two_parents = b"O, a, x, 1.0\nO, b, y, 1.0\nO, c, z, 1.0\nR, a, c, Sup, 1.0\nR, b, c, Sub, 1.0\n";
        assert!(matches!(parse_lg(two_parents), Err(InkError::MultipleParents(c)) if c == "c"));
        assert!(matches!(
            parse_lg(b"O, a, x, 1.0\nR, a, q, Sup, 1.0\n"),
            Err(InkError::RelationToUnknownSymbol { .. })
        ));
        assert!(matches!(parse_lg(b"N, a, x, 1.0\n"), Err(InkError::UnknownLineTag { line: 1, .. })));
        assert!(matches!(
            parse_lg(b"O, a, x, 1.0\nO, b, y, 1.0\nR, a, b, Diagonal, 1.0\n"),
            Err(InkError::UnknownRelation(_))
        ));
    }

    #[test]
    fn comma_label_survives_lg() {
        let syms = vec![LgSymbol { id: "c".into(), label: ",".into(), stroke_ids: vec![3] }];
        let g = parse_lg(render_lg(&syms, &[]).as_bytes()).unwrap();
        assert_eq!(g.symbols, syms);
    }

    #[test]
    fn ramer_collinear_and_identity() {
        let s = stroke(0, &[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]);
        assert_eq!(resample_ramer(&s, 1e-9).points.len(), 2);
        let single = stroke(1, &[(3.0, 4.0)]);
        assert_eq!(resample_ramer(&single, 0.5), single);
        let corner = stroke(2, &[(0.0, 0.0), (5.0, 0.0), (5.0, 5.0)]);
        assert_eq!(resample_ramer(&corner, 0.1), corner);
    }

    #[test]
    fn normalize_scales_and_translates() {
        let e = expr(vec![stroke(0, &[(0.0, 0.0), (10.0, 20.0)])]);
        let n = normalize(&e, 100.0);
        assert_eq!(n.strokes[0].points, vec![Point::new(0.0, 0.0), Point::new(50.0, 100.0)]);

        let single = normalize(&expr(vec![stroke(0, &[(7.0, -3.0)])]), 100.0);
        assert_eq!(single.strokes[0].points[0], Point::new(0.0, 0.0));

        let flat = normalize(&expr(vec![stroke(0, &[(2.0, 5.0), (6.0, 5.0)])]), 100.0);
        assert_eq!(flat.strokes[0].points[1], Point::new(100.0, 0.0));
    }

    #[test]
    fn point_features() {
        let e = expr(vec![
            stroke(0, &[(0.0, 0.0), (3.0, 0.0)]),
            stroke(1, &[(3.0, 4.0)]),
        ]);
        let f = extract_point_features(&e, 100.0);
        assert_eq!(f.len(), 3);
        assert_eq!(f[0], PointFeature { sin_dir: 0.0, cos_dir: 1.0, norm_dist: 0.0, pen_state: 1 });
        assert_eq!(f[1].pen_state, 0);
        assert!((f[1].norm_dist - 0.03).abs() < 1e-12);
        assert_eq!((f[1].sin_dir, f[1].cos_dir), (0.0, 1.0));
        // vertical move into the second stroke
        assert_eq!((f[2].sin_dir, f[2].cos_dir), (1.0, 0.0));
        assert_eq!(f[2].pen_state, 1);
    }
}
