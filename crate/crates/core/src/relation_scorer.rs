//! Pairwise spatial-relation scoring.
//!
//! A [`RelationScorer`] returns a distribution over the six relations for a
//! directed symbol pair. Three implementations are provided: bbox geometry
//! rules, a table of externally computed scores loaded from CSV, and a
//! ground-truth oracle with controlled label noise.

use std::collections::{BTreeSet, HashMap};
use std::io::Read;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::geom::BBox;
use crate::ink_io::{normalize, InkExpression, Point, DEFAULT_TARGET_HEIGHT};
use crate::symbol_graph::{RelDist, RelationLabel, SymbolNode};

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error("pair {src} -> {dst} does not belong to expression `{expr}`")]
    PairNotInExpression { expr: String, src: String, dst: String },
    #[error("no score for {src} -> {dst} in expression `{expr}`")]
    MissingScore { expr: String, src: String, dst: String },
    #[error("expression `{0}` carries no ground truth")]
    MissingGroundTruth(String),
    #[error("bad score file header: {0}")]
    BadHeader(String),
    #[error("score row {row}: probabilities sum to {sum}")]
    RowNotNormalizable { row: usize, sum: f64 },
    #[error("score row {row}: {reason}")]
    BadRow { row: usize, reason: String },
    #[error("score file: {0}")]
    Csv(#[from] csv::Error),
    #[error("score file: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelationScore {
    pub rel_dist: RelDist,
    /// Mass of the most probable relation.
    pub confidence: f64,
}

impl RelationScore {
    pub fn from_dist(rel_dist: RelDist) -> Self {
        RelationScore { confidence: rel_dist.max(), rel_dist }
    }
}

pub trait RelationScorer: Send + Sync {
    /// Scores the directed pair `a -> b` of symbols in `ctx`. Pairs are
    /// normally queried in writing order, but implementations accept either
    /// direction.
    fn score_pair(&self, a: &SymbolNode, b: &SymbolNode, ctx: &InkExpression) -> Result<RelationScore, ScoreError>;
}

fn check_membership(a: &SymbolNode, b: &SymbolNode, ctx: &InkExpression) -> Result<(), ScoreError> {
    let known: BTreeSet<u32> = ctx.strokes.iter().map(|s| s.id).collect();
    let ok = |n: &SymbolNode| !n.stroke_ids.is_empty() && n.stroke_ids.is_subset(&known);
    if ok(a) && ok(b) {
        Ok(())
    } else {
        Err(ScoreError::PairNotInExpression {
            expr: ctx.id.clone(),
            src: a.symbol_id.clone(),
            dst: b.symbol_id.clone(),
        })
    }
}

// ---------------------------------------------------------------------------
// Geometric rules

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeometricConfig {
    /// Vertical center offset, as a fraction of the reference height, past
    /// which a right-side symbol is a script.
    pub script_offset: f64,
    /// Minimum horizontal overlap, as a fraction of the narrower box, for
    /// Above/Below.
    pub min_overlap: f64,
    /// Scripts may start this fraction of the parent's width before its right
    /// edge.
    pub right_slack: f64,
    /// Mass given to the fired rule; the rest follows the margin softmax.
    pub fired_mass: f64,
    /// Labels whose bbox can hold an Inside child.
    pub containers: Vec<String>,
}

impl Default for GeometricConfig {
    fn default() -> Self {
        GeometricConfig {
            script_offset: 0.25,
            min_overlap: 0.5,
            right_slack: 0.1,
            fired_mass: 0.7,
            containers: vec!["\\sqrt".into(), "-".into(), "\\frac".into()],
        }
    }
}

fn horizontal_overlap_ratio(a: &BBox, b: &BBox) -> f64 {
    let overlap = (a.max_x.min(b.max_x) - a.min_x.max(b.min_x)).max(0.0);
    let narrower = a.width().min(b.width());
    if narrower > 0.0 {
        overlap / narrower
    } else if a.min_x.max(b.min_x) <= a.max_x.min(b.max_x) {
        // a zero-width box lying within the other's x-range
        1.0
    } else {
        0.0
    }
}

/// Scale used to make all geometric quantities dimensionless. The taller of
/// the two boxes, so flat parents (minus, fraction bar) stay well defined.
fn reference_height(a: &BBox, b: &BBox) -> f64 {
    let h = a.height().max(b.height());
    if h > 0.0 {
        return h;
    }
    let w = a.width().max(b.width());
    if w > 0.0 {
        w
    } else {
        1.0
    }
}

/// Signed margin of every relation's decision rule; positive means the rule's
/// conditions hold. Clipped to [-1, 1].
pub fn rule_margins(a: &SymbolNode, b: &SymbolNode, cfg: &GeometricConfig) -> [f64; RelationLabel::COUNT] {
    let (ba, bb) = (&a.bbox, &b.bbox);
    let (ca, cb) = (ba.center(), bb.center());
    let h = reference_height(ba, bb);
    let past_right = (cb.x - ba.max_x) / h;
    let script_x = (cb.x - (ba.max_x - cfg.right_slack * ba.width())) / h;
    let up = (ca.y - cb.y) / h;
    let overlap = horizontal_overlap_ratio(ba, bb) - cfg.min_overlap;
    let containment = (bb.min_x - ba.min_x)
        .min(ba.max_x - bb.max_x)
        .min(bb.min_y - ba.min_y)
        .min(ba.max_y - bb.max_y)
        / h;
    let is_container = cfg.containers.iter().any(|c| *c == a.top_label);

    let mut m = [0.0; RelationLabel::COUNT];
    m[RelationLabel::Right.index()] = past_right.min(cfg.script_offset - up.abs());
    m[RelationLabel::Sup.index()] = script_x.min(up - cfg.script_offset);
    m[RelationLabel::Sub.index()] = script_x.min(-up - cfg.script_offset);
    m[RelationLabel::Above.index()] = overlap.min((ba.min_y - cb.y) / h);
    m[RelationLabel::Below.index()] = overlap.min((cb.y - ba.max_y) / h);
    m[RelationLabel::Inside.index()] = if is_container { containment } else { containment - 0.5 };
    m.map(|v| v.clamp(-1.0, 1.0))
}

/// The first rule (in order Inside, Above/Below, Sup/Sub, Right) whose
/// conditions hold.
pub fn fired_rule(a: &SymbolNode, b: &SymbolNode, cfg: &GeometricConfig) -> RelationLabel {
    let (ba, bb) = (&a.bbox, &b.bbox);
    let (ca, cb) = (ba.center(), bb.center());
    let h = reference_height(ba, bb);
    if ba.contains_box(bb) && cfg.containers.iter().any(|c| *c == a.top_label) {
        return RelationLabel::Inside;
    }
    if horizontal_overlap_ratio(ba, bb) >= cfg.min_overlap {
        if cb.y < ba.min_y {
            return RelationLabel::Above;
        }
        if cb.y > ba.max_y {
            return RelationLabel::Below;
        }
    }
    if cb.x > ba.max_x - cfg.right_slack * ba.width() {
        if ca.y - cb.y > cfg.script_offset * h {
            return RelationLabel::Sup;
        }
        if cb.y - ca.y > cfg.script_offset * h {
            return RelationLabel::Sub;
        }
    }
    RelationLabel::Right
}

/// Rule-based relation score: `fired_mass` on the fired rule plus the rest
/// spread by a softmax over the rule margins.
pub fn geometric_score(a: &SymbolNode, b: &SymbolNode, cfg: &GeometricConfig) -> RelationScore {
    let fired = fired_rule(a, b, cfg);
    let margins = rule_margins(a, b, cfg);
    let mx = margins.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exp = margins.map(|m| (m - mx).exp());
    let z: f64 = exp.iter().sum();
    let rest = 1.0 - cfg.fired_mass;
    let mut p = exp.map(|e| rest * e / z);
    p[fired.index()] += cfg.fired_mass;
    RelationScore::from_dist(RelDist(p))
}

/// The two-symbol ink sequence for a pair: `a`'s strokes followed by `b`'s,
/// normalized together.
pub fn pair_sequence(a: &SymbolNode, b: &SymbolNode, ctx: &InkExpression) -> Result<InkExpression, ScoreError> {
    check_membership(a, b, ctx)?;
    let strokes = a
        .stroke_ids
        .iter()
        .chain(b.stroke_ids.iter())
        .filter_map(|id| ctx.stroke(*id).cloned())
        .collect();
    let seq = InkExpression {
        id: format!("{}:{}:{}", ctx.id, a.symbol_id, b.symbol_id),
        strokes,
        annotations: None,
        ground_truth: None,
    };
    Ok(normalize(&seq, DEFAULT_TARGET_HEIGHT))
}

#[derive(Debug, Clone, Default)]
pub struct GeometricScorer {
    pub config: GeometricConfig,
}

impl RelationScorer for GeometricScorer {
    fn score_pair(&self, a: &SymbolNode, b: &SymbolNode, ctx: &InkExpression) -> Result<RelationScore, ScoreError> {
        let seq = pair_sequence(a, b, ctx)?;
        let rebuild = |n: &SymbolNode| -> SymbolNode {
            let pts: Vec<Point> = seq
                .strokes
                .iter()
                .filter(|s| n.stroke_ids.contains(&s.id))
                .flat_map(|s| s.points.iter().copied())
                .collect();
            let mut out = n.clone();
            if let Some(bbox) = BBox::from_points(&pts) {
                out.bbox = bbox;
            }
            out
        };
        Ok(geometric_score(&rebuild(a), &rebuild(b), &self.config))
    }
}

// ---------------------------------------------------------------------------
// File-backed scores

const SCORE_HEADER: [&str; 9] = ["expr_id", "src_symbol", "dst_symbol", "Right", "Sub", "Sup", "Above", "Below", "Inside"];

pub type ScoreTable = HashMap<(String, String, String), RelDist>;

/// Loads a pair-score CSV. Rows whose probabilities sum to within 1e-3 of one
/// are renormalized; others are rejected.
pub fn load_score_file(path: &Path) -> Result<ScoreTable, ScoreError> {
    read_score_table(std::fs::File::open(path)?)
}

pub fn read_score_table(reader: impl Read) -> Result<ScoreTable, ScoreError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != SCORE_HEADER {
        return Err(ScoreError::BadHeader(header.join(",")));
    }
    let mut table = ScoreTable::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        let mut p = [0.0; RelationLabel::COUNT];
        for (k, slot) in p.iter_mut().enumerate() {
            *slot = rec[3 + k]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite() && *v >= 0.0)
                .ok_or_else(|| ScoreError::BadRow { row, reason: format!("bad probability `{}`", &rec[3 + k]) })?;
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-3 + 1e-12 {
            return Err(ScoreError::RowNotNormalizable { row, sum });
        }
        let dist = RelDist(p.map(|v| v / sum));
        table.insert((rec[0].to_string(), rec[1].to_string(), rec[2].to_string()), dist);
    }
    Ok(table)
}

#[derive(Debug, Clone, Default)]
pub struct FileBackedScorer {
    pub table: ScoreTable,
}

impl RelationScorer for FileBackedScorer {
    fn score_pair(&self, a: &SymbolNode, b: &SymbolNode, ctx: &InkExpression) -> Result<RelationScore, ScoreError> {
        let key = (ctx.id.clone(), a.symbol_id.clone(), b.symbol_id.clone());
        self.table
            .get(&key)
            .map(|d| RelationScore::from_dist(*d))
            .ok_or_else(|| ScoreError::MissingScore { expr: key.0, src: key.1, dst: key.2 })
    }
}

// ---------------------------------------------------------------------------
// Noisy oracle

/// Ground-truth relation with probability `1 - noise_rate`, otherwise a
/// uniformly chosen wrong relation. Pairs without a ground-truth relation get
/// the geometric score.
#[derive(Debug, Clone, Default)]
pub struct NoisyOracleScorer {
    pub noise_rate: f64,
    pub seed: u64,
    pub geometric: GeometricScorer,
}

/// Per-call random stream keyed by (seed, expression, src, dst), so results do
/// not depend on query order.
pub fn pair_rng(seed: u64, expr: &str, src: &str, dst: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    for part in [expr, src, dst] {
        h.update((part.len() as u64).to_le_bytes());
        h.update(part.as_bytes());
    }
    let digest: [u8; 32] = h.finalize().into();
    ChaCha8Rng::from_seed(digest)
}

pub fn noisy_oracle_score(
    a: &SymbolNode,
    b: &SymbolNode,
    truth: Option<RelationLabel>,
    noise_rate: f64,
    rng: &mut impl Rng,
    geometric: &GeometricConfig,
) -> RelationScore {
    match truth {
        Some(label) => {
            let pick = if rng.gen::<f64>() < noise_rate {
                let wrong: Vec<RelationLabel> = RelationLabel::ALL.into_iter().filter(|r| *r != label).collect();
                wrong[rng.gen_range(0..wrong.len())]
            } else {
                label
            };
            RelationScore::from_dist(RelDist::one_hot(pick))
        }
        None => geometric_score(a, b, geometric),
    }
}

impl RelationScorer for NoisyOracleScorer {
    fn score_pair(&self, a: &SymbolNode, b: &SymbolNode, ctx: &InkExpression) -> Result<RelationScore, ScoreError> {
        check_membership(a, b, ctx)?;
        let gt = ctx
            .ground_truth
            .as_ref()
            .ok_or_else(|| ScoreError::MissingGroundTruth(ctx.id.clone()))?;
        let truth = gt
            .relations
            .iter()
            .find(|r| r.parent == a.symbol_id && r.child == b.symbol_id)
            .map(|r| r.relation);
        if truth.is_none() {
            return self.geometric.score_pair(a, b, ctx);
        }
        let mut rng = pair_rng(self.seed, &ctx.id, &a.symbol_id, &b.symbol_id);
        Ok(noisy_oracle_score(a, b, truth, self.noise_rate, &mut rng, &self.geometric.config))
    }
}

// ---------------------------------------------------------------------------
// Configuration

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScorerKind {
    Geometric,
    FileBacked,
    NoisyOracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScorerConfig {
    pub kind: ScorerKind,
    pub noise_rate: f64,
    pub score_file: Option<PathBuf>,
    pub seed: u64,
    pub geometric: GeometricConfig,
}

impl Default for ScorerConfig {
    fn default() -> Self {
        ScorerConfig {
            kind: ScorerKind::NoisyOracle,
            noise_rate: 0.0,
            score_file: None,
            seed: 0,
            geometric: GeometricConfig::default(),
        }
    }
}

pub fn build_scorer(cfg: &ScorerConfig) -> Result<Box<dyn RelationScorer>, ScoreError> {
    let geometric = GeometricScorer { config: cfg.geometric.clone() };
    Ok(match cfg.kind {
        ScorerKind::Geometric => Box::new(geometric),
        ScorerKind::FileBacked => {
            let path = cfg
                .score_file
                .as_ref()
                .ok_or_else(|| std::io::Error::new(std::io::ErrorKind::NotFound, "score_file not configured"))?;
            Box::new(FileBackedScorer { table: load_score_file(path)? })
        }
        ScorerKind::NoisyOracle => Box::new(NoisyOracleScorer { noise_rate: cfg.noise_rate, seed: cfg.seed, geometric }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ink_io::{GroundTruthGraph, LgRelation, LgSymbol, Stroke, SymbolAnnotation};

    fn boxed(id: &str, label: &str, x0: f64, y0: f64, x1: f64, y1: f64) -> SymbolNode {
        let pts = [Point::new(x0, y0), Point::new(x1, y0), Point::new(x1, y1), Point::new(x0, y1)];
        SymbolNode::from_points(id, label, BTreeSet::new(), &pts).unwrap()
    }

    fn sums_to_one(s: &RelationScore) {
        assert!((s.rel_dist.sum() - 1.0).abs() < 1e-9);
        assert_eq!(s.confidence, s.rel_dist.max());
    }

    #[test]
    fn right_neighbour() {
        let a = boxed("a", "x", 0.0, 0.0, 1.0, 1.0);
        let b = boxed("b", "y", 1.3, 0.0, 2.3, 1.0);
        let s = geometric_score(&a, &b, &GeometricConfig::default());
        assert_eq!(s.rel_dist.argmax(), RelationLabel::Right);
        assert!(s.confidence >= 0.7);
        sums_to_one(&s);
    }

    #[test]
    fn coincident_centers_are_ambiguous() {
        // margins by hand: Right -0.5, Sub/Sup -0.4, Above/Below/Inside -0.5
        let a = boxed("a", "x", 0.0, 0.0, 1.0, 1.0);
        let b = boxed("b", "y", 0.0, 0.0, 1.0, 1.0);
        let s = geometric_score(&a, &b, &GeometricConfig::default());
        let expected = [
            0.7483065196594585,
            0.05338696068108305,
            0.05338696068108305,
            0.04830651965945849,
            0.04830651965945849,
            0.04830651965945849,
        ];
        for k in 0..6 {
            assert!((s.rel_dist.0[k] - expected[k]).abs() < 1e-12);
        }
        assert_eq!(s.rel_dist.argmax(), RelationLabel::Right);
        assert!(s.confidence < 0.75);
    }

    #[test]
    fn superscript() {
        let a = boxed("a", "x", 0.0, 0.0, 1.0, 1.0);
        let b = boxed("b", "2", 1.05, -0.3, 1.65, 0.3);
        assert_eq!(fired_rule(&a, &b, &GeometricConfig::default()), RelationLabel::Sup);
        assert_eq!(geometric_score(&a, &b, &GeometricConfig::default()).rel_dist.argmax(), RelationLabel::Sup);
    }

    #[test]
    fn inside_sqrt() {
        let a = boxed("a", "\\sqrt", 0.0, 0.0, 3.0, 1.5);
        let b = boxed("b", "x", 1.0, 0.3, 2.0, 1.2);
        assert_eq!(geometric_score(&a, &b, &GeometricConfig::default()).rel_dist.argmax(), RelationLabel::Inside);
        // same geometry under a non-container label falls through
        let a = boxed("a", "x", 0.0, 0.0, 3.0, 1.5);
        assert_ne!(fired_rule(&a, &b, &GeometricConfig::default()), RelationLabel::Inside);
    }

    #[test]
    fn fraction_bar_children() {
        let bar = boxed("bar", "-", 0.0, 1.0, 3.0, 1.0);
        let num = boxed("n", "1", 1.0, -0.2, 1.6, 0.8);
        let den = boxed("d", "2", 1.0, 1.2, 1.6, 2.2);
        let cfg = GeometricConfig::default();
        assert_eq!(fired_rule(&bar, &num, &cfg), RelationLabel::Above);
        assert_eq!(fired_rule(&bar, &den, &cfg), RelationLabel::Below);
    }

    #[test]
    fn invariant_under_similarity() {
        let cfg = GeometricConfig::default();
        let a = boxed("a", "x", 0.0, 0.0, 1.0, 1.0);
        let b = boxed("b", "2", 1.05, -0.3, 1.65, 0.3);
        let base = geometric_score(&a, &b, &cfg);
        let (s, tx, ty) = (37.5, -12.0, 400.0);
        let m = |n: &SymbolNode| {
            boxed(&n.symbol_id, &n.top_label, n.bbox.min_x * s + tx, n.bbox.min_y * s + ty, n.bbox.max_x * s + tx, n.bbox.max_y * s + ty)
        };
        let moved = geometric_score(&m(&a), &m(&b), &cfg);
        for k in 0..6 {
            assert!((base.rel_dist.0[k] - moved.rel_dist.0[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn score_table_rules() {
        let ok = "expr_id,src_symbol,dst_symbol,Right,Sub,Sup,Above,Below,Inside\ne,a,b,0.9,0.1,0,0,0,0\ne,a,c,0.999,0,0,0,0,0\n";
        let t = read_score_table(ok.as_bytes()).unwrap();
        assert_eq!(t[&("e".into(), "a".into(), "b".into())].0, [0.9, 0.1, 0.0, 0.0, 0.0, 0.0]);
        assert!((t[&("e".into(), "a".into(), "c".into())].sum() - 1.0).abs() < 1e-12);

        let half = "expr_id,src_symbol,dst_symbol,Right,Sub,Sup,Above,Below,Inside\ne,a,b,0.5,0,0,0,0,0\n";
        assert!(matches!(read_score_table(half.as_bytes()), Err(ScoreError::RowNotNormalizable { .. })));
        assert!(matches!(read_score_table("a,b\n".as_bytes()), Err(ScoreError::BadHeader(_))));
    }

    fn two_symbol_expr() -> (InkExpression, SymbolNode, SymbolNode) {
        let sq = |id: u32, x: f64, y: f64, s: f64| Stroke {
            id,
            points: vec![Point::new(x, y), Point::new(x + s, y), Point::new(x + s, y + s), Point::new(x, y + s)],
        };
        let strokes = vec![sq(0, 0.0, 0.0, 10.0), sq(1, 10.5, -3.0, 6.0)];
        let anns = vec![
            SymbolAnnotation { symbol_id: "x".into(), label: "x".into(), stroke_ids: BTreeSet::from([0]) },
            SymbolAnnotation { symbol_id: "2".into(), label: "2".into(), stroke_ids: BTreeSet::from([1]) },
        ];
        let gt = GroundTruthGraph {
            symbols: vec![
                LgSymbol { id: "x".into(), label: "x".into(), stroke_ids: vec![0] },
                LgSymbol { id: "2".into(), label: "2".into(), stroke_ids: vec![1] },
            ],
            relations: vec![LgRelation { parent: "x".into(), child: "2".into(), relation: RelationLabel::Sup }],
        };
        let e = InkExpression { id: "e".into(), strokes, annotations: Some(anns), ground_truth: Some(gt) };
        let nodes = crate::symbol_graph::symbol_nodes(&e).unwrap();
        (e, nodes[0].clone(), nodes[1].clone())
    }

    #[test]
    fn oracle_scores() {
        let (e, x, two) = two_symbol_expr();
        let clean = NoisyOracleScorer { noise_rate: 0.0, seed: 3, ..Default::default() };
        let s = clean.score_pair(&x, &two, &e).unwrap();
        assert_eq!(s.rel_dist, RelDist::one_hot(RelationLabel::Sup));
        assert_eq!(s.confidence, 1.0);

        let broken = NoisyOracleScorer { noise_rate: 1.0, seed: 3, ..Default::default() };
        for seed in 0..50 {
            let scorer = NoisyOracleScorer { seed, ..broken.clone() };
            let s = scorer.score_pair(&x, &two, &e).unwrap();
            assert_ne!(s.rel_dist.argmax(), RelationLabel::Sup);
            assert_eq!(s.confidence, 1.0);
        }

        let noisy = NoisyOracleScorer { noise_rate: 0.5, seed: 11, ..Default::default() };
        assert_eq!(noisy.score_pair(&x, &two, &e).unwrap(), noisy.score_pair(&x, &two, &e).unwrap());

        // reverse pair is not a relation: geometric fallback, still normalized
        sums_to_one(&clean.score_pair(&two, &x, &e).unwrap());
    }

    #[test]
    fn file_backed_missing_pair() {
        let (e, x, two) = two_symbol_expr();
        let s = FileBackedScorer::default();
        assert!(matches!(s.score_pair(&x, &two, &e), Err(ScoreError::MissingScore { .. })));
    }

    #[test]
    fn foreign_pair_rejected() {
        let (e, x, _) = two_symbol_expr();
        let mut stranger = x.clone();
        stranger.stroke_ids = BTreeSet::from([99]);
        assert!(matches!(
            GeometricScorer::default().score_pair(&x, &stranger, &e),
            Err(ScoreError::PairNotInExpression { .. })
        ));
    }

    #[test]
    fn geometric_scorer_matches_direct_rule() {
        let (e, x, two) = two_symbol_expr();
        let via_seq = GeometricScorer::default().score_pair(&x, &two, &e).unwrap();
        let direct = geometric_score(&x, &two, &GeometricConfig::default());
        for k in 0..6 {
            assert!((via_seq.rel_dist.0[k] - direct.rel_dist.0[k]).abs() < 1e-12);
        }
        assert_eq!(direct.rel_dist.argmax(), RelationLabel::Sup);
    }
}
