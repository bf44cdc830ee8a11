//! CYK chart parsing over symbols in writing order, used to propose candidate
//! relation edges.
//!
//! Cells cover contiguous writing-order spans and keep the best item per
//! nonterminal. Every admitted combination (not only the cell winners)
//! contributes its attachment edge to the proposal set, so the product is the
//! set of all pairwise relations the grammar and the scorer consider
//! plausible.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ink_io::InkExpression;
use crate::relation_scorer::{RelationScore, RelationScorer, ScoreError};
use crate::symbol_graph::{CandidateEdge, RelDist, RelationLabel, SourceTag, SymbolNode};

pub const DEFAULT_THETA: f64 = 0.05;

#[derive(Debug, Error)]
pub enum GrammarError {
    #[error("line {line}: syntax error: {reason}")]
    SyntaxError { line: usize, reason: String },
    #[error("line {line}: unknown relation `{name}`")]
    UnknownRelation { line: usize, name: String },
    #[error("line {line}: {reason}")]
    ValidationError { line: usize, reason: String },
    #[error("grammar has no productions")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Production {
    pub lhs: String,
    pub left: String,
    pub right: String,
    pub relation: RelationLabel,
    pub prior: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grammar {
    pub productions: Vec<Production>,
    /// Symbol class to nonterminal. The key `*` matches any class.
    pub terminals: BTreeMap<String, String>,
    pub start: String,
}

pub const DEFAULT_GRAMMAR: &str = "\
# Permissive grammar: any two expressions combine under any relation.
start EXP
EXP -> EXP EXP : Right : 1.0
EXP -> EXP EXP : Sub : 1.0
EXP -> EXP EXP : Sup : 1.0
EXP -> EXP EXP : Above : 1.0
EXP -> EXP EXP : Below : 1.0
EXP -> EXP EXP : Inside : 1.0
term * -> EXP
";

impl Default for Grammar {
    fn default() -> Self {
        load_grammar(DEFAULT_GRAMMAR).expect("embedded grammar is valid")
    }
}

impl Grammar {
    pub fn terminal_for(&self, class: &str) -> Option<&str> {
        self.terminals
            .get(class)
            .or_else(|| self.terminals.get("*"))
            .map(String::as_str)
    }
}

/// Parses the grammar text format:
///
/// ```text
/// start EXP
/// EXP -> EXP EXP : Sup : 0.2
/// term x -> EXP
/// ```
///
/// The start symbol defaults to the first production's left-hand side.
pub fn load_grammar(text: &str) -> Result<Grammar, GrammarError> {
    let mut productions = Vec::new();
    let mut terminals = BTreeMap::new();
    let mut start = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |reason: &str| GrammarError::SyntaxError { line: line_no, reason: reason.to_string() };
        if let Some(rest) = line.strip_prefix("start ") {
            start = Some(rest.trim().to_string());
            continue;
        }
        if let Some(rest) = line.strip_prefix("term ") {
            let (class, nt) = rest.split_once("->").ok_or_else(|| syntax("expected `term CLASS -> NT`"))?;
            let (class, nt) = (class.trim(), nt.trim());
            if class.is_empty() || nt.is_empty() || nt.contains(char::is_whitespace) {
                return Err(syntax("expected `term CLASS -> NT`"));
            }
            if terminals.insert(class.to_string(), nt.to_string()).is_some() {
                return Err(GrammarError::ValidationError {
                    line: line_no,
                    reason: format!("class `{class}` mapped twice"),
                });
            }
            continue;
        }
        let parts: Vec<&str> = line.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(syntax("expected `LHS -> A B : REL : prior`"));
        }
        let (lhs, rhs) = parts[0].split_once("->").ok_or_else(|| syntax("missing `->`"))?;
        let rhs: Vec<&str> = rhs.split_whitespace().collect();
        let lhs = lhs.trim();
        if rhs.len() != 2 || lhs.is_empty() || lhs.contains(char::is_whitespace) {
            return Err(syntax("productions are binary: `LHS -> A B`"));
        }
        let relation: RelationLabel = parts[1].parse().map_err(|_| GrammarError::UnknownRelation {
            line: line_no,
            name: parts[1].to_string(),
        })?;
        let prior: f64 = parts[2].parse().map_err(|_| syntax("prior is not a number"))?;
        if !(prior > 0.0 && prior <= 1.0) {
            return Err(GrammarError::ValidationError {
                line: line_no,
                reason: format!("prior {prior} outside (0, 1]"),
            });
        }
        productions.push(Production {
            lhs: lhs.to_string(),
            left: rhs[0].to_string(),
            right: rhs[1].to_string(),
            relation,
            prior,
        });
    }
    let first = productions.first().ok_or(GrammarError::Empty)?;
    let start = start.unwrap_or_else(|| first.lhs.clone());
    Ok(Grammar { productions, terminals, start })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeadRule {
    /// The combined item attaches through its left child's head.
    #[default]
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CykOptions {
    /// A combination is admitted only if the scorer's mass on the production's
    /// relation exceeds this.
    pub theta: f64,
    pub head_rule: HeadRule,
}

impl Default for CykOptions {
    fn default() -> Self {
        CykOptions { theta: DEFAULT_THETA, head_rule: HeadRule::Left }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChartItem {
    pub span: (usize, usize),
    pub nonterminal: String,
    /// Log-probability; never positive.
    pub score: f64,
    pub head: usize,
    pub edges_used: BTreeSet<(usize, usize, RelationLabel)>,
}

/// A proposed `(src, dst)` relation with the score of the best chart item
/// that introduced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Proposal {
    pub src: usize,
    pub dst: usize,
    pub score: RelationScore,
    pub item_score: f64,
}

#[derive(Debug, Clone)]
pub struct Chart {
    pub n: usize,
    /// `cells[i][j - i]` holds the items spanning `i..=j`, keyed by
    /// nonterminal.
    pub cells: Vec<Vec<BTreeMap<String, ChartItem>>>,
    pub proposals: BTreeMap<(usize, usize), Proposal>,
    /// False when no start item covers the whole expression.
    pub parsed: bool,
}

impl Chart {
    pub fn cell(&self, i: usize, j: usize) -> &BTreeMap<String, ChartItem> {
        &self.cells[i][j - i]
    }

    /// Adds a proposal, keeping the one from the higher-scoring item when the
    /// pair is already present.
    pub fn propose(&mut self, p: Proposal) {
        match self.proposals.get(&(p.src, p.dst)) {
            Some(existing) if existing.item_score >= p.item_score => {}
            _ => {
                self.proposals.insert((p.src, p.dst), p);
            }
        }
    }
}

/// Runs CYK over `nodes` (already in writing order).
pub fn cyk_parse(
    expr: &InkExpression,
    nodes: &[SymbolNode],
    grammar: &Grammar,
    scorer: &dyn RelationScorer,
    opts: &CykOptions,
) -> Result<Chart, ScoreError> {
    let n = nodes.len();
    let mut chart = Chart {
        n,
        cells: (0..n).map(|i| vec![BTreeMap::new(); n - i]).collect(),
        proposals: BTreeMap::new(),
        parsed: false,
    };
    for (i, node) in nodes.iter().enumerate() {
        if let Some(nt) = grammar.terminal_for(&node.top_label) {
            chart.cells[i][0].insert(
                nt.to_string(),
                ChartItem {
                    span: (i, i),
                    nonterminal: nt.to_string(),
                    score: 0.0,
                    head: i,
                    edges_used: BTreeSet::new(),
                },
            );
        }
    }

    let mut by_children: HashMap<(&str, &str), Vec<&Production>> = HashMap::new();
    for p in &grammar.productions {
        by_children.entry((p.left.as_str(), p.right.as_str())).or_default().push(p);
    }
    let mut memo: HashMap<(usize, usize), RelationScore> = HashMap::new();

    for len in 2..=n {
        for i in 0..=n - len {
            let j = i + len - 1;
            let mut best: BTreeMap<String, ChartItem> = BTreeMap::new();
            for k in i..j {
                let lefts: Vec<ChartItem> = chart.cell(i, k).values().cloned().collect();
                let rights: Vec<ChartItem> = chart.cell(k + 1, j).values().cloned().collect();
                for l in &lefts {
                    for r in &rights {
                        let Some(prods) = by_children.get(&(l.nonterminal.as_str(), r.nonterminal.as_str())) else {
                            continue;
                        };
                        let pair = (l.head, r.head);
                        let score = match memo.get(&pair) {
                            Some(s) => *s,
                            None => {
                                let s = scorer.score_pair(&nodes[pair.0], &nodes[pair.1], expr)?;
                                memo.insert(pair, s);
                                s
                            }
                        };
                        for p in prods {
                            let mass = score.rel_dist.get(p.relation);
                            if mass <= opts.theta {
                                continue;
                            }
                            let total = l.score + r.score + p.prior.ln() + mass.ln();
                            chart.propose(Proposal { src: pair.0, dst: pair.1, score, item_score: total });
                            if best.get(&p.lhs).is_some_and(|b| b.score >= total) {
                                continue;
                            }
                            let mut edges_used = l.edges_used.clone();
                            edges_used.extend(r.edges_used.iter().copied());
                            edges_used.insert((pair.0, pair.1, p.relation));
                            let head = match opts.head_rule {
                                HeadRule::Left => l.head,
                                HeadRule::Right => r.head,
                            };
                            best.insert(
                                p.lhs.clone(),
                                ChartItem { span: (i, j), nonterminal: p.lhs.clone(), score: total, head, edges_used },
                            );
                        }
                    }
                }
            }
            chart.cells[i][len - 1] = best;
        }
    }
    chart.parsed = n > 0 && chart.cell(0, n - 1).contains_key(&grammar.start);
    Ok(chart)
}

/// Deduplicated proposal set as CYK-tagged candidate edges, ordered by
/// (src, dst) writing-order index.
pub fn proposed_edges(chart: &Chart, nodes: &[SymbolNode]) -> Vec<CandidateEdge> {
    chart
        .proposals
        .values()
        .map(|p| CandidateEdge {
            src: nodes[p.src].symbol_id.clone(),
            dst: nodes[p.dst].symbol_id.clone(),
            rel_dist: p.score.rel_dist,
            confidence: p.score.confidence,
            source_tag: SourceTag::Cyk,
        })
        .collect()
}

/// One-hot relation score, handy for grammars driven by hard decisions.
pub fn hard_score(label: RelationLabel) -> RelationScore {
    RelationScore::from_dist(RelDist::one_hot(label))
}
