//! Link accuracy, structure and expression rates, and report rendering.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ink_io::GroundTruthGraph;
use crate::slt_builder::{EdgeProbs, SltTree};

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("probability and label key sets differ")]
    KeyMismatch,
    #[error("expression `{0}` missing from one side")]
    MissingExpression(String),
    #[error("no expressions to report")]
    EmptyReport,
}

/// Percentage of candidate edges whose decision `p >= tau` matches the label.
pub fn link_accuracy(probs: &EdgeProbs, labels: &BTreeMap<(String, String), bool>, tau: f64) -> Result<f64, EvalError> {
    let (correct, total) = link_counts(probs, labels, tau)?;
    Ok(if total == 0 { 100.0 } else { 100.0 * correct as f64 / total as f64 })
}

/// `(correct, total)` thresholded link decisions.
pub fn link_counts(
    probs: &EdgeProbs,
    labels: &BTreeMap<(String, String), bool>,
    tau: f64,
) -> Result<(usize, usize), EvalError> {
    if probs.len() != labels.len() || probs.keys().any(|k| !labels.contains_key(k)) {
        return Err(EvalError::KeyMismatch);
    }
    let correct = probs.iter().filter(|(k, &p)| (p >= tau) == labels[*k]).count();
    Ok((correct, probs.len()))
}

/// Same relation-labelled edge set as the ground truth.
pub fn structure_ok(pred: &SltTree, gt: &GroundTruthGraph) -> bool {
    let want: BTreeSet<_> = gt.relations.iter().map(|r| (r.parent.clone(), r.child.clone(), r.relation)).collect();
    pred.triples() == want
}

/// Structure plus identical symbol ids and labels.
pub fn expression_ok(pred: &SltTree, gt: &GroundTruthGraph) -> bool {
    let labels = |it: &mut dyn Iterator<Item = (&String, &String)>| -> BTreeMap<String, String> {
        it.map(|(a, b)| (a.clone(), b.clone())).collect()
    };
    structure_ok(pred, gt)
        && labels(&mut pred.nodes.iter().map(|n| (&n.id, &n.label)))
            == labels(&mut gt.symbols.iter().map(|s| (&s.id, &s.label)))
}

fn rate(
    pred: &BTreeMap<String, SltTree>,
    gt: &BTreeMap<String, GroundTruthGraph>,
    ok: fn(&SltTree, &GroundTruthGraph) -> bool,
) -> Result<f64, EvalError> {
    for id in pred.keys().chain(gt.keys()) {
        if !pred.contains_key(id) || !gt.contains_key(id) {
            return Err(EvalError::MissingExpression(id.clone()));
        }
    }
    if gt.is_empty() {
        return Err(EvalError::EmptyReport);
    }
    let hits = gt.iter().filter(|(id, g)| ok(&pred[*id], g)).count();
    Ok(100.0 * hits as f64 / gt.len() as f64)
}

pub fn structure_rate(pred: &BTreeMap<String, SltTree>, gt: &BTreeMap<String, GroundTruthGraph>) -> Result<f64, EvalError> {
    rate(pred, gt, structure_ok)
}

pub fn expression_rate(pred: &BTreeMap<String, SltTree>, gt: &BTreeMap<String, GroundTruthGraph>) -> Result<f64, EvalError> {
    rate(pred, gt, expression_ok)
}

/// Per-expression evaluation counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub id: String,
    pub symbols: usize,
    pub gt_edges: usize,
    pub candidate_edges: usize,
    /// Ground-truth edges present among the candidates.
    pub covered_edges: usize,
    pub link_correct: usize,
    pub link_total: usize,
    pub structure_ok: bool,
    pub expression_ok: bool,
}

impl EvalRow {
    pub fn coverage(&self) -> f64 {
        if self.gt_edges == 0 {
            100.0
        } else {
            100.0 * self.covered_edges as f64 / self.gt_edges as f64
        }
    }

    pub fn redundancy(&self) -> Option<f64> {
        (self.gt_edges > 0).then(|| 100.0 * (self.candidate_edges as f64 - self.gt_edges as f64) / self.gt_edges as f64)
    }

    pub fn link_acc(&self) -> f64 {
        if self.link_total == 0 {
            100.0
        } else {
            100.0 * self.link_correct as f64 / self.link_total as f64
        }
    }
}

/// Dataset-level figures, all micro-averaged over edges except the
/// per-expression rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub expressions: usize,
    pub coverage: f64,
    /// Share of expressions whose ground truth is fully covered.
    pub coverage_expr: f64,
    pub redundancy: Option<f64>,
    pub link_acc: f64,
    /// Share of expressions with every link decision correct.
    pub link_acc_expr: f64,
    pub structure_rate: f64,
    pub expression_rate: f64,
}

impl Aggregates {
    pub fn from_rows(rows: &[EvalRow]) -> Result<Aggregates, EvalError> {
        if rows.is_empty() {
            return Err(EvalError::EmptyReport);
        }
        let sum = |f: fn(&EvalRow) -> usize| rows.iter().map(f).sum::<usize>();
        let pct = |num: usize, den: usize| if den == 0 { 100.0 } else { 100.0 * num as f64 / den as f64 };
        let share = |f: fn(&EvalRow) -> bool| pct(rows.iter().filter(|r| f(r)).count(), rows.len());
        let gt = sum(|r| r.gt_edges);
        Ok(Aggregates {
            expressions: rows.len(),
            coverage: pct(sum(|r| r.covered_edges), gt),
            coverage_expr: share(|r| r.covered_edges == r.gt_edges),
            redundancy: (gt > 0).then(|| 100.0 * (sum(|r| r.candidate_edges) as f64 - gt as f64) / gt as f64),
            link_acc: pct(sum(|r| r.link_correct), sum(|r| r.link_total)),
            link_acc_expr: share(|r| r.link_correct == r.link_total),
            structure_rate: share(|r| r.structure_ok),
            expression_rate: share(|r| r.expression_ok),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub variant: String,
    pub rows: Vec<EvalRow>,
    pub aggregates: Aggregates,
    pub config: serde_json::Value,
}

/// Sorts rows by expression id and aggregates them.
pub fn report(variant: &str, mut rows: Vec<EvalRow>, config: serde_json::Value) -> Result<EvalReport, EvalError> {
    rows.sort_by(|a, b| a.id.cmp(&b.id));
    let aggregates = Aggregates::from_rows(&rows)?;
    Ok(EvalReport { variant: variant.to_string(), rows, aggregates, config })
}

pub const TABLE_COLUMNS: [&str; 6] = ["Variant", "Cov.", "Red.", "Link acc.", "Exp.", "Struct."];

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn table_row(&self) -> [String; 6] {
        let a = &self.aggregates;
        [
            self.variant.clone(),
            format!("{:.2} ({:.2})", a.coverage, a.coverage_expr),
            a.redundancy.map_or_else(|| "n/a".to_string(), |r| format!("{r:.2}")),
            format!("{:.2} ({:.2})", a.link_acc, a.link_acc_expr),
            format!("{:.2}", a.expression_rate),
            format!("{:.2}", a.structure_rate),
        ]
    }
}

/// Aligned plain-text table, one line per report.
pub fn render_table(reports: &[&EvalReport]) -> String {
    let mut lines: Vec<[String; 6]> = vec![TABLE_COLUMNS.map(str::to_string)];
    lines.extend(reports.iter().map(|r| r.table_row()));
    let widths: Vec<usize> = (0..6).map(|c| lines.iter().map(|l| l[c].len()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for (i, l) in lines.iter().enumerate() {
        let cells: Vec<String> = l
            .iter()
            .enumerate()
            .map(|(c, s)| if c == 0 { format!("{s:<w$}", w = widths[c]) } else { format!("{s:>w$}", w = widths[c]) })
            .collect();
        let _ = writeln!(out, "{}", cells.join("  ").trim_end());
        if i == 0 {
            let _ = writeln!(out, "{}", "-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
        }
    }
    out
}
