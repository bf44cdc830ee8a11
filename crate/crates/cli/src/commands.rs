use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use hme_core::cyk_parser::{load_grammar, Grammar};
use hme_core::egat::Checkpoint;
use hme_core::eval_metrics::{expression_ok, link_counts, render_table, report, structure_ok, EvalRow};
use hme_core::ink_io::{parse_inkml, parse_lg, write_inkml, write_lg, GroundTruthGraph, SymbolAnnotation};
use hme_core::pipeline::{build_primitive_graph, fit, predict_tree, PipelineError};
use hme_core::relation_scorer::build_scorer;
use hme_core::slt_builder::{slt_to_latex, SltTree};
use hme_core::symbol_graph::{PrimitiveGraph, ToDot};
use hme_core::synth_gen::generate_dataset;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::PipelineConfig;
use crate::CliError;

/// One `build-graph` output file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphFile {
    pub id: String,
    pub graph: PrimitiveGraph,
    pub ground_truth: Option<GroundTruthGraph>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgePrediction {
    pub src: String,
    pub dst: String,
    pub prob: f64,
}

/// Per-expression link probabilities written by `predict`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbFile {
    pub id: String,
    pub edges: Vec<EdgePrediction>,
    pub dropped_parents: usize,
    pub used_arborescence: bool,
    pub stranded: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BuildRow {
    pub id: String,
    pub symbols: usize,
    pub gt_edges: Option<usize>,
    pub candidate_edges: usize,
    pub covered_edges: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BuildReport {
    pub edge_source: String,
    pub rows: Vec<BuildRow>,
    pub coverage: Option<f64>,
    pub redundancy: Option<f64>,
    pub config: serde_json::Value,
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| io_err(path, e))
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

fn ensure_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|e| io_err(path, e))
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn from_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    serde_json::from_slice(&read(path)?).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Files in `dir` whose name ends with `suffix`, sorted by name.
fn files_with_suffix(dir: &Path, suffix: &str) -> Result<Vec<PathBuf>, CliError> {
    let entries = fs::read_dir(dir).map_err(|e| io_err(dir, e))?;
    let mut out = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| io_err(dir, e))?.path();
        if path.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.ends_with(suffix)) {
            out.push(path);
        }
    }
    out.sort();
    if out.is_empty() {
        return Err(CliError::Data(format!("no *{suffix} files in {}", dir.display())));
    }
    Ok(out)
}

fn stem(path: &Path, suffix: &str) -> String {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
    name.strip_suffix(suffix).unwrap_or(name).to_string()
}

fn pool(cfg: &PipelineConfig) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}

fn grammar(cfg: &PipelineConfig) -> Result<Grammar, CliError> {
    match &cfg.grammar_path {
        None => Ok(Grammar::default()),
        Some(p) => {
            let text = String::from_utf8(read(p)?).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?;
            Ok(load_grammar(&text).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?)
        }
    }
}

fn percent(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| 100.0 * num as f64 / den as f64)
}

fn redundancy_percent(candidates: usize, gt: usize) -> Option<f64> {
    (gt > 0).then(|| 100.0 * (candidates as f64 - gt as f64) / gt as f64)
}

// ---------------------------------------------------------------------------

/// Writes `<id>.inkml`, `<id>.lg` and `manifest.json` into `out`.
pub fn cmd_synth(cfg: &PipelineConfig, out: &Path) -> Result<String, CliError> {
    let (pairs, manifest) = generate_dataset(&cfg.synth).map_err(|e| CliError::Usage(e.to_string()))?;
    ensure_dir(out)?;
    for (expr, gt) in &pairs {
        write(&out.join(format!("{}.inkml", expr.id)), write_inkml(expr))?;
        let tree = SltTree::from_ground_truth(gt).map_err(PipelineError::from)?;
        write(&out.join(format!("{}.lg", expr.id)), write_lg(&tree))?;
    }
    write(&out.join("manifest.json"), to_json(&manifest))?;
    Ok(format!("wrote {} expressions to {}\n", pairs.len(), out.display()))
}

fn check_annotations(gt: &GroundTruthGraph, anns: &Option<Vec<SymbolAnnotation>>, id: &str) -> Result<(), CliError> {
    let ids: BTreeSet<&str> = anns.iter().flatten().map(|a| a.symbol_id.as_str()).collect();
    if ids != gt.symbol_ids() {
        return Err(CliError::Data(format!("{id}: InkML segmentation and LG symbols disagree")));
    }
    Ok(())
}

/// InkML (plus optional sibling LG) to `<id>.graph.json`, with a coverage and
/// redundancy table.
pub fn cmd_build_graph(cfg: &PipelineConfig, input: &Path, out: &Path) -> Result<String, CliError> {
    let files = files_with_suffix(input, ".inkml")?;
    let grammar = grammar(cfg)?;
    let scorer = build_scorer(&cfg.scorer).map_err(PipelineError::from)?;
    ensure_dir(out)?;
    let built: Vec<GraphFile> = pool(cfg)?.install(|| {
        files
            .par_iter()
            .map(|path| {
                let mut expr = parse_inkml(&read(path)?).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
                if expr.id.is_empty() {
                    expr.id = stem(path, ".inkml");
                }
                let lg_path = path.with_extension("lg");
                if lg_path.exists() {
                    let gt = parse_lg(&read(&lg_path)?).map_err(|e| CliError::Data(format!("{}: {e}", lg_path.display())))?;
                    check_annotations(&gt, &expr.annotations, &expr.id)?;
                    expr.ground_truth = Some(gt);
                }
                let graph = build_primitive_graph(&expr, &grammar, scorer.as_ref(), &cfg.graph)?;
                Ok(GraphFile { id: expr.id.clone(), graph, ground_truth: expr.ground_truth })
            })
            .collect::<Result<Vec<_>, CliError>>()
    })?;

    let mut rows = Vec::new();
    for g in &built {
        write(&out.join(format!("{}.graph.json", g.id)), to_json(g))?;
        let pairs = g.graph.edge_pairs();
        rows.push(BuildRow {
            id: g.id.clone(),
            symbols: g.graph.nodes.len(),
            gt_edges: g.ground_truth.as_ref().map(|t| t.relations.len()),
            candidate_edges: g.graph.edges.len(),
            covered_edges: g.ground_truth.as_ref().map(|t| t.edge_pairs().intersection(&pairs).count()),
        });
    }
    let annotated: Vec<&BuildRow> = rows.iter().filter(|r| r.gt_edges.is_some()).collect();
    let gt: usize = annotated.iter().filter_map(|r| r.gt_edges).sum();
    let hit: usize = annotated.iter().filter_map(|r| r.covered_edges).sum();
    let cand: usize = annotated.iter().map(|r| r.candidate_edges).sum();
    let rep = BuildReport {
        edge_source: cfg.edge_source.to_string(),
        coverage: percent(hit, gt),
        redundancy: redundancy_percent(cand, gt),
        rows,
        config: cfg.echo(),
    };
    write(&out.join("build_report.json"), to_json(&rep))?;
    let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.2}"));
    let table = format!(
        "{:<12} {:>8} {:>10} {:>9} {:>9}\n{:<12} {:>8} {:>10} {:>9} {:>9}\n",
        "Variant",
        "Exprs",
        "Edges",
        "Cov.",
        "Red.",
        rep.edge_source,
        rep.rows.len(),
        rep.rows.iter().map(|r| r.candidate_edges).sum::<usize>(),
        fmt(rep.coverage),
        fmt(rep.redundancy)
    );
    write(&out.join("build_report.txt"), &table)?;
    Ok(table)
}

fn load_graphs(dir: &Path) -> Result<Vec<GraphFile>, CliError> {
    files_with_suffix(dir, ".graph.json")?.iter().map(|p| from_json(p)).collect()
}

fn history_path(checkpoint: &Path) -> PathBuf {
    checkpoint.with_extension("history.json")
}

fn checkpoint_path(cfg: &PipelineConfig, flag: Option<&Path>) -> Result<PathBuf, CliError> {
    flag.map(Path::to_path_buf)
        .or_else(|| cfg.egat.checkpoint.clone())
        .ok_or_else(|| CliError::Usage("no checkpoint path (pass --checkpoint or set egat.checkpoint)".into()))
}

#[derive(Serialize)]
struct HistoryFile<'a> {
    expressions: usize,
    report: &'a hme_core::egat::TrainReport,
    config: serde_json::Value,
}

/// Trains on every annotated graph in `graphs`; writes the checkpoint and a
/// `.history.json` sibling with the loss curves.
pub fn cmd_train(cfg: &PipelineConfig, graphs: &Path, checkpoint: Option<&Path>) -> Result<String, CliError> {
    let ckpt = checkpoint_path(cfg, checkpoint)?;
    let samples: Vec<(PrimitiveGraph, GroundTruthGraph)> = load_graphs(graphs)?
        .into_iter()
        .map(|g| match g.ground_truth {
            Some(gt) => Ok((g.graph, gt)),
            None => Err(CliError::Data(format!("{}: training graph has no ground truth", g.id))),
        })
        .collect::<Result<_, _>>()?;
    let (model, vocab, rep) = fit(&samples, cfg.egat.model, &cfg.egat.train)?;
    if let Some(dir) = ckpt.parent().filter(|d| !d.as_os_str().is_empty()) {
        ensure_dir(dir)?;
    }
    write(&ckpt, Checkpoint::new(model, vocab).to_json())?;
    write(&history_path(&ckpt), to_json(&HistoryFile { expressions: samples.len(), report: &rep, config: cfg.echo() }))?;
    let last = rep.loss_history.last().copied().unwrap_or(f64::NAN);
    Ok(format!(
        "trained on {} expressions, {} epochs, final loss {last:.6}; checkpoint {}\n",
        samples.len(),
        rep.loss_history.len(),
        ckpt.display()
    ))
}

/// Writes `<id>.lg`, `<id>.tex`, `<id>.dot` and `<id>.probs.json` per graph.
pub fn cmd_predict(cfg: &PipelineConfig, graphs: &Path, checkpoint: Option<&Path>, out: &Path) -> Result<String, CliError> {
    let ckpt_path = checkpoint_path(cfg, checkpoint)?;
    if !ckpt_path.exists() {
        return Err(CliError::Data(format!("checkpoint {} not found", ckpt_path.display())));
    }
    let ckpt = Checkpoint::load(&ckpt_path).map_err(|e| CliError::Data(format!("{}: {e}", ckpt_path.display())))?;
    let items = load_graphs(graphs)?;
    ensure_dir(out)?;
    let outputs = pool(cfg)?.install(|| {
        items
            .par_iter()
            .map(|g| {
                let p = predict_tree(&ckpt.model, &ckpt.vocab, &g.graph, cfg.tau)?;
                let probs = ProbFile {
                    id: g.id.clone(),
                    edges: p.probs.iter().map(|((s, d), v)| EdgePrediction { src: s.clone(), dst: d.clone(), prob: *v }).collect(),
                    dropped_parents: p.repair.dropped_parents,
                    used_arborescence: p.repair.used_arborescence,
                    stranded: p.repair.stranded.clone(),
                };
                let latex = slt_to_latex(&p.tree);
                Ok((g.id.clone(), write_lg(&p.tree), latex.text, p.tree.to_dot(), to_json(&probs)))
            })
            .collect::<Result<Vec<_>, CliError>>()
    })?;
    for (id, lg, tex, dot, probs) in &outputs {
        write(&out.join(format!("{id}.lg")), lg)?;
        write(&out.join(format!("{id}.tex")), format!("{tex}\n"))?;
        write(&out.join(format!("{id}.dot")), dot)?;
        write(&out.join(format!("{id}.probs.json")), probs)?;
    }
    Ok(format!("predicted {} expressions into {}\n", outputs.len(), out.display()))
}

fn eval_one(pred: &Path, gt_dir: &Path, id: &str, tau: f64) -> Result<EvalRow, CliError> {
    let gt_path = gt_dir.join(format!("{id}.lg"));
    if !gt_path.exists() {
        return Err(CliError::Data(format!("no ground truth {}", gt_path.display())));
    }
    let gt = parse_lg(&read(&gt_path)?).map_err(|e| CliError::Data(format!("{}: {e}", gt_path.display())))?;
    let lg_path = pred.join(format!("{id}.lg"));
    let pred_gt = parse_lg(&read(&lg_path)?).map_err(|e| CliError::Data(format!("{}: {e}", lg_path.display())))?;
    let tree = SltTree::from_ground_truth(&pred_gt).map_err(|e| CliError::Data(format!("{}: {e}", lg_path.display())))?;
    let pf: ProbFile = from_json(&pred.join(format!("{id}.probs.json")))?;
    let probs: BTreeMap<(String, String), f64> = pf.edges.iter().map(|e| ((e.src.clone(), e.dst.clone()), e.prob)).collect();
    let gt_pairs = gt.edge_pairs();
    let labels: BTreeMap<(String, String), bool> = probs.keys().map(|k| (k.clone(), gt_pairs.contains(k))).collect();
    let (link_correct, link_total) = link_counts(&probs, &labels, tau).map_err(PipelineError::from)?;
    Ok(EvalRow {
        id: id.to_string(),
        symbols: gt.symbols.len(),
        gt_edges: gt_pairs.len(),
        candidate_edges: probs.len(),
        covered_edges: labels.values().filter(|v| **v).count(),
        link_correct,
        link_total,
        structure_ok: structure_ok(&tree, &gt),
        expression_ok: expression_ok(&tree, &gt),
    })
}

/// Scores `<id>.lg` + `<id>.probs.json` in `pred` against `<id>.lg` in
/// `gt`; writes the report JSON and table.
pub fn cmd_eval(cfg: &PipelineConfig, pred: &Path, gt: &Path, out: Option<&Path>) -> Result<String, CliError> {
    let ids: Vec<String> = files_with_suffix(pred, ".probs.json")?.iter().map(|p| stem(p, ".probs.json")).collect();
    let rows = pool(cfg)?.install(|| {
        ids.par_iter().map(|id| eval_one(pred, gt, id, cfg.tau)).collect::<Result<Vec<_>, CliError>>()
    })?;
    let rep = report(cfg.edge_source.as_str(), rows, cfg.echo()).map_err(PipelineError::from)?;
    let table = render_table(&[&rep]);
    let json_path = out.map(Path::to_path_buf).unwrap_or_else(|| pred.join("eval_report.json"));
    write(&json_path, format!("{}\n", rep.to_json()))?;
    write(&json_path.with_extension("txt"), &table)?;
    Ok(table)
}
