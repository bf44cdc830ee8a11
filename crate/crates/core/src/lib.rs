//! Structure recognition for online handwritten mathematical expressions.
//!
//! Symbols become nodes of a primitive graph whose candidate relation edges
//! come from a 2D-CYK parse intersected with line-of-sight visibility. An
//! edge-featured graph attention network then scores each candidate edge, and
//! the kept edges are repaired into a symbol layout tree.

pub mod cyk_parser;
pub mod egat;
pub mod eval_metrics;
pub mod geom;
pub mod ink_io;
pub mod pipeline;
pub mod relation_scorer;
pub mod slt_builder;
pub mod symbol_graph;
pub mod synth_gen;

pub use cyk_parser::{cyk_parse, load_grammar, CykOptions, Grammar};
pub use egat::{Checkpoint, EgatConfig, EgatModel, HeadMode, TrainConfig, TrainReport, Vocabulary};
pub use eval_metrics::{EvalReport, EvalRow};
pub use ink_io::{GroundTruthGraph, InkExpression, LgRelation, LgSymbol, Point, Stroke};
pub use pipeline::{build_primitive_graph, EdgeSource, GraphOptions, PipelineError};
pub use relation_scorer::{build_scorer, RelationScorer, ScorerConfig, ScorerKind};
pub use slt_builder::SltTree;
pub use symbol_graph::{CandidateEdge, PrimitiveGraph, RelDist, RelationLabel, SymbolNode};
pub use synth_gen::SynthConfig;
