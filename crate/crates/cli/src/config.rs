use std::path::{Path, PathBuf};

use hme_core::egat::{EgatConfig, HeadMode, TrainConfig};
use hme_core::pipeline::{EdgeSource, GraphOptions};
use hme_core::relation_scorer::{ScorerConfig, ScorerKind};
use hme_core::synth_gen::SynthConfig;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EgatSection {
    pub checkpoint: Option<PathBuf>,
    pub model: EgatConfig,
    pub train: TrainConfig,
}

impl Default for EgatSection {
    fn default() -> Self {
        EgatSection { checkpoint: None, model: EgatConfig::default(), train: TrainConfig::default() }
    }
}

/// Everything a run depends on. `seed` feeds every random stream: the
/// scorer, the generator and training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub edge_source: EdgeSource,
    pub grammar_path: Option<PathBuf>,
    pub tau: f64,
    /// Worker threads for build-graph, predict and eval; 0 uses every core.
    pub threads: usize,
    pub scorer: ScorerConfig,
    pub graph: GraphOptions,
    pub egat: EgatSection,
    pub synth: SynthConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 0,
            edge_source: EdgeSource::CykAndLos,
            grammar_path: None,
            tau: 0.5,
            threads: 0,
            scorer: ScorerConfig::default(),
            graph: GraphOptions::default(),
            egat: EgatSection::default(),
            synth: SynthConfig::default(),
        }
    }
}

/// Command-line overrides; `None` leaves the file value alone.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// CYK, LOS or CYK_AND_LOS.
    #[arg(long, global = true)]
    pub edge_source: Option<EdgeSource>,
    #[arg(long, global = true)]
    pub tau: Option<f64>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// geometric, file_backed or noisy_oracle.
    #[arg(long, global = true, value_parser = parse_scorer_kind)]
    pub scorer: Option<ScorerKind>,
    #[arg(long, global = true)]
    pub noise_rate: Option<f64>,
    #[arg(long, global = true)]
    pub score_file: Option<PathBuf>,
    #[arg(long, global = true)]
    pub grammar: Option<PathBuf>,
    /// node_edge_feature or edge_feature.
    #[arg(long, global = true, value_parser = parse_head_mode)]
    pub head_mode: Option<HeadMode>,
    #[arg(long, global = true)]
    pub epochs: Option<usize>,
    #[arg(long, global = true)]
    pub lr: Option<f64>,
    #[arg(long, global = true)]
    pub batch_size: Option<usize>,
    #[arg(long, global = true)]
    pub jitter: Option<f64>,
    #[arg(long, global = true)]
    pub max_depth: Option<usize>,
    /// Number of synthetic expressions.
    #[arg(long = "count", global = true)]
    pub n_expressions: Option<usize>,
}

fn parse_scorer_kind(s: &str) -> Result<ScorerKind, String> {
    match s.to_ascii_lowercase().replace('-', "_").as_str() {
        "geometric" => Ok(ScorerKind::Geometric),
        "file_backed" => Ok(ScorerKind::FileBacked),
        "noisy_oracle" => Ok(ScorerKind::NoisyOracle),
        _ => Err(format!("unknown scorer `{s}`")),
    }
}

fn parse_head_mode(s: &str) -> Result<HeadMode, String> {
    match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
        "nodeedgefeature" => Ok(HeadMode::NodeEdgeFeature),
        "edgefeature" => Ok(HeadMode::EdgeFeature),
        _ => Err(format!("unknown head mode `{s}`")),
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<PipelineConfig, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("bad config: {e}")))
    }

    pub fn load(path: &Path) -> Result<PipelineConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// File (or defaults), then flags, then the shared seed pushed into
    /// every section.
    pub fn resolve(o: &Overrides) -> Result<PipelineConfig, CliError> {
        let mut c = match &o.config {
            Some(p) => Self::load(p)?,
            None => PipelineConfig::default(),
        };
        macro_rules! set {
            ($flag:expr => $field:expr) => {
                if let Some(v) = $flag.clone() {
                    $field = v;
                }
            };
        }
        set!(o.seed => c.seed);
        set!(o.edge_source => c.edge_source);
        set!(o.tau => c.tau);
        set!(o.threads => c.threads);
        set!(o.scorer => c.scorer.kind);
        set!(o.noise_rate => c.scorer.noise_rate);
        set!(o.head_mode => c.egat.model.head_mode);
        set!(o.epochs => c.egat.train.epochs);
        set!(o.lr => c.egat.train.lr);
        set!(o.batch_size => c.egat.train.batch_size);
        set!(o.jitter => c.synth.jitter);
        set!(o.max_depth => c.synth.max_depth);
        set!(o.n_expressions => c.synth.n_expressions);
        if o.score_file.is_some() {
            c.scorer.score_file = o.score_file.clone();
        }
        if o.grammar.is_some() {
            c.grammar_path = o.grammar.clone();
        }
        c.scorer.seed = c.seed;
        c.synth.seed = c.seed;
        c.egat.train.seed = c.seed;
        c.graph.edge_source = c.edge_source;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Usage(m));
        if !(0.0..=1.0).contains(&self.tau) {
            return bad(format!("tau {} outside [0, 1]", self.tau));
        }
        if !(0.0..=1.0).contains(&self.scorer.noise_rate) {
            return bad(format!("noise_rate {} outside [0, 1]", self.scorer.noise_rate));
        }
        if !(self.egat.train.lr > 0.0 && self.egat.train.lr.is_finite()) {
            return bad(format!("lr {} must be positive", self.egat.train.lr));
        }
        if self.egat.train.batch_size == 0 {
            return bad("batch_size must be at least 1".into());
        }
        self.egat.model.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        self.synth.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        for p in self.grammar_path.iter().chain(&self.scorer.score_file) {
            if !p.exists() {
                return bad(format!("{} does not exist", p.display()));
            }
        }
        Ok(())
    }

    /// JSON echo embedded in reports.
    pub fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_defaults() {
        assert_eq!(PipelineConfig::from_toml("").unwrap(), PipelineConfig::default());
    }

    #[test]
    fn toml_round_trip() {
        let mut c = PipelineConfig::default();
        c.seed = 9;
        c.edge_source = EdgeSource::Los;
        c.egat.model.head_mode = HeadMode::EdgeFeature;
        let text = toml::to_string(&c).unwrap();
        assert_eq!(PipelineConfig::from_toml(&text).unwrap(), c);
    }

    #[test]
    fn unknown_keys_are_usage_errors() {
        assert!(matches!(PipelineConfig::from_toml("sed = 3"), Err(CliError::Usage(_))));
        assert!(matches!(PipelineConfig::from_toml("[egat]\nlr = 1.0"), Err(CliError::Usage(_))));
    }

    #[test]
    fn flags_override_and_seed_propagates() {
        let o = Overrides { seed: Some(7), epochs: Some(3), scorer: Some(ScorerKind::Geometric), ..Default::default() };
        let c = PipelineConfig::resolve(&o).unwrap();
        assert_eq!((c.scorer.seed, c.synth.seed, c.egat.train.seed), (7, 7, 7));
        assert_eq!(c.egat.train.epochs, 3);
        assert_eq!(c.scorer.kind, ScorerKind::Geometric);
        let bad = Overrides { tau: Some(2.0), ..Default::default() };
        assert!(matches!(PipelineConfig::resolve(&bad), Err(CliError::Usage(_))));
    }
}
