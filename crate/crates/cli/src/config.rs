//! Experiment configuration: a JSON document mirroring the CLI flags.
//! Flags override file values; every field has a default.

use std::path::PathBuf;
use std::str::FromStr;

use multiwinner::metrics::{
    DEFAULT_BINS, DEFAULT_EPSILON, DEFAULT_EXTENT_HI, DEFAULT_EXTENT_LO,
};
use multiwinner::rules::{BoundKind, OptimizerConfig, RuleId};
use multiwinner::DistributionId;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Exact-optimizer knobs in config-file form.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerSettings {
    pub max_exhaustive_m: usize,
    pub enumeration_threshold: u64,
    /// "relaxation" or "trivial".
    pub bound: String,
    pub node_budget: Option<u64>,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        let core = OptimizerConfig::default();
        OptimizerSettings {
            max_exhaustive_m: core.max_exhaustive_m,
            enumeration_threshold: core.enumeration_threshold,
            bound: "relaxation".to_string(),
            node_budget: core.node_budget,
        }
    }
}

impl OptimizerSettings {
    pub fn to_core(&self) -> Result<OptimizerConfig> {
        let bound = match self.bound.as_str() {
            "relaxation" => BoundKind::Relaxation,
            "trivial" => BoundKind::Trivial,
            other => {
                return Err(CliError::Config(format!(
                    "unknown bound kind {other:?}; use \"relaxation\" or \"trivial\""
                )))
            }
        };
        Ok(OptimizerConfig {
            max_exhaustive_m: self.max_exhaustive_m,
            enumeration_threshold: self.enumeration_threshold,
            bound,
            node_budget: self.node_budget,
        })
    }
}

/// One experiment sweep: the cartesian product of rules, distributions,
/// and committee sizes, each cell replicated `num_elections` times.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub rules: Vec<String>,
    pub distributions: Vec<String>,
    pub num_candidates: usize,
    pub num_voters: usize,
    pub committee_sizes: Vec<usize>,
    pub num_elections: u64,
    pub master_seed: u64,
    pub epsilon: f64,
    pub grid_bins: usize,
    pub extent_min: f64,
    pub extent_max: f64,
    /// 0 means one worker per available core.
    pub threads: usize,
    pub out_dir: PathBuf,
    pub optimizer: OptimizerSettings,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            rules: ["sntv", "stv", "bloc", "k_borda"]
                .map(String::from)
                .to_vec(),
            distributions: ["square", "disc", "gaussian", "four_gaussian"]
                .map(String::from)
                .to_vec(),
            num_candidates: 200,
            num_voters: 200,
            committee_sizes: vec![20],
            num_elections: 10_000,
            master_seed: 0,
            epsilon: DEFAULT_EPSILON,
            grid_bins: DEFAULT_BINS,
            extent_min: DEFAULT_EXTENT_LO,
            extent_max: DEFAULT_EXTENT_HI,
            threads: 0,
            out_dir: PathBuf::from("out"),
            optimizer: OptimizerSettings::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }
}

/// A validated configuration with ids parsed and geometry checked.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub rules: Vec<RuleId>,
    pub distributions: Vec<DistributionId>,
    pub num_candidates: usize,
    pub num_voters: usize,
    pub committee_sizes: Vec<usize>,
    pub num_elections: u64,
    pub master_seed: u64,
    pub epsilon: f64,
    pub grid_bins: usize,
    pub extent: (f64, f64),
    pub threads: usize,
    pub out_dir: PathBuf,
    pub optimizer: OptimizerConfig,
    /// The merged config as given, echoed into the manifest.
    pub raw: ExperimentConfig,
}

fn parse_unique<T: FromStr<Err = String>>(kind: &str, names: &[String]) -> Result<Vec<T>> {
    if names.is_empty() {
        return Err(CliError::Config(format!("at least one {kind} is required")));
    }
    let mut seen = Vec::new();
    let mut out = Vec::with_capacity(names.len());
    for name in names {
        if seen.contains(name) {
            return Err(CliError::Config(format!("duplicate {kind} {name:?}")));
        }
        seen.push(name.clone());
        out.push(T::from_str(name).map_err(CliError::Config)?);
    }
    Ok(out)
}

pub fn resolve(cfg: ExperimentConfig) -> Result<ResolvedConfig> {
    let rules: Vec<RuleId> = parse_unique("rule", &cfg.rules)?;
    let distributions: Vec<DistributionId> = parse_unique("distribution", &cfg.distributions)?;

    if cfg.num_candidates == 0 || cfg.num_voters == 0 {
        return Err(CliError::Config(
            "num_candidates and num_voters must be positive".to_string(),
        ));
    }
    if cfg.committee_sizes.is_empty() {
        return Err(CliError::Config(
            "at least one committee size is required".to_string(),
        ));
    }
    let mut seen_k = Vec::new();
    for &k in &cfg.committee_sizes {
        if k == 0 || k > cfg.num_candidates {
            return Err(CliError::Config(format!(
                "committee size {k} is outside 1..={}",
                cfg.num_candidates
            )));
        }
        if seen_k.contains(&k) {
            return Err(CliError::Config(format!("duplicate committee size {k}")));
        }
        seen_k.push(k);
    }
    if !(cfg.epsilon > 0.0) || !cfg.epsilon.is_finite() {
        return Err(CliError::Config(format!(
            "epsilon must be positive and finite, got {}",
            cfg.epsilon
        )));
    }
    if cfg.grid_bins == 0 {
        return Err(CliError::Config("grid_bins must be positive".to_string()));
    }
    if !(cfg.extent_min < cfg.extent_max)
        || !cfg.extent_min.is_finite()
        || !cfg.extent_max.is_finite()
    {
        return Err(CliError::Config(format!(
            "extent [{}, {}] is not a valid interval",
            cfg.extent_min, cfg.extent_max
        )));
    }
    let optimizer = cfg.optimizer.to_core()?;

    Ok(ResolvedConfig {
        rules,
        distributions,
        num_candidates: cfg.num_candidates,
        num_voters: cfg.num_voters,
        committee_sizes: cfg.committee_sizes.clone(),
        num_elections: cfg.num_elections,
        master_seed: cfg.master_seed,
        epsilon: cfg.epsilon,
        grid_bins: cfg.grid_bins,
        extent: (cfg.extent_min, cfg.extent_max),
        threads: cfg.threads,
        out_dir: cfg.out_dir.clone(),
        optimizer,
        raw: cfg,
    })
}
