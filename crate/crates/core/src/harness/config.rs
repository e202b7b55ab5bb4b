//! Experiment configuration read from a TOML file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::io::{read_dataset_csv, read_edge_list};
use crate::aggregation::TrimRule;
use crate::coupling::CouplingSpec;
use crate::error::{Error, Result};
use crate::estimation::SummaryFunction;
use crate::partition::Partition;
use crate::sampler::{Budget, PairConfig, SamplerKind};
use crate::targets::{ColoringModel, DpmmModel, Graph, PartitionModel};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub target: TargetConfig,
    #[serde(default)]
    pub estimator: EstimatorConfig,
    #[serde(default)]
    pub coupling: CouplingSpec,
    #[serde(default)]
    pub sampler: SamplerConfig,
    #[serde(default)]
    pub run: RunConfig,
    #[serde(default)]
    pub aggregate: AggregateConfig,
    #[serde(default)]
    pub truth: TruthConfig,
}

/// The distribution over partitions. File paths are relative to the config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TargetConfig {
    Dpmm {
        /// Numeric CSV, one observation per row.
        data: Option<PathBuf>,
        /// Inline observations, instead of `data`.
        points: Option<Vec<Vec<f64>>>,
        #[serde(default = "yes")]
        standardize: bool,
        alpha: f64,
        #[serde(default)]
        mu0: f64,
        /// Prior variance of cluster means.
        s0: f64,
        /// Observation noise variance.
        s1: f64,
    },
    Coloring {
        /// Edge list with an `N q` header.
        graph: Option<PathBuf>,
        n_vertices: Option<usize>,
        edges: Option<Vec<(usize, usize)>>,
        /// Overrides the header's color count.
        q: Option<usize>,
        #[serde(default)]
        require_glauber_connectivity: bool,
    },
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorConfig {
    /// Text forms such as `lcp`, `cc(1,2)`, `nclusters`, `pred(0.5)`.
    pub summaries: Vec<String>,
    /// ℓ
    pub burn_in: u64,
    /// m
    pub min_iters: u64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            summaries: vec!["lcp".into()],
            burn_in: 10,
            min_iters: 100,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitKind {
    /// One block for clustering targets, a greedy coloring for coloring targets.
    #[default]
    Default,
    OneBlock,
    Singletons,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerConfig {
    pub kind: SamplerKind,
    pub init: InitKind,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BudgetMode {
    /// Wall-clock budgets; naive chains match the coupled pair's elapsed time.
    Wall,
    /// Sweep budgets; naive chains match the coupled pair's sweep count. Reproducible.
    #[default]
    Sweeps,
}

impl std::str::FromStr for BudgetMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wall" => Ok(BudgetMode::Wall),
            "sweeps" => Ok(BudgetMode::Sweeps),
            _ => Err(Error::Config(format!("unknown budget mode '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// V, the number of coupled pairs.
    pub replicates: usize,
    pub seed: u64,
    pub budget_mode: BudgetMode,
    /// Largest meeting time tried before censoring, in sweeps.
    pub max_sweeps: u64,
    /// Seconds per pair before censoring, in wall mode.
    pub max_wall_s: f64,
    /// Extra coupled sweeps after meeting that check the chains stay equal.
    pub verify_sweeps: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            replicates: 100,
            seed: 0,
            budget_mode: BudgetMode::Sweeps,
            max_sweeps: 100_000,
            max_wall_s: 600.0,
            verify_sweeps: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AggregateConfig {
    /// Processor counts J.
    pub j: Vec<usize>,
    /// Fraction trimmed from each tail.
    pub trim_alpha: f64,
    pub trim_rule: TrimRule,
}

impl Default for AggregateConfig {
    fn default() -> Self {
        AggregateConfig {
            j: vec![10],
            trim_alpha: 0.005,
            trim_rule: TrimRule::PerTailCount,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TruthMethod {
    /// Enumeration when the Bell number is at most a million, long chains otherwise.
    #[default]
    Auto,
    Enumeration,
    LongChain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TruthConfig {
    pub method: TruthMethod,
    pub chains: usize,
    pub sweeps: u64,
}

impl Default for TruthConfig {
    fn default() -> Self {
        TruthConfig {
            method: TruthMethod::Auto,
            chains: 10,
            sweeps: 10_000,
        }
    }
}

/// A loaded target.
#[derive(Clone, Debug)]
pub enum Target {
    Dpmm(DpmmModel<f64>),
    Coloring(ColoringModel<f64>),
}

impl Target {
    pub fn n_items(&self) -> usize {
        match self {
            Target::Dpmm(m) => m.n_items(),
            Target::Coloring(m) => m.n_items(),
        }
    }

    pub fn dpmm(&self) -> Option<&DpmmModel<f64>> {
        match self {
            Target::Dpmm(m) => Some(m),
            Target::Coloring(_) => None,
        }
    }
}

impl ExperimentConfig {
    /// Parses and validates a config; relative paths resolve against the file's directory.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut cfg = Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Parse { path: path.to_path_buf(), msg },
            e => e,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses without resolving paths or checking that files exist.
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(p) = p {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        };
        match &mut self.target {
            TargetConfig::Dpmm { data, .. } => fix(data),
            TargetConfig::Coloring { graph, .. } => fix(graph),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let e = self.estimator.clone();
        if e.min_iters < e.burn_in {
            return Err(Error::Config(format!("min_iters {} below burn_in {}", e.min_iters, e.burn_in)));
        }
        if e.summaries.is_empty() {
            return Err(Error::Config("no summaries requested".into()));
        }
        let summaries = self.summaries()?;
        if !(0.0..=1.0).contains(&self.coupling.eta) {
            return Err(Error::Config(format!("eta {} outside [0, 1]", self.coupling.eta)));
        }
        if !(0.0..0.5).contains(&self.aggregate.trim_alpha) {
            return Err(Error::Config(format!("trim_alpha {} outside [0, 0.5)", self.aggregate.trim_alpha)));
        }
        if self.aggregate.j.contains(&0) {
            return Err(Error::Config("J must be positive".into()));
        }
        if self.run.max_sweeps == 0 {
            return Err(Error::Config("max_sweeps must be positive".into()));
        }
        match &self.target {
            TargetConfig::Dpmm { data, points, .. } => {
                if data.is_some() == points.is_some() {
                    return Err(Error::Config("dpmm target needs exactly one of data, points".into()));
                }
                if let Some(p) = data {
                    if !p.is_file() {
                        return Err(Error::Config(format!("data file {} not found", p.display())));
                    }
                }
            }
            TargetConfig::Coloring { graph, n_vertices, edges, .. } => {
                if graph.is_some() == (n_vertices.is_some() || edges.is_some()) {
                    return Err(Error::Config("coloring target needs a graph file or inline n_vertices/edges".into()));
                }
                if let Some(p) = graph {
                    if !p.is_file() {
                        return Err(Error::Config(format!("graph file {} not found", p.display())));
                    }
                }
                if self.sampler.kind == SamplerKind::SplitMerge {
                    // restricted scans can have no proper coloring to move to
                    return Err(Error::Config("split-merge is supported for dpmm targets only".into()));
                }
                if let Some(s) = summaries.iter().find(|s| s.needs_dpmm()) {
                    return Err(Error::Config(format!("summary {s} needs a dpmm target")));
                }
            }
        }
        Ok(())
    }

    pub fn summaries(&self) -> Result<Vec<SummaryFunction>> {
        self.estimator.summaries.iter().map(|s| s.parse()).collect()
    }

    pub fn summary_names(&self) -> Result<Vec<String>> {
        Ok(self.summaries()?.iter().map(ToString::to_string).collect())
    }

    pub fn load_target(&self) -> Result<Target> {
        match &self.target {
            TargetConfig::Dpmm { data, points, standardize, alpha, mu0, s0, s1 } => {
                let w = match (data, points) {
                    (Some(path), _) => read_dataset_csv(path, *standardize)?,
                    (None, Some(p)) => {
                        let mut p = p.clone();
                        if *standardize {
                            super::io::standardize(&mut p);
                        }
                        p
                    }
                    (None, None) => return Err(Error::Config("dpmm target has no data".into())),
                };
                Ok(Target::Dpmm(DpmmModel::isotropic(*alpha, *mu0, *s0, *s1, w)?))
            }
            TargetConfig::Coloring { graph, n_vertices, edges, q, require_glauber_connectivity } => {
                let (g, header_q) = match graph {
                    Some(path) => read_edge_list(path)?,
                    None => {
                        let n = n_vertices.ok_or_else(|| Error::Config("n_vertices missing".into()))?;
                        let one_based: Vec<(usize, usize)> = edges.clone().unwrap_or_default();
                        let zero_based = one_based
                            .iter()
                            .map(|&(u, v)| match (u.checked_sub(1), v.checked_sub(1)) {
                                (Some(u), Some(v)) => Ok((u, v)),
                                _ => Err(Error::Config("vertices are numbered from 1".into())),
                            })
                            .collect::<Result<Vec<_>>>()?;
                        (Graph::new(n, &zero_based)?, None)
                    }
                };
                let q = q.or(header_q).ok_or_else(|| Error::Config("coloring target needs q".into()))?;
                Ok(Target::Coloring(ColoringModel::new(g, q, *require_glauber_connectivity)?))
            }
        }
    }

    pub fn initial_partition_for<M: PartitionModel>(&self, model: &M) -> Partition {
        match self.sampler.init {
            InitKind::OneBlock => Partition::one_block(model.n_items()),
            InitKind::Singletons => Partition::singletons(model.n_items()),
            InitKind::Default => model.initial_partition(),
        }
    }

    /// Pair settings under a budget mode.
    pub fn pair_config(&self, mode: BudgetMode) -> PairConfig {
        let budget = match mode {
            BudgetMode::Sweeps => Budget { max_sweeps: Some(self.run.max_sweeps), max_wall_s: None },
            BudgetMode::Wall => Budget { max_sweeps: Some(self.run.max_sweeps), max_wall_s: Some(self.run.max_wall_s) },
        };
        PairConfig {
            burn_in: self.estimator.burn_in,
            min_iters: self.estimator.min_iters,
            coupling: self.coupling,
            sampler: self.sampler.kind,
            budget,
            verify_sweeps: self.run.verify_sweeps,
        }
    }
}
