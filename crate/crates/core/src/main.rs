use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use partition_coupling::aggregation::TrimRule;
use partition_coupling::coupling::CouplingKind;
use partition_coupling::harness::io::{read_jsonl, write_csv, write_dataset_csv, write_edge_list, write_jsonl};
use partition_coupling::harness::synth::{erdos_renyi, greedy_colors, k_regular, synth_gmm, GmmPreset};
use partition_coupling::harness::{
    aggregate, ground_truth, run_coupled, run_naive, survival_table, AggregateOptions, BudgetMode, ExperimentConfig,
    GroundTruth, NaiveBudget, NaiveRecord, RunOptions,
};
use partition_coupling::ChainPairRecordF64;

/// Coupled-chain MCMC over set partitions.
#[derive(Parser, Debug)]
#[command(name = "pcouple", version, about)]
struct Cli {
    #[command(flatten)]
    shared: Shared,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Shared {
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config's master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Overrides the config's budget mode.
    #[arg(long, global = true, value_enum)]
    budget_mode: Option<ModeArg>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Wall,
    Sweeps,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CouplingArg {
    Ot,
    Maximal,
    CommonRng,
    Independent,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run coupled chain pairs and write one record per pair (JSONL).
    RunCoupled {
        /// Overrides the config's coupling.
        #[arg(long, value_enum)]
        coupling: Option<CouplingArg>,
        /// Overrides the number of pairs.
        #[arg(long)]
        replicates: Option<usize>,
        /// Writes every coupled leave-out step to this JSONL file.
        #[arg(long)]
        trace_couplings: Option<PathBuf>,
    },
    /// Run naive single chains matched to coupled records, or for a fixed sweep count.
    RunNaive {
        #[arg(long, conflicts_with = "sweeps", required_unless_present = "sweeps")]
        coupled: Option<PathBuf>,
        #[arg(long)]
        sweeps: Option<u64>,
    },
    /// Compute reference values of the summaries (JSON).
    GroundTruth,
    /// Write loss curves and intervals (CSV).
    Aggregate {
        #[arg(long)]
        coupled: PathBuf,
        #[arg(long)]
        naive: Option<PathBuf>,
        /// Ground truth JSON from `ground-truth`.
        #[arg(long)]
        truth: PathBuf,
        /// Processor counts; overrides the config.
        #[arg(long, value_delimiter = ',')]
        j: Vec<usize>,
        /// Only this summary, e.g. `lcp` or `cc(1,2)`.
        #[arg(long)]
        summary: Option<String>,
        #[arg(long)]
        trim_alpha: Option<f64>,
        #[arg(long, value_enum)]
        trim_rule: Option<TrimArg>,
    },
    /// Kaplan–Meier curves of meeting times (CSV).
    Survival {
        /// `NAME=PATH` of a coupled-run JSONL; repeat per method.
        #[arg(long = "input", required = true)]
        inputs: Vec<String>,
    },
    /// Generate synthetic data.
    Synth {
        #[command(subcommand)]
        what: Synth,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TrimArg {
    PerTailCount,
    QuantileInclusive,
}

#[derive(Subcommand, Debug)]
enum Synth {
    /// Gaussian mixture dataset (CSV).
    Gmm {
        #[arg(long, default_value = "synthetic")]
        preset: String,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Graph edge list with an `N q` header.
    Graph {
        #[arg(long, value_enum)]
        kind: GraphKind,
        #[arg(long)]
        n: usize,
        /// Degree, for k-regular graphs.
        #[arg(long)]
        k: Option<usize>,
        /// Edge probability, for Erdős–Rényi graphs.
        #[arg(long)]
        p: Option<f64>,
        /// Colors; at least the greedy coloring's count.
        #[arg(long)]
        q: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GraphKind {
    KRegular,
    ErdosRenyi,
}

fn load_config(shared: &Shared) -> Result<ExperimentConfig> {
    let path = shared.config.as_ref().context("--config is required")?;
    let mut cfg = ExperimentConfig::from_path(path).with_context(|| format!("loading {}", path.display()))?;
    if let Some(s) = shared.seed {
        cfg.run.seed = s;
    }
    if let Some(m) = shared.budget_mode {
        cfg.run.budget_mode = match m {
            ModeArg::Wall => BudgetMode::Wall,
            ModeArg::Sweeps => BudgetMode::Sweeps,
        };
    }
    Ok(cfg)
}

fn out_path(shared: &Shared) -> Result<&Path> {
    shared.out.as_deref().context("--out is required")
}

fn sidecar(out: &Path, suffix: &str) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn options(shared: &Shared, cfg: &ExperimentConfig, trace: bool) -> RunOptions {
    RunOptions { workers: shared.workers, budget_mode: cfg.run.budget_mode, trace }
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let shared = &cli.shared;
    match &cli.command {
        Command::RunCoupled { coupling, replicates, trace_couplings } => {
            let mut cfg = load_config(shared)?;
            if let Some(c) = coupling {
                cfg.coupling.kind = match c {
                    CouplingArg::Ot => CouplingKind::Ot,
                    CouplingArg::Maximal => CouplingKind::Maximal,
                    CouplingArg::CommonRng => CouplingKind::CommonRng,
                    CouplingArg::Independent => CouplingKind::Independent,
                };
            }
            if let Some(v) = replicates {
                cfg.run.replicates = *v;
            }
            let out = out_path(shared)?;
            let target = cfg.load_target()?;
            let result = run_coupled(&cfg, &target, options(shared, &cfg, trace_couplings.is_some()))?;
            write_jsonl(out, &result.records)?;
            write_csv(&sidecar(out, ".walltime.csv"), &result.wall_times)?;
            if let Some(p) = trace_couplings {
                write_jsonl(p, &result.traces)?;
            }
            info!("wrote {} records to {}", result.records.len(), out.display());
        }
        Command::RunNaive { coupled, sweeps } => {
            let cfg = load_config(shared)?;
            let out = out_path(shared)?;
            let target = cfg.load_target()?;
            let records: Vec<ChainPairRecordF64>;
            let budget = match (coupled, sweeps) {
                (Some(p), _) => {
                    records = read_jsonl(p)?;
                    NaiveBudget::Matched(&records)
                }
                (None, Some(s)) => NaiveBudget::Sweeps(*s),
                (None, None) => bail!("pass --coupled or --sweeps"),
            };
            let naive = run_naive(&cfg, &target, budget, options(shared, &cfg, false))?;
            write_jsonl(out, &naive)?;
        }
        Command::GroundTruth => {
            let cfg = load_config(shared)?;
            let out = out_path(shared)?;
            let target = cfg.load_target()?;
            let truth = ground_truth(&cfg, &target, shared.workers)?;
            std::fs::write(out, serde_json::to_string_pretty(&truth)? + "\n")?;
        }
        Command::Aggregate { coupled, naive, truth, j, summary, trim_alpha, trim_rule } => {
            let cfg = shared.config.as_ref().map(|_| load_config(shared)).transpose()?;
            let defaults = cfg.map(|c| c.aggregate).unwrap_or_default();
            let out = out_path(shared)?;
            let coupled: Vec<ChainPairRecordF64> = read_jsonl(coupled)?;
            let naive: Option<Vec<NaiveRecord>> = naive.as_deref().map(read_jsonl).transpose()?;
            let truth: GroundTruth = serde_json::from_str(&std::fs::read_to_string(truth)?)?;
            let j_list = if j.is_empty() { defaults.j.clone() } else { j.clone() };
            let opts = AggregateOptions {
                j_list: &j_list,
                trim_alpha: trim_alpha.unwrap_or(defaults.trim_alpha),
                trim_rule: match trim_rule {
                    Some(TrimArg::PerTailCount) => TrimRule::PerTailCount,
                    Some(TrimArg::QuantileInclusive) => TrimRule::QuantileInclusive,
                    None => defaults.trim_rule,
                },
                summary: summary.as_deref(),
            };
            let rows = aggregate(&coupled, naive.as_deref(), &truth, opts)?;
            write_csv(out, &rows)?;
        }
        Command::Survival { inputs } => {
            let out = out_path(shared)?;
            let mut sets = Vec::new();
            for spec in inputs {
                let (name, path) = spec.split_once('=').with_context(|| format!("expected NAME=PATH, got '{spec}'"))?;
                let records: Vec<ChainPairRecordF64> = read_jsonl(Path::new(path))?;
                sets.push((name.to_string(), records));
            }
            let (rows, _) = survival_table(&sets)?;
            write_csv(out, &rows)?;
        }
        Command::Synth { what } => {
            let out = out_path(shared)?;
            let seed = shared.seed.unwrap_or(0);
            match what {
                Synth::Gmm { preset, n } => {
                    let preset: GmmPreset = preset.parse()?;
                    let (points, _) = synth_gmm(&preset.spec(seed), n.unwrap_or(preset.default_n()), seed)?;
                    write_dataset_csv(out, &points)?;
                }
                Synth::Graph { kind, n, k, p, q } => {
                    let graph = match kind {
                        GraphKind::KRegular => k_regular(*n, k.context("--k is required for k-regular graphs")?, seed)?,
                        GraphKind::ErdosRenyi => erdos_renyi(*n, p.context("--p is required for Erdős–Rényi graphs")?, seed)?,
                    };
                    let greedy = greedy_colors(&graph);
                    let q = q.unwrap_or(greedy);
                    if q < greedy {
                        bail!("q = {q} is below the {greedy} colors of the greedy coloring");
                    }
                    write_edge_list(out, &graph, q)?;
                }
            }
        }
    }
    Ok(())
}
