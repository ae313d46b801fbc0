mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use glcc::data::Manifold;
use glcc::eval::GridMetric;
use glcc::GlccError;

use config::RunConfig;

/// Environment variable holding the worker thread count.
const THREADS_ENV: &str = "GLCC_THREADS";

#[derive(Parser)]
#[command(
    name = "glcc",
    version,
    about = "Multi-feature semi-supervised classification"
)]
struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic multi-view dataset.
    Synth(SynthArgs),
    /// Build per-view Laplacian and Hessian energy matrices into a cache.
    BuildGraphs(GraphArgs),
    /// Train a model on partially labeled views.
    Train(TrainArgs),
    /// Classify samples with a trained model.
    Predict(PredictArgs),
    /// Score a predictions file against ground truth.
    Eval(EvalArgs),
    /// Labeled-fraction sweep on a fully labeled dataset.
    Sweep(SweepArgs),
    /// Grid search over lambda and gamma.
    Grid(GridArgs),
}

#[derive(Args)]
struct Common {
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed for every random choice.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct DataArgs {
    /// View files, one sample per row.
    #[arg(long, num_args = 1..)]
    views: Vec<PathBuf>,
    /// Label file with `index,class` rows (`?` for unlabeled).
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    delimiter: Option<char>,
    /// Input files start with a header row.
    #[arg(long)]
    header: bool,
}

#[derive(Args)]
struct GraphOpts {
    #[arg(long)]
    k_graph: Option<usize>,
    #[arg(long)]
    k_hess: Option<usize>,
    #[arg(long)]
    intrinsic_dim: Option<usize>,
    /// Standardize feature columns before building graphs.
    #[arg(long)]
    zscore: bool,
}

#[derive(Args)]
struct TrainOpts {
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    w_large: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct SynthArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    c: Option<usize>,
    #[arg(long, value_parser = parse_manifold)]
    manifold: Option<Manifold>,
    #[arg(long)]
    latent_noise: Option<f64>,
    #[arg(long)]
    view_noise: Option<f64>,
    /// Fraction of samples whose labels are kept in labels.csv.
    #[arg(long)]
    labeled_fraction: Option<f64>,
}

#[derive(Args)]
struct GraphArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    graph: GraphOpts,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    graph: GraphOpts,
    #[command(flatten)]
    train: TrainOpts,
    /// Graph cache from build-graphs; built inline when absent.
    #[arg(long)]
    graphs: Option<PathBuf>,
}

#[derive(Args)]
struct PredictArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    model: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    predictions: Option<PathBuf>,
    /// Fully labeled `index,class` file.
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long)]
    delimiter: Option<char>,
    #[arg(long)]
    header: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    graph: GraphOpts,
    #[command(flatten)]
    train: TrainOpts,
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    fractions: Vec<f64>,
    #[arg(long)]
    repeats: Option<usize>,
    /// Skip the single-view ridge baseline.
    #[arg(long)]
    no_baselines: bool,
}

#[derive(Args)]
struct GridArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    graph: GraphOpts,
    #[command(flatten)]
    train: TrainOpts,
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    lambdas: Vec<f64>,
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    gammas: Vec<f64>,
    #[arg(long)]
    labeled_fraction: Option<f64>,
    #[arg(long, value_parser = parse_metric)]
    metric: Option<GridMetric>,
}

fn parse_manifold(s: &str) -> Result<Manifold, String> {
    match s {
        "gaussian" => Ok(Manifold::Gaussian),
        "arcs" => Ok(Manifold::Arcs),
        _ => Err(format!("unknown manifold '{s}' (gaussian, arcs)")),
    }
}

fn parse_metric(s: &str) -> Result<GridMetric, String> {
    match s {
        "accuracy" => Ok(GridMetric::Accuracy),
        "map" => Ok(GridMetric::Map),
        _ => Err(format!("unknown metric '{s}' (accuracy, map)")),
    }
}

fn set<T: Clone>(target: &mut T, value: &Option<T>) {
    if let Some(v) = value {
        *target = v.clone();
    }
}

impl Common {
    fn apply(&self, cfg: &mut RunConfig) {
        set(&mut cfg.out, &self.out);
        set(&mut cfg.seed, &self.seed);
    }
}

impl DataArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        if !self.views.is_empty() {
            cfg.paths.views = self.views.clone();
        }
        if self.labels.is_some() {
            cfg.paths.labels = self.labels.clone();
        }
        set(&mut cfg.format.delimiter, &self.delimiter);
        cfg.format.has_header |= self.header;
    }
}

impl GraphOpts {
    fn apply(&self, cfg: &mut RunConfig) {
        set(&mut cfg.train.k_graph, &self.k_graph);
        set(&mut cfg.train.k_hess, &self.k_hess);
        set(&mut cfg.train.intrinsic_dim, &self.intrinsic_dim);
        cfg.train.zscore |= self.zscore;
    }
}

impl TrainOpts {
    fn apply(&self, cfg: &mut RunConfig) {
        let t = &mut cfg.train;
        set(&mut t.lambda, &self.lambda);
        set(&mut t.gamma, &self.gamma);
        set(&mut t.r, &self.r);
        set(&mut t.w_large, &self.w_large);
        set(&mut t.max_iter, &self.max_iter);
        set(&mut t.tol, &self.tol);
    }
}

impl Command {
    /// Applies the flags of this command on top of `cfg`.
    fn apply(&self, cfg: &mut RunConfig) {
        match self {
            Command::Synth(a) => {
                a.common.apply(cfg);
                let s = &mut cfg.synth;
                set(&mut s.n, &a.n);
                set(&mut s.m, &a.m);
                set(&mut s.c, &a.c);
                set(&mut s.manifold, &a.manifold);
                set(&mut s.latent_noise, &a.latent_noise);
                set(&mut s.view_noise, &a.view_noise);
                set(&mut cfg.split.labeled_fraction, &a.labeled_fraction);
            }
            Command::BuildGraphs(a) => {
                a.common.apply(cfg);
                a.data.apply(cfg);
                a.graph.apply(cfg);
            }
            Command::Train(a) => {
                a.common.apply(cfg);
                a.data.apply(cfg);
                a.graph.apply(cfg);
                a.train.apply(cfg);
                if a.graphs.is_some() {
                    cfg.paths.graphs = a.graphs.clone();
                }
            }
            Command::Predict(a) => {
                a.common.apply(cfg);
                a.data.apply(cfg);
                if a.model.is_some() {
                    cfg.paths.model = a.model.clone();
                }
            }
            Command::Eval(a) => {
                a.common.apply(cfg);
                if a.predictions.is_some() {
                    cfg.paths.predictions = a.predictions.clone();
                }
                if a.truth.is_some() {
                    cfg.paths.truth = a.truth.clone();
                }
                set(&mut cfg.format.delimiter, &a.delimiter);
                cfg.format.has_header |= a.header;
            }
            Command::Sweep(a) => {
                a.common.apply(cfg);
                a.data.apply(cfg);
                a.graph.apply(cfg);
                a.train.apply(cfg);
                if !a.fractions.is_empty() {
                    cfg.sweep.fractions = a.fractions.clone();
                }
                set(&mut cfg.sweep.repeats, &a.repeats);
                cfg.sweep.baselines &= !a.no_baselines;
            }
            Command::Grid(a) => {
                a.common.apply(cfg);
                a.data.apply(cfg);
                a.graph.apply(cfg);
                a.train.apply(cfg);
                if !a.lambdas.is_empty() {
                    cfg.grid.lambdas = a.lambdas.clone();
                }
                if !a.gammas.is_empty() {
                    cfg.grid.gammas = a.gammas.clone();
                }
                set(&mut cfg.grid.split.labeled_fraction, &a.labeled_fraction);
                set(&mut cfg.grid.metric, &a.metric);
            }
        }
    }
}

fn configure_threads() -> Result<(), GlccError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        GlccError::Param(format!(
            "{THREADS_ENV} must be a positive integer, got '{raw}'"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| GlccError::Param(format!("cannot start {threads} worker threads: {e}")))
}

fn run(cli: Cli) -> Result<(), GlccError> {
    configure_threads()?;
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    cli.command.apply(&mut cfg);
    let cfg = cfg.resolve();
    match cli.command {
        Command::Synth(_) => commands::synth(&cfg),
        Command::BuildGraphs(_) => commands::build_graphs(&cfg),
        Command::Train(_) => commands::train(&cfg),
        Command::Predict(_) => commands::predict(&cfg),
        Command::Eval(_) => commands::eval(&cfg),
        Command::Sweep(_) => commands::sweep(&cfg),
        Command::Grid(_) => commands::grid(&cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = e.kind();
            eprintln!("error: {}", kind.as_str());
            eprintln!("{e}");
            ExitCode::from(kind.exit_code() as u8)
        }
    }
}
