//! Command-line front end: `select`, `compare`, `oracle`, `synth`.
//!
//! Exit codes: 0 success, 1 usage/configuration error, 2 data error,
//! 3 internal/numeric error.

mod commands;
mod config;
mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use ssa_select::data::SynthSpec;
use ssa_select::error::{Error, Result};
use ssa_select::select::ORACLE_MAX_DIM;

use config::{apply_dotted_override, load_config, ClassifierKind, RunConfig};

#[derive(Parser)]
#[command(
    name = "ssa-select",
    version,
    about = "Squirrel-search wrapper feature selection for binary fraud/normal classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run feature selection; writes report.json, convergence.csv and
    /// selected_features.txt
    Select(RunArgs),
    /// Train the classifier roster with/without selection and emit a
    /// percent metrics table plus report.json
    Compare(RunArgs),
    /// Exhaustive feature-subset search (ground truth for small A)
    Oracle(OracleArgs),
    /// Generate a synthetic imbalanced fraud dataset CSV
    Synth(SynthArgs),
}

#[derive(Args, Clone)]
struct RunArgs {
    /// JSON config mirroring the run configuration
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV dataset path (overrides the config; clears any synth spec)
    #[arg(long)]
    data: Option<PathBuf>,
    /// Label column name
    #[arg(long = "label-col")]
    label_col: Option<String>,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Master seed; all nested seeds derive from it
    #[arg(long)]
    seed: Option<u64>,
    /// Weight on CV error in the fitness
    #[arg(long)]
    alpha: Option<f64>,
    /// Neighbors for the wrapper k-NN
    #[arg(long)]
    k: Option<usize>,
    /// Cross-validation folds
    #[arg(long)]
    folds: Option<usize>,
    /// Optimizer iterations
    #[arg(long)]
    iters: Option<usize>,
    /// Optimizer population size
    #[arg(long)]
    pop: Option<usize>,
    /// Comma-separated roster (ssa_knn,knn,nn,nb,svm)
    #[arg(long, value_delimiter = ',')]
    roster: Option<Vec<String>>,
    /// Also evaluate every roster classifier on the selected features
    #[arg(long)]
    apply_mask_to_all: bool,
    /// Dotted-path config override, e.g. --set fitness.alpha=0.8
    #[arg(long = "set", value_name = "KEY.PATH=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Prior report.json to compute the selection-to-oracle gap
    #[arg(long = "compare-to")]
    compare_to: Option<PathBuf>,
    /// Refuse datasets wider than this many features
    #[arg(long, default_value_t = ORACLE_MAX_DIM)]
    max_dim: usize,
}

#[derive(Args)]
struct SynthArgs {
    /// Optional JSON config; its synth section is the baseline spec
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of samples
    #[arg(long)]
    n: Option<usize>,
    /// Informative feature count (columns 0..informative)
    #[arg(long)]
    informative: Option<usize>,
    /// Pure-noise feature count
    #[arg(long)]
    noise: Option<usize>,
    /// Class-centroid separation in feature standard deviations
    #[arg(long)]
    separation: Option<f64>,
    /// Fraction of fraud rows, in (0, 0.5]
    #[arg(long = "fraud-fraction")]
    fraud_fraction: Option<f64>,
    /// Generator seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path
    #[arg(long, default_value = "synthetic.csv")]
    out: PathBuf,
}

fn resolve_config(args: &RunArgs) -> Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    for assignment in &args.set {
        apply_dotted_override(&mut cfg, assignment)?;
    }
    if let Some(path) = &args.data {
        cfg.data = Some(path.clone());
        cfg.synth = None;
    }
    if let Some(name) = &args.label_col {
        cfg.label_col = name.clone();
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(alpha) = args.alpha {
        cfg.fitness.alpha = alpha;
    }
    if let Some(k) = args.k {
        cfg.fitness.k_neighbors = k;
    }
    if let Some(folds) = args.folds {
        cfg.fitness.cv_folds = folds;
    }
    if let Some(iters) = args.iters {
        cfg.ssa.max_iterations = iters;
    }
    if let Some(pop) = args.pop {
        cfg.ssa.population_size = pop;
    }
    if let Some(roster) = &args.roster {
        cfg.roster = roster
            .iter()
            .map(|token| ClassifierKind::parse(token))
            .collect::<Result<Vec<_>>>()?;
    }
    if args.apply_mask_to_all {
        cfg.apply_mask_to_all = true;
    }
    cfg.derive_seeds();
    cfg.validate()?;
    Ok(cfg)
}

fn resolve_synth_spec(args: &SynthArgs) -> Result<SynthSpec> {
    let mut spec = match &args.config {
        Some(path) => load_config(path)?.synth.ok_or_else(|| {
            Error::config(format!(
                "config '{}' has no synth section",
                path.display()
            ))
        })?,
        None => SynthSpec::default(),
    };
    if let Some(n) = args.n {
        spec.n_samples = n;
    }
    if let Some(v) = args.informative {
        spec.n_informative = v;
    }
    if let Some(v) = args.noise {
        spec.n_noise = v;
    }
    if let Some(v) = args.separation {
        spec.class_separation = v;
    }
    if let Some(v) = args.fraud_fraction {
        spec.fraud_fraction = v;
    }
    if let Some(v) = args.seed {
        spec.seed = v;
    }
    spec.validate()?;
    Ok(spec)
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Select(args) => {
            let cfg = resolve_config(&args)?;
            commands::cmd_select(&cfg, &args.out)
        }
        Command::Compare(args) => {
            let cfg = resolve_config(&args)?;
            commands::cmd_compare(&cfg, &args.out)
        }
        Command::Oracle(args) => {
            let cfg = resolve_config(&args.run)?;
            commands::cmd_oracle(&cfg, &args.run.out, args.compare_to.as_ref(), args.max_dim)
        }
        Command::Synth(args) => {
            let spec = resolve_synth_spec(&args)?;
            commands::cmd_synth(&spec, &args.out)
        }
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) => 1,
        Error::Data(_) | Error::Io(_) => 2,
        _ => 3,
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = dispatch(cli) {
        eprintln!("error: {err}");
        std::process::exit(exit_code(&err));
    }
}
