//! `linksched` command-line driver.
//!
//! Exit codes: 0 success, 1 unexpected failure, 2 invalid configuration or
//! usage, 3 I/O error, 4 infeasible input (empty or malformed data,
//! dimension mismatch).

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use linksched::geom::UserClass;
use linksched::pipeline::Scale;

use commands::{PolicyName, SweepKind};
use config::{ConfigError, RunConfig};

#[derive(Parser)]
#[command(name = "linksched", version, about = "Link-combination scheduling experiments")]
struct Cli {
    /// Worker threads; 0 uses every logical core.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

/// Flags that override the config file.
#[derive(Args, Clone, Default)]
struct Overrides {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    scale: Option<ScaleArg>,
    #[arg(long, value_enum)]
    user: Option<UserArg>,
    #[arg(long)]
    train_realizations: Option<usize>,
    #[arg(long)]
    test_realizations: Option<usize>,
    #[arg(long)]
    trees: Option<usize>,
    /// Comma-separated fallback thresholds.
    #[arg(long, value_delimiter = ',')]
    betas: Option<Vec<f64>>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ScaleArg {
    Desk,
    Full,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum UserArg {
    Pedestrian,
    SmallVehicle,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Output directory (default: <output_dir>/<timestamp>-<config hash>).
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate training realizations and write the labeled dataset.
    Generate {
        #[command(flatten)]
        common: Common,
    },
    /// Train a random forest on a dataset CSV.
    Train {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        dataset: PathBuf,
    },
    /// Evaluate policies on freshly simulated test realizations.
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "genie,greedy,min-multi-x,forest")]
        policies: Vec<PolicyName>,
    },
    /// Sweep the fallback threshold or the training-set size and tree count.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        kind: SweepKind,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        dataset: Option<PathBuf>,
    },
    /// Summarize a model or dataset file.
    Inspect {
        path: PathBuf,
        #[arg(long, short)]
        config: Option<PathBuf>,
    },
}

fn load_config(path: Option<&Path>, o: &Overrides) -> Result<RunConfig> {
    let mut cfg = match path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = o.seed {
        cfg.seed = Some(s);
    }
    if let Some(s) = o.scale {
        cfg.scale = match s {
            ScaleArg::Desk => Scale::Desk,
            ScaleArg::Full => Scale::Full,
        };
    }
    if let Some(u) = o.user {
        cfg.user = Some(match u {
            UserArg::Pedestrian => UserClass::Pedestrian,
            UserArg::SmallVehicle => UserClass::SmallVehicle,
        });
    }
    if o.train_realizations.is_some() {
        cfg.train_realizations = o.train_realizations;
    }
    if o.test_realizations.is_some() {
        cfg.test_realizations = o.test_realizations;
    }
    if let Some(t) = o.trees {
        let mut f = cfg.forest.take().unwrap_or_default();
        f.trees = t;
        cfg.forest = Some(f);
    }
    if o.betas.is_some() {
        cfg.betas = o.betas.clone();
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    if cli.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.workers)
            .build_global()
            .map_err(|e| ConfigError(format!("worker pool: {e}")))?;
    }
    match cli.command {
        Command::Generate { common } => {
            let cfg = load_config(common.config.as_deref(), &common.overrides)?;
            let dir = commands::generate(&cfg, common.out.as_deref())?;
            println!("run directory {}", dir.display());
        }
        Command::Train { common, dataset } => {
            let cfg = load_config(common.config.as_deref(), &common.overrides)?;
            let dir = commands::train(&cfg, &dataset, common.out.as_deref())?;
            println!("run directory {}", dir.display());
        }
        Command::Evaluate { common, model, policies } => {
            let cfg = load_config(common.config.as_deref(), &common.overrides)?;
            let dir = commands::evaluate(&cfg, model.as_deref(), &policies, common.out.as_deref())?;
            println!("run directory {}", dir.display());
        }
        Command::Sweep { common, kind, model, dataset } => {
            let cfg = load_config(common.config.as_deref(), &common.overrides)?;
            let dir = commands::sweep(&cfg, kind, model.as_deref(), dataset.as_deref(), common.out.as_deref())?;
            println!("run directory {}", dir.display());
        }
        Command::Inspect { path, config } => {
            let cfg = load_config(config.as_deref(), &Overrides::default())?;
            commands::inspect(&path, cfg.resolve()?.experiment.n_classes())?;
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use linksched::Error as E;
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::InvalidConfig(_) | E::LinkCapExceeded(_) => 2,
                E::Io(_) => 3,
                E::Csv(c) if matches!(c.kind(), csv::ErrorKind::Io(_)) => 3,
                _ => 4,
            };
        }
        if cause.is::<ConfigError>() {
            return 2;
        }
        if cause.is::<std::io::Error>() {
            return 3;
        }
        if cause.is::<serde_json::Error>() {
            return 4;
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
