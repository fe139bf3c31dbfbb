use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use linksched::forest::{train_forest, Forest, FeatureVector, MAGIC};
use linksched::pipeline::{
    evaluate_policy, generate_dataset, read_dataset_csv, sweep_beta, sweep_training, write_dataset_csv, write_kpi_csv,
    DataSplit, EpisodeRecord, ExperimentConfig, KpiRow, Policy,
};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{ConfigError, Resolved, RunConfig};

pub const DATASET_FILE: &str = "dataset.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const MODEL_FILE: &str = "model.lsf";
pub const TRAIN_REPORT_FILE: &str = "train_report.json";
pub const KPI_CSV: &str = "kpis.csv";
pub const KPI_JSON: &str = "kpis.json";
pub const SWEEP_BETA_CSV: &str = "sweep_beta.csv";
pub const SWEEP_TRAINING_CSV: &str = "sweep_training.csv";

/// Run directory: `--out` when given, else `<output_dir>/<UTC time>-<hash>`.
pub fn run_dir(resolved: &Resolved, out: Option<&Path>) -> Result<PathBuf> {
    let dir = match out {
        Some(p) => p.to_path_buf(),
        None => {
            let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%SZ");
            resolved.output_dir.join(format!("{stamp}-{}", &resolved.hash()[..12]))
        }
    };
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut h = Sha256::new();
    let mut r = open(path)?;
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = r.read(&mut buf)?;
        if n == 0 {
            break;
        }
        h.update(&buf[..n]);
    }
    Ok(hex::encode(h.finalize()))
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    git: &'static str,
    config_hash: String,
    base_seed: u64,
    train_seeds: Vec<u64>,
    samples: usize,
    features: usize,
    classes: usize,
    dataset: &'static str,
    dataset_sha256: String,
    experiment: &'a ExperimentConfig,
}

pub fn generate(cfg: &RunConfig, out: Option<&Path>) -> Result<PathBuf> {
    let resolved = cfg.resolve()?;
    let e = &resolved.experiment;
    let dir = run_dir(&resolved, out)?;
    let episodes = generate_dataset(e, DataSplit::Train, e.train_realizations)?;
    let path = dir.join(DATASET_FILE);
    let mut w = create(&path)?;
    write_dataset_csv(&mut w, e.scene.access_points.len(), e.beams(), &episodes)?;
    w.flush()?;
    std::fs::write(dir.join("config.toml"), cfg.to_toml()?)?;
    let manifest = Manifest {
        tool: "linksched",
        version: env!("CARGO_PKG_VERSION"),
        git: env!("LINKSCHED_GIT_DESCRIBE"),
        config_hash: resolved.hash(),
        base_seed: e.seed,
        train_seeds: (0..e.train_realizations).map(|r| e.realization_seed(DataSplit::Train, r)).collect(),
        samples: episodes.len(),
        features: FeatureVector::dim(e.scene.access_points.len(), e.beams()),
        classes: e.n_classes(),
        dataset: DATASET_FILE,
        dataset_sha256: sha256_file(&path)?,
        experiment: e,
    };
    write_json(&dir.join(MANIFEST_FILE), &manifest)?;
    println!("wrote {} samples to {}", episodes.len(), path.display());
    Ok(dir)
}

fn load_dataset(e: &ExperimentConfig, path: &Path) -> Result<linksched::forest::Dataset> {
    let ds = read_dataset_csv(open(path)?, e.n_classes())?;
    let dim = FeatureVector::dim(e.scene.access_points.len(), e.beams());
    if ds.dim() != dim {
        return Err(linksched::Error::DimensionMismatch { expected: dim, got: ds.dim() }.into());
    }
    Ok(ds)
}

#[derive(Serialize)]
struct TrainReport {
    samples: usize,
    features: usize,
    trees: usize,
    training_accuracy: f64,
    class_counts: Vec<usize>,
    wall_time_s: f64,
    config_hash: String,
    model_sha256: String,
}

pub fn train(cfg: &RunConfig, dataset: &Path, out: Option<&Path>) -> Result<PathBuf> {
    let resolved = cfg.resolve()?;
    let e = &resolved.experiment;
    let ds = load_dataset(e, dataset)?;
    let dir = run_dir(&resolved, out)?;
    let start = Instant::now();
    let forest = train_forest(&ds, &e.forest)?;
    let wall = start.elapsed().as_secs_f64();
    let path = dir.join(MODEL_FILE);
    forest.save(&path)?;
    let report = TrainReport {
        samples: ds.len(),
        features: ds.dim(),
        trees: forest.trees().len(),
        training_accuracy: forest.accuracy(&ds)?,
        class_counts: ds.class_counts(),
        wall_time_s: wall,
        config_hash: resolved.hash(),
        model_sha256: sha256_file(&path)?,
    };
    write_json(&dir.join(TRAIN_REPORT_FILE), &report)?;
    println!(
        "trained {} trees on {} samples in {wall:.1}s, training accuracy {:.4}",
        report.trees, report.samples, report.training_accuracy
    );
    Ok(dir)
}

fn load_model(e: &ExperimentConfig, path: &Path) -> Result<Forest> {
    let f = Forest::read_from(open(path)?)?;
    let dim = FeatureVector::dim(e.scene.access_points.len(), e.beams());
    if f.dim() != dim {
        return Err(linksched::Error::DimensionMismatch { expected: dim, got: f.dim() }.into());
    }
    Ok(f)
}

fn test_episodes(e: &ExperimentConfig) -> Result<Vec<EpisodeRecord>> {
    let eps = generate_dataset(e, DataSplit::Test, e.test_realizations)?;
    if eps.is_empty() {
        return Err(linksched::Error::EmptyInput("test set").into());
    }
    Ok(eps)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum PolicyName {
    Genie,
    Greedy,
    MinMultiX,
    Forest,
}

pub fn evaluate(
    cfg: &RunConfig,
    model: Option<&Path>,
    policies: &[PolicyName],
    out: Option<&Path>,
) -> Result<PathBuf> {
    let resolved = cfg.resolve()?;
    let e = &resolved.experiment;
    let forest = match model {
        Some(p) => Some(load_model(e, p)?),
        None if policies.contains(&PolicyName::Forest) => {
            return Err(ConfigError("the forest policy needs --model".into()).into())
        }
        None => None,
    };
    let episodes = test_episodes(e)?;
    let dir = run_dir(&resolved, out)?;
    let mut rows = Vec::new();
    for &p in policies {
        match p {
            PolicyName::Genie => rows.push(("genie", None, Policy::Genie)),
            PolicyName::Greedy => rows.push(("greedy", None, Policy::Greedy)),
            PolicyName::MinMultiX => rows.push(("min-multi-x", None, Policy::MinMultiX)),
            PolicyName::Forest => {
                let f = forest.as_ref().expect("checked above");
                for &beta in &e.betas {
                    rows.push(("forest", Some(beta), Policy::Forest { forest: f, beta }));
                }
            }
        }
    }
    let mut out_rows = Vec::with_capacity(rows.len());
    for (name, beta, policy) in rows {
        let report = evaluate_policy(policy, &episodes, &e.qos, &e.costs)?;
        println!(
            "{name:12} beta={:<5} completed={:.4} failed={} low_band={} mean_cost={:.2}",
            beta.map_or("-".to_string(), |b: f64| b.to_string()),
            report.completed_fraction,
            fmt_opt(report.failed_fraction),
            fmt_opt(report.low_band_fraction),
            report.mean_cost
        );
        out_rows.push(KpiRow::new(name, beta, &report));
    }
    let mut w = create(&dir.join(KPI_CSV))?;
    write_kpi_csv(&mut w, &out_rows)?;
    w.flush()?;
    write_json(&dir.join(KPI_JSON), &out_rows)?;
    Ok(dir)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or("undefined".into(), |v| format!("{v:.4}"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepKind {
    Beta,
    Training,
}

pub fn sweep(
    cfg: &RunConfig,
    kind: SweepKind,
    model: Option<&Path>,
    dataset: Option<&Path>,
    out: Option<&Path>,
) -> Result<PathBuf> {
    let resolved = cfg.resolve()?;
    let e = &resolved.experiment;
    let (rows, file) = match kind {
        SweepKind::Beta => {
            let model = model.ok_or_else(|| ConfigError("a beta sweep needs --model".into()))?;
            let forest = load_model(e, model)?;
            let episodes = test_episodes(e)?;
            let reports = sweep_beta(&forest, &episodes, &e.betas, &e.qos, &e.costs)?;
            let rows: Vec<KpiRow> =
                e.betas.iter().zip(&reports).map(|(&b, r)| KpiRow::new("forest", Some(b), r)).collect();
            (rows, SWEEP_BETA_CSV)
        }
        SweepKind::Training => {
            let dataset = dataset.ok_or_else(|| ConfigError("a training sweep needs --dataset".into()))?;
            let ds = load_dataset(e, dataset)?;
            let episodes = test_episodes(e)?;
            let cells = sweep_training(
                &e.forest,
                &resolved.train_sizes,
                &resolved.tree_counts,
                &ds,
                &episodes,
                &e.qos,
                &e.costs,
                e.seed,
            )?;
            let rows = cells
                .iter()
                .map(|c| KpiRow::new("forest", Some(0.0), &c.report).with_grid(c.train_size, c.trees))
                .collect();
            (rows, SWEEP_TRAINING_CSV)
        }
    };
    let dir = run_dir(&resolved, out)?;
    let mut w = create(&dir.join(file))?;
    write_kpi_csv(&mut w, &rows)?;
    w.flush()?;
    for r in &rows {
        println!(
            "beta={:<5} size={:<6} trees={:<4} completed={:.4} failed={} low_band={}",
            r.beta.map_or("-".into(), |b| b.to_string()),
            r.train_size.map_or("-".into(), |s| s.to_string()),
            r.trees.map_or("-".into(), |s| s.to_string()),
            r.completed_fraction,
            fmt_opt(r.failed_fraction),
            fmt_opt(r.low_band_fraction)
        );
    }
    Ok(dir)
}

/// Prints a summary of a model file (detected by its magic) or a dataset CSV.
pub fn inspect(path: &Path, n_classes: usize) -> Result<()> {
    let mut head = [0u8; 8];
    let is_model = {
        let mut r = open(path)?;
        r.read(&mut head)? == 8 && &head == MAGIC
    };
    if is_model {
        let f = Forest::read_from(open(path)?)?;
        let nodes: usize = f.trees().iter().map(|t| t.node_count()).sum();
        let leaves: usize = f.trees().iter().map(|t| t.leaf_count()).sum();
        let depth = f.trees().iter().map(|t| t.depth()).max().unwrap_or(0);
        println!("model      {}", path.display());
        println!("features   {}", f.dim());
        println!("classes    {}", f.n_classes());
        println!("trees      {}", f.trees().len());
        println!("nodes      {nodes} ({leaves} leaves)");
        println!("max depth  {depth}");
        println!("params     {}", serde_json::to_string(f.params())?);
    } else {
        let ds = read_dataset_csv(open(path)?, n_classes)?;
        println!("dataset    {}", path.display());
        println!("samples    {}", ds.len());
        println!("features   {}", ds.dim());
        println!("labels     (class: count)");
        for (c, n) in ds.class_counts().iter().enumerate().filter(|(_, &n)| n > 0) {
            println!("  {c:>3}: {n}");
        }
    }
    Ok(())
}
