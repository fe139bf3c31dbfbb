//! TOML run configuration. Every field is optional; omitted values fall
//! back to the preset for `user` and `scale`.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use linksched::forest::ForestParams;
use linksched::geom::{RadioParams, SceneConfig, UserClass};
use linksched::pipeline::{ExperimentConfig, Scale};
use linksched::sched::{CostVector, QosRequirement};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

fn config_err(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub scale: Scale,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub user: Option<UserClass>,
    /// Scene description in its own TOML file, relative to this config.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scene_file: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scene: Option<SceneConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qos: Option<QosRequirement>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub costs: Option<CostVector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radio: Option<RadioParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration_slots: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slot_duration_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train_realizations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_realizations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forest: Option<ForestParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub betas: Option<Vec<f64>>,
    /// Training-sweep grid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train_sizes: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tree_counts: Option<Vec<usize>>,
    /// Parent of the timestamped run directories.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

/// Config after resolving presets and the scene file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Resolved {
    pub experiment: ExperimentConfig,
    pub train_sizes: Vec<usize>,
    pub tree_counts: Vec<usize>,
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        if let Some(scene) = &cfg.scene_file {
            if scene.is_relative() {
                cfg.scene_file = Some(path.parent().unwrap_or(Path::new(".")).join(scene));
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| config_err(format!("serializing config: {e}")))
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let user = self.user.unwrap_or(UserClass::SmallVehicle);
        let mut e = ExperimentConfig::preset(user, self.scale);
        match (&self.scene, &self.scene_file) {
            (Some(_), Some(_)) => return Err(config_err("give either scene or scene_file, not both")),
            (Some(s), None) => e.scene = s.clone(),
            (None, Some(p)) => {
                if !p.exists() {
                    return Err(config_err(format!("scene file {} does not exist", p.display())));
                }
                let text = std::fs::read_to_string(p).with_context(|| format!("reading scene {}", p.display()))?;
                e.scene = toml::from_str(&text).map_err(|e| config_err(format!("{}: {e}", p.display())))?;
            }
            (None, None) => {}
        }
        if let Some(u) = self.user {
            e.scene.user.class = u;
        }
        if let Some(q) = self.qos {
            e.qos = q;
        }
        e.costs = match &self.costs {
            Some(c) => c.clone(),
            None => CostVector::standard(e.scene.access_points.len(), 10)?,
        };
        if let Some(r) = &self.radio {
            e.radio = r.clone();
        }
        macro_rules! take {
            ($($f:ident),*) => {$( if let Some(v) = self.$f.clone() { e.$f = v; } )*};
        }
        take!(gamma_db, duration_slots, slot_duration_s, train_realizations, test_realizations, seed, forest, betas);
        e.validate().map_err(|err| config_err(err.to_string()))?;
        let train_sizes = self.train_sizes.clone().unwrap_or_else(|| vec![1_000, 10_000, 50_000]);
        let tree_counts = self.tree_counts.clone().unwrap_or_else(|| vec![10, 50, 200]);
        if train_sizes.contains(&0) || tree_counts.contains(&0) {
            return Err(config_err("training sweep sizes and tree counts must be positive"));
        }
        Ok(Resolved {
            experiment: e,
            train_sizes,
            tree_counts,
            output_dir: self.output_dir.clone().unwrap_or_else(|| PathBuf::from("runs")),
        })
    }
}

impl Resolved {
    /// SHA-256 of the resolved experiment, hex encoded. Output locations do
    /// not take part.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(&(&self.experiment, &self.train_sizes, &self.tree_counts))
            .expect("config serializes");
        hex::encode(Sha256::digest(&canonical))
    }
}
