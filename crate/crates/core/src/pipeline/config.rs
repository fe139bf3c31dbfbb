use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::ForestParams;
use crate::geom::{RadioParams, SceneConfig, UserClass};
use crate::sched::{CostVector, QosRequirement};

/// Realization counts per preset.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    /// 50 train / 10 test realizations.
    #[default]
    Desk,
    /// 500 train / 10 test realizations.
    Full,
}

impl Scale {
    pub fn realizations(self) -> (usize, usize) {
        match self {
            Scale::Desk => (50, 10),
            Scale::Full => (500, 10),
        }
    }
}

/// Test realizations draw their seeds from a disjoint range.
pub const TEST_SEED_OFFSET: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataSplit {
    Train,
    Test,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scene: SceneConfig,
    #[serde(default)]
    pub radio: RadioParams,
    pub qos: QosRequirement,
    /// Per-packet cost per link, LB-BS first.
    pub costs: CostVector,
    /// SNR threshold for a successful slot, dB.
    pub gamma_db: f64,
    /// Realization length in slots; must be a multiple of K.
    pub duration_slots: usize,
    pub slot_duration_s: f64,
    pub train_realizations: usize,
    pub test_realizations: usize,
    /// Base seed; realization r of a split uses `seed + r` (train) or
    /// `seed + TEST_SEED_OFFSET + r` (test) for its obstacle draw.
    pub seed: u64,
    #[serde(default)]
    pub forest: ForestParams,
    #[serde(default = "default_betas")]
    pub betas: Vec<f64>,
}

fn default_betas() -> Vec<f64> {
    vec![0.0, 0.25, 0.5, 0.75, 1.0]
}

impl ExperimentConfig {
    /// N=3, M=19, D=100, K=50, gamma=10 dB, 1 ms slots, 10,000-slot
    /// realizations, LB cost 100 and mm-wave cost 1.
    pub fn preset(user: UserClass, scale: Scale) -> Self {
        let scene = SceneConfig::street_canyon(user);
        let n = scene.access_points.len();
        let (train, test) = scale.realizations();
        Self {
            scene,
            radio: RadioParams::default(),
            qos: QosRequirement { packets: 100, deadline: 50 },
            costs: CostVector::standard(n, 100).expect("valid default costs"),
            gamma_db: 10.0,
            duration_slots: 10_000,
            slot_duration_s: 1e-3,
            train_realizations: train,
            test_realizations: test,
            seed: 1,
            forest: ForestParams::default(),
            betas: default_betas(),
        }
    }

    pub fn links(&self) -> usize {
        self.scene.access_points.len() + 1
    }

    pub fn beams(&self) -> usize {
        self.scene.codebooks[self.scene.access_points[0].codebook].beams
    }

    pub fn n_classes(&self) -> usize {
        1 << self.links()
    }

    pub fn windows_per_realization(&self) -> usize {
        self.duration_slots / self.qos.deadline as usize
    }

    pub fn realization_seed(&self, split: DataSplit, index: usize) -> u64 {
        let offset = match split {
            DataSplit::Train => 0,
            DataSplit::Test => TEST_SEED_OFFSET,
        };
        self.seed.wrapping_add(offset).wrapping_add(index as u64)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        self.scene.validate()?;
        self.radio.validate()?;
        QosRequirement::new(self.qos.packets, self.qos.deadline)?;
        if self.costs.len() != self.links() {
            return bad(format!("{} costs given for {} links", self.costs.len(), self.links()));
        }
        if !self.gamma_db.is_finite() {
            return bad("gamma must be finite".into());
        }
        let k = self.qos.deadline as usize;
        if self.duration_slots == 0 || self.duration_slots % k != 0 {
            return bad(format!("duration {} is not a positive multiple of K={k}", self.duration_slots));
        }
        if !(self.slot_duration_s > 0.0 && self.slot_duration_s.is_finite()) {
            return bad("slot duration must be positive".into());
        }
        if self.forest.trees == 0 {
            return bad("forest needs at least one tree".into());
        }
        if self.forest.tree.min_samples_split == 0 {
            return bad("min_samples_split must be positive".into());
        }
        if self.forest.tree.features_per_split == Some(0) {
            return bad("features_per_split must be positive".into());
        }
        if let Some(b) = self.betas.iter().find(|b| !(0.0..=1.0).contains(*b)) {
            return bad(format!("beta {b} outside [0, 1]"));
        }
        Ok(())
    }
}
