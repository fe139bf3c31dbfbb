use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, DataSplit};
use crate::error::Result;
use crate::forest::{Dataset, FeatureVector};
use crate::geom::{align_and_measure, build_scene, realize_channel_with_beams, ChannelRealization, MeasurementVector, UserClass};
use crate::sched::{label_sample, Label};

/// One scheduling window: the alignment measurement at its first slot and
/// the genie channel of the K slots that follow.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub measurement: MeasurementVector,
    pub channel: ChannelRealization,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    pub id: usize,
    pub seed: u64,
    pub user: UserClass,
    pub duration_slots: usize,
    pub windows: Vec<Window>,
}

/// Training/evaluation unit derived from one window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub realization: usize,
    pub window: usize,
    pub features: FeatureVector,
    pub label: Label,
    pub measurement: MeasurementVector,
    pub channel: ChannelRealization,
}

/// Drops the obstacles with `seed` and walks the user along its path for
/// the configured duration, one window of K slots at a time.
pub fn simulate_realization(config: &ExperimentConfig, id: usize, seed: u64) -> Result<Realization> {
    config.validate()?;
    let mut scene_cfg = config.scene.clone();
    scene_cfg.seed = seed;
    let mut scene = build_scene(&scene_cfg)?;
    let k = config.qos.deadline as usize;
    let mut windows = Vec::with_capacity(config.windows_per_realization());
    for _ in 0..config.windows_per_realization() {
        let measurement = align_and_measure(&scene, &config.radio);
        let channel = realize_channel_with_beams(
            &mut scene,
            &measurement.best_beams,
            k,
            config.slot_duration_s,
            &config.radio,
            config.gamma_db,
        )?;
        windows.push(Window { measurement, channel });
    }
    Ok(Realization { id, seed, user: config.scene.user.class, duration_slots: config.duration_slots, windows })
}

/// Labels every window of `realization` with the modified-IP combination.
pub fn episodes_of(config: &ExperimentConfig, realization: &Realization) -> Vec<EpisodeRecord> {
    realization
        .windows
        .iter()
        .enumerate()
        .map(|(w, win)| EpisodeRecord {
            realization: realization.id,
            window: w,
            features: FeatureVector::from_measurement(&win.measurement, &config.qos),
            label: label_sample(&win.channel, &config.qos, &config.costs),
            measurement: win.measurement.clone(),
            channel: win.channel.clone(),
        })
        .collect()
}

/// Simulates realizations `0..count` of `split` in parallel and returns
/// their episodes in (realization, window) order.
pub fn generate_dataset(config: &ExperimentConfig, split: DataSplit, count: usize) -> Result<Vec<EpisodeRecord>> {
    generate_range(config, split, 0..count)
}

/// As [`generate_dataset`] for the realizations in `range`.
pub fn generate_range(
    config: &ExperimentConfig,
    split: DataSplit,
    range: std::ops::Range<usize>,
) -> Result<Vec<EpisodeRecord>> {
    config.validate()?;
    let per: Vec<Vec<EpisodeRecord>> = range
        .into_par_iter()
        .map(|r| {
            let real = simulate_realization(config, r, config.realization_seed(split, r))?;
            Ok(episodes_of(config, &real))
        })
        .collect::<Result<_>>()?;
    Ok(per.into_iter().flatten().collect())
}

/// Feature matrix and labels of `episodes`.
pub fn to_dataset(config: &ExperimentConfig, episodes: &[EpisodeRecord]) -> Result<Dataset> {
    let dim = FeatureVector::dim(config.scene.access_points.len(), config.beams());
    let mut ds = Dataset::new(dim, config.n_classes());
    for e in episodes {
        ds.push(e.features.as_slice(), e.label.0)?;
    }
    Ok(ds)
}
