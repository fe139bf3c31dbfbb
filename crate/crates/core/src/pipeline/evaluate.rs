use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kpi::{compute_kpis, KpiReport};
use super::realization::EpisodeRecord;
use crate::error::{Error, Result};
use crate::forest::{decide, train_forest, Dataset, Forest, ForestParams, PredictionOutput};
use crate::sched::{execute_policy, genie_solve, greedy_multi_x, min_multi_x, CostVector, LinkCombination, QosRequirement, ScheduleResult};

#[derive(Clone, Copy, Debug)]
pub enum Policy<'a> {
    /// Optimal schedule with full knowledge of the window's channel.
    Genie,
    Greedy,
    MinMultiX,
    Forest { forest: &'a Forest, beta: f64 },
}

impl Policy<'_> {
    pub fn name(&self) -> &'static str {
        match self {
            Policy::Genie => "genie",
            Policy::Greedy => "greedy",
            Policy::MinMultiX => "min-multi-x",
            Policy::Forest { .. } => "forest",
        }
    }

    pub fn beta(&self) -> Option<f64> {
        match self {
            Policy::Forest { beta, .. } => Some(*beta),
            _ => None,
        }
    }
}

/// Runs `policy` on every episode. Only the genie sees the channel ahead of
/// time; the others decide from the alignment measurement.
pub fn schedule_episodes(
    policy: Policy<'_>,
    episodes: &[EpisodeRecord],
    qos: &QosRequirement,
    costs: &CostVector,
) -> Result<Vec<ScheduleResult>> {
    if let Policy::Forest { forest, .. } = policy {
        if let Some(e) = episodes.iter().find(|e| e.features.len() != forest.dim()) {
            return Err(Error::DimensionMismatch { expected: forest.dim(), got: e.features.len() });
        }
    }
    Ok(episodes
        .par_iter()
        .map(|e| {
            let g = &e.channel;
            match policy {
                Policy::Genie => genie_solve(g, qos, costs),
                Policy::Greedy => greedy_multi_x(g, qos, costs),
                Policy::MinMultiX => execute_policy(min_multi_x(&e.measurement, qos), g, qos, costs),
                Policy::Forest { forest, beta } => {
                    let p = forest.predict_proba(e.features.as_slice()).expect("dimension checked");
                    execute_policy(decide(&p, beta, LinkCombination::all(g.links())), g, qos, costs)
                }
            }
        })
        .collect())
}

fn genie_infeasible(episodes: &[EpisodeRecord], qos: &QosRequirement, costs: &CostVector) -> usize {
    episodes.par_iter().filter(|e| !genie_solve(&e.channel, qos, costs).feasible).count()
}

pub fn evaluate_policy(
    policy: Policy<'_>,
    episodes: &[EpisodeRecord],
    qos: &QosRequirement,
    costs: &CostVector,
) -> Result<KpiReport> {
    let results = schedule_episodes(policy, episodes, qos, costs)?;
    let mut report = compute_kpis(&results, qos)?;
    report.genie_infeasible = genie_infeasible(episodes, qos, costs);
    Ok(report)
}

/// One report per threshold, on the same forest and test set. Predictions
/// are computed once.
pub fn sweep_beta(
    forest: &Forest,
    episodes: &[EpisodeRecord],
    betas: &[f64],
    qos: &QosRequirement,
    costs: &CostVector,
) -> Result<Vec<KpiReport>> {
    if betas.is_empty() {
        return Ok(Vec::new());
    }
    if episodes.is_empty() {
        return Err(Error::EmptyInput("test episodes"));
    }
    let preds: Vec<PredictionOutput> =
        episodes.par_iter().map(|e| forest.predict_proba(e.features.as_slice())).collect::<Result<_>>()?;
    let infeasible = genie_infeasible(episodes, qos, costs);
    betas
        .iter()
        .map(|&beta| {
            let results: Vec<ScheduleResult> = episodes
                .par_iter()
                .zip(&preds)
                .map(|(e, p)| {
                    let g = &e.channel;
                    execute_policy(decide(p, beta, LinkCombination::all(g.links())), g, qos, costs)
                })
                .collect();
            let mut r = compute_kpis(&results, qos)?;
            r.genie_infeasible = infeasible;
            Ok(r)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainingCell {
    pub train_size: usize,
    pub trees: usize,
    pub report: KpiReport,
}

/// Trains one forest per (size, tree count) on prefixes of a seeded shuffle
/// of `train` and evaluates each at beta = 0.
#[allow(clippy::too_many_arguments)]
pub fn sweep_training(
    params: &ForestParams,
    train_sizes: &[usize],
    tree_counts: &[usize],
    train: &Dataset,
    test: &[EpisodeRecord],
    qos: &QosRequirement,
    costs: &CostVector,
    shuffle_seed: u64,
) -> Result<Vec<TrainingCell>> {
    if let Some(&s) = train_sizes.iter().find(|&&s| s > train.len() || s == 0) {
        return Err(Error::InvalidConfig(format!("training size {s} outside 1..={}", train.len())));
    }
    let mut order: Vec<usize> = (0..train.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle_seed));
    let mut cells = Vec::with_capacity(train_sizes.len() * tree_counts.len());
    for &size in train_sizes {
        let subset = train.subset(&order[..size]);
        for &trees in tree_counts {
            let p = ForestParams { trees, ..params.clone() };
            let forest = train_forest(&subset, &p)?;
            let report = evaluate_policy(Policy::Forest { forest: &forest, beta: 0.0 }, test, qos, costs)?;
            cells.push(TrainingCell { train_size: size, trees, report });
        }
    }
    Ok(cells)
}
