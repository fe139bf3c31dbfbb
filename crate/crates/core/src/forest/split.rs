//! Gini impurity and exhaustive CART split search.

use serde::{Deserialize, Serialize};

use super::dataset::{Dataset, TrainingSample};
use crate::error::{Error, Result};

/// Gini impurity `1 - sum_c p_c^2` of a class histogram.
pub fn gini(counts: &[u32]) -> Result<f64> {
    let total: u64 = counts.iter().map(|&c| c as u64).sum();
    if total == 0 {
        return Err(Error::EmptyInput("gini of an empty histogram"));
    }
    let sq: u64 = counts.iter().map(|&c| c as u64 * c as u64).sum();
    Ok(1.0 - sq as f64 / (total as f64 * total as f64))
}

/// A candidate split `x[feature] <= threshold`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    /// Size-weighted Gini impurity of the two children.
    pub weighted_impurity: f64,
    /// Parent impurity minus `weighted_impurity`; exactly 0 when the split
    /// does not lower the impurity, positive otherwise.
    pub gain: f64,
}

/// Reusable buffers for the split sweep.
#[derive(Default)]
pub(crate) struct SplitScratch {
    pairs: Vec<(f64, u32)>,
    left: Vec<u32>,
    right: Vec<u32>,
}

/// Best candidate split of the rows `indices` of `data` over `features`,
/// even when it leaves the impurity unchanged (tree growth uses such splits
/// to get past XOR-like configurations). `None` for pure nodes or when no
/// feature has two distinct values.
///
/// Candidate thresholds are midpoints between consecutive distinct sorted
/// values. Among equal-quality candidates the earliest feature in
/// `features`, then the lowest threshold, wins.
pub(crate) fn find_split(
    data: &Dataset,
    indices: &[usize],
    features: &[usize],
    scratch: &mut SplitScratch,
) -> Option<Split> {
    let n = indices.len();
    if n < 2 {
        return None;
    }
    let classes = data.n_classes();
    scratch.right.clear();
    scratch.right.resize(classes, 0);
    for &i in indices {
        scratch.right[data.label(i)] += 1;
    }
    let parent_sq: u64 = scratch.right.iter().map(|&c| c as u64 * c as u64).sum();
    let parent = 1.0 - parent_sq as f64 / (n as f64 * n as f64);
    if parent <= 0.0 {
        return None;
    }
    let totals = scratch.right.clone();

    // score = S_l / n_l + S_r / n_r, where S = sum of squared class counts;
    // weighted child impurity = 1 - score / n, so maximizing score is enough.
    // Scores are compared exactly as fractions (num, den) so ties are real ties.
    let mut best: Option<((u128, u128), usize, f64)> = None;
    for &f in features {
        scratch.pairs.clear();
        scratch.pairs.extend(indices.iter().map(|&i| (data.value(i, f), data.label(i) as u32)));
        scratch.pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        if scratch.pairs[0].0 == scratch.pairs[n - 1].0 {
            continue;
        }
        scratch.left.clear();
        scratch.left.resize(classes, 0);
        scratch.right.copy_from_slice(&totals);
        let (mut sq_l, mut sq_r) = (0u64, parent_sq);
        for pos in 0..n - 1 {
            let (v, c) = scratch.pairs[pos];
            let c = c as usize;
            sq_l += 2 * scratch.left[c] as u64 + 1;
            sq_r -= 2 * scratch.right[c] as u64 - 1;
            scratch.left[c] += 1;
            scratch.right[c] -= 1;
            let next = scratch.pairs[pos + 1].0;
            if v == next {
                continue;
            }
            let n_l = (pos + 1) as u128;
            let n_r = (n - pos - 1) as u128;
            let score = (sq_l as u128 * n_r + sq_r as u128 * n_l, n_l * n_r);
            if best.is_none_or(|(b, _, _)| score.0 * b.1 > b.0 * score.1) {
                let mut t = 0.5 * (v + next);
                if t >= next {
                    t = v;
                }
                best = Some((score, f, t));
            }
        }
    }
    let (score, feature, threshold) = best?;
    let weighted = 1.0 - score.0 as f64 / score.1 as f64 / n as f64;
    let improves = score.0 * n as u128 > parent_sq as u128 * score.1;
    let gain = if improves { (parent - weighted).max(f64::MIN_POSITIVE) } else { 0.0 };
    Some(Split { feature, threshold, weighted_impurity: weighted, gain })
}

/// Best split of `samples` restricted to `feature_subset`, or `None` when no
/// threshold lowers the size-weighted Gini impurity.
pub fn best_split(samples: &[TrainingSample], feature_subset: &[usize]) -> Option<Split> {
    if samples.len() < 2 {
        return None;
    }
    let n_classes = samples.iter().map(|s| s.label + 1).max().unwrap_or(1);
    let data = Dataset::from_samples(samples, n_classes).ok()?;
    let indices: Vec<usize> = (0..samples.len()).collect();
    find_split(&data, &indices, feature_subset, &mut SplitScratch::default()).filter(|s| s.gain > 0.0)
}
