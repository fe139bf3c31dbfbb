use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use super::tree::{grow_tree, Tree, TreeParams};
use crate::error::{Error, Result};
use crate::sched::LinkCombination;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ForestParams {
    pub trees: usize,
    pub tree: TreeParams,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self { trees: 200, tree: TreeParams::default(), bootstrap: true, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Forest {
    pub(crate) params: ForestParams,
    pub(crate) dim: usize,
    pub(crate) n_classes: usize,
    pub(crate) trees: Vec<Tree>,
}

/// Class probabilities and the one-hot argmax decision.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictionOutput {
    pub probabilities: Vec<f64>,
    /// Argmax class (ties to the lower index).
    pub class: usize,
}

impl PredictionOutput {
    pub fn from_probabilities(probabilities: Vec<f64>) -> Self {
        let mut class = 0;
        for (j, &p) in probabilities.iter().enumerate() {
            if p > probabilities[class] {
                class = j;
            }
        }
        Self { probabilities, class }
    }

    pub fn max_probability(&self) -> f64 {
        self.probabilities[self.class]
    }

    pub fn one_hot(&self) -> Vec<u8> {
        (0..self.probabilities.len()).map(|j| (j == self.class) as u8).collect()
    }
}

/// Per-tree RNG stream derived from the forest seed.
fn tree_rng(seed: u64, tree: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tree as u64 + 1);
    rng
}

/// Trains `params.trees` CART trees, each on its own bootstrap resample (or
/// the full set when bootstrap is off) with its own RNG stream. Trees are
/// grown in parallel; the result depends only on the data order and seed.
pub fn train_forest(data: &Dataset, params: &ForestParams) -> Result<Forest> {
    if data.is_empty() {
        return Err(Error::EmptyInput("training set"));
    }
    if params.trees == 0 {
        return Err(Error::InvalidConfig("forest needs at least one tree".into()));
    }
    if data.dim() == 0 {
        return Err(Error::InvalidConfig("training set has no features".into()));
    }
    let n = data.len();
    let trees = (0..params.trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = tree_rng(params.seed, t);
            let rows: Vec<usize> = if params.bootstrap {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            grow_tree(data, &rows, &params.tree, &mut rng)
        })
        .collect();
    Ok(Forest { params: params.clone(), dim: data.dim(), n_classes: data.n_classes(), trees })
}

impl Forest {
    pub fn from_trees(params: ForestParams, dim: usize, n_classes: usize, trees: Vec<Tree>) -> Result<Self> {
        if trees.is_empty() {
            return Err(Error::InvalidConfig("forest needs at least one tree".into()));
        }
        for t in &trees {
            for node in &t.nodes {
                if node.feature != u32::MAX && node.feature as usize >= dim {
                    return Err(Error::Malformed("tree splits on a feature beyond the forest dimension".into()));
                }
            }
            if t.histograms.iter().any(|&(c, _)| c as usize >= n_classes) {
                return Err(Error::Malformed("leaf histogram has a class beyond the class count".into()));
            }
        }
        Ok(Self { params, dim, n_classes, trees })
    }

    pub fn params(&self) -> &ForestParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    /// Mean of the trees' normalized leaf histograms.
    pub fn predict_proba(&self, x: &[f64]) -> Result<PredictionOutput> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        let mut p = vec![0.0; self.n_classes];
        for t in &self.trees {
            t.accumulate(x, 1.0, &mut p);
        }
        // summing unit-weight fractions first keeps every entry <= 1 exactly
        let n = self.trees.len() as f64;
        p.iter_mut().for_each(|v| *v /= n);
        Ok(PredictionOutput::from_probabilities(p))
    }

    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        Ok(self.predict_proba(x)?.class)
    }

    /// Fraction of rows whose argmax class equals the label.
    pub fn accuracy(&self, data: &Dataset) -> Result<f64> {
        if data.is_empty() {
            return Err(Error::EmptyInput("evaluation set"));
        }
        let mut hits = 0;
        for r in 0..data.len() {
            if self.predict(data.row(r))? == data.label(r) {
                hits += 1;
            }
        }
        Ok(hits as f64 / data.len() as f64)
    }
}

/// Trusts the forest only when its top probability strictly exceeds `beta`;
/// otherwise falls back to every link.
pub fn decide(pred: &PredictionOutput, beta: f64, all_links: LinkCombination) -> LinkCombination {
    if pred.max_probability() > beta {
        LinkCombination::from_index(pred.class)
    } else {
        all_links
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::tree::RawNode;

    fn leaf_tree(class: u32) -> Tree {
        Tree {
            nodes: vec![RawNode { feature: u32::MAX, threshold: 0.0, a: 0, b: 1 }],
            histograms: vec![(class, 5)],
        }
    }

    #[test]
    fn identical_pure_trees() {
        let f = Forest::from_trees(ForestParams::default(), 2, 16, vec![leaf_tree(3), leaf_tree(3)]).unwrap();
        let p = f.predict_proba(&[0.0, 0.0]).unwrap();
        assert_eq!(p.probabilities[3], 1.0);
        assert_eq!(p.probabilities.iter().sum::<f64>(), 1.0);
        assert_eq!(p.class, 3);
        assert_eq!(p.one_hot().iter().map(|&v| v as usize).sum::<usize>(), 1);
    }

    #[test]
    fn split_vote_ties_to_lower_class() {
        let f = Forest::from_trees(ForestParams::default(), 1, 4, vec![leaf_tree(2), leaf_tree(1)]).unwrap();
        let p = f.predict_proba(&[0.0]).unwrap();
        assert_eq!(p.probabilities, vec![0.0, 0.5, 0.5, 0.0]);
        assert_eq!(p.class, 1);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let f = Forest::from_trees(ForestParams::default(), 2, 4, vec![leaf_tree(0)]).unwrap();
        assert!(matches!(f.predict_proba(&[1.0]), Err(Error::DimensionMismatch { expected: 2, got: 1 })));
    }

    #[test]
    fn decide_threshold_rule() {
        let all = LinkCombination::all(4);
        let confident = PredictionOutput::from_probabilities(vec![0.05, 0.05, 0.0, 0.0, 0.0, 0.0, 0.9]);
        assert_eq!(decide(&confident, 0.5, all), LinkCombination::from_index(6));
        let unsure = PredictionOutput::from_probabilities(vec![0.3, 0.3, 0.2, 0.2]);
        assert_eq!(decide(&unsure, 0.5, all), all);
        assert_eq!(decide(&unsure, 0.0, all), LinkCombination::from_index(0));
        // strict inequality: p = beta falls back, beta = 1 always falls back
        let exact = PredictionOutput::from_probabilities(vec![0.5, 0.5]);
        assert_eq!(decide(&exact, 0.5, all), all);
        let sure = PredictionOutput::from_probabilities(vec![0.0, 1.0]);
        assert_eq!(decide(&sure, 1.0, all), all);
    }

    #[test]
    fn unanimous_large_forest_stays_at_one() {
        let trees = (0..200).map(|_| leaf_tree(5)).collect();
        let f = Forest::from_trees(ForestParams::default(), 1, 16, trees).unwrap();
        let p = f.predict_proba(&[0.0]).unwrap();
        assert_eq!(p.probabilities[5], 1.0);
        assert_eq!(decide(&p, 1.0, LinkCombination::all(4)), LinkCombination::all(4));
    }

    #[test]
    fn empty_training_set_rejected() {
        let d = Dataset::new(2, 2);
        assert!(matches!(train_forest(&d, &ForestParams::default()), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn single_tree_without_bootstrap_equals_grow_tree() {
        let mut d = Dataset::new(2, 3);
        for i in 0..30 {
            d.push(&[(i % 7) as f64, (i % 4) as f64], i % 3).unwrap();
        }
        let params = ForestParams { trees: 1, bootstrap: false, seed: 11, ..Default::default() };
        let f = train_forest(&d, &params).unwrap();
        let rows: Vec<usize> = (0..d.len()).collect();
        let t = grow_tree(&d, &rows, &params.tree, &mut tree_rng(11, 0));
        assert_eq!(f.trees()[0], t);
    }

    #[test]
    fn same_seed_same_forest() {
        let mut d = Dataset::new(3, 2);
        for i in 0..50 {
            d.push(&[(i * 7 % 11) as f64, (i % 3) as f64, i as f64], (i % 5 == 0) as usize).unwrap();
        }
        let params = ForestParams { trees: 8, seed: 5, ..Default::default() };
        assert_eq!(train_forest(&d, &params).unwrap(), train_forest(&d, &params).unwrap());
    }
}
