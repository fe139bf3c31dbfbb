//! CART classification tree grown breadth-first with per-node random
//! feature subsets.

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use super::split::{find_split, SplitScratch};

const LEAF: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TreeParams {
    /// Depth cap (root has depth 0); `None` for unlimited.
    pub max_depth: Option<usize>,
    /// Leaf-count cap; `None` for unlimited.
    pub max_leaves: Option<usize>,
    pub min_samples_split: usize,
    /// Features examined per node; `None` means `ceil(sqrt(dim))`.
    pub features_per_split: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self { max_depth: Some(20), max_leaves: None, min_samples_split: 2, features_per_split: None }
    }
}

impl TreeParams {
    pub fn features_for(&self, dim: usize) -> usize {
        self.features_per_split
            .unwrap_or_else(|| (dim as f64).sqrt().ceil() as usize)
            .clamp(1, dim.max(1))
    }
}

/// Flat node record. Internal nodes hold the split and child ids; leaves
/// hold an (offset, length) window into the tree's histogram pool.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct RawNode {
    pub feature: u32,
    pub threshold: f64,
    pub a: u32,
    pub b: u32,
}

/// Borrowed view of one node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TreeNode<'a> {
    Internal { feature: usize, threshold: f64, left: usize, right: usize },
    /// Sparse class histogram: (class, count) pairs with count > 0, sorted by class.
    Leaf { counts: &'a [(u32, u32)] },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tree {
    pub(crate) nodes: Vec<RawNode>,
    pub(crate) histograms: Vec<(u32, u32)>,
}

impl Tree {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.feature == LEAF).count()
    }

    pub fn depth(&self) -> usize {
        fn go(t: &Tree, i: usize) -> usize {
            match t.node(i) {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Internal { left, right, .. } => 1 + go(t, left).max(go(t, right)),
            }
        }
        go(self, 0)
    }

    pub fn node(&self, id: usize) -> TreeNode<'_> {
        let n = &self.nodes[id];
        if n.feature == LEAF {
            TreeNode::Leaf { counts: &self.histograms[n.a as usize..(n.a + n.b) as usize] }
        } else {
            TreeNode::Internal {
                feature: n.feature as usize,
                threshold: n.threshold,
                left: n.a as usize,
                right: n.b as usize,
            }
        }
    }

    /// Histogram of the leaf reached by `x`.
    pub fn leaf_for(&self, x: &[f64]) -> &[(u32, u32)] {
        let mut id = 0;
        loop {
            match self.node(id) {
                TreeNode::Leaf { counts } => return counts,
                TreeNode::Internal { feature, threshold, left, right } => {
                    id = if x[feature] <= threshold { left } else { right };
                }
            }
        }
    }

    /// Majority class of the leaf reached by `x` (ties to the lower class).
    pub fn predict(&self, x: &[f64]) -> usize {
        let mut best = (0u32, 0u32);
        for &(c, n) in self.leaf_for(x) {
            if n > best.1 {
                best = (c, n);
            }
        }
        best.0 as usize
    }

    /// Adds `weight` times the normalized leaf histogram for `x` to `out`.
    pub(crate) fn accumulate(&self, x: &[f64], weight: f64, out: &mut [f64]) {
        let leaf = self.leaf_for(x);
        let total: u64 = leaf.iter().map(|&(_, n)| n as u64).sum();
        let scale = weight / total as f64;
        for &(c, n) in leaf {
            out[c as usize] += n as f64 * scale;
        }
    }
}

fn push_leaf(tree: &mut Tree, id: usize, data: &Dataset, rows: &[usize], counts: &mut Vec<u32>) {
    counts.clear();
    counts.resize(data.n_classes(), 0);
    for &r in rows {
        counts[data.label(r)] += 1;
    }
    let offset = tree.histograms.len() as u32;
    tree.histograms
        .extend(counts.iter().enumerate().filter(|(_, &n)| n > 0).map(|(c, &n)| (c as u32, n)));
    let len = tree.histograms.len() as u32 - offset;
    tree.nodes[id] = RawNode { feature: LEAF, threshold: 0.0, a: offset, b: len };
}

/// Grows a tree on the rows `rows` of `data` (duplicates allowed, as in a
/// bootstrap resample). Growth stops at the depth cap, the leaf cap, below
/// `min_samples_split` rows, at pure nodes, or when the drawn features
/// offer no impurity-reducing split.
pub fn grow_tree<R: Rng + ?Sized>(data: &Dataset, rows: &[usize], params: &TreeParams, rng: &mut R) -> Tree {
    assert!(!rows.is_empty(), "cannot grow a tree on zero samples");
    let mut rows = rows.to_vec();
    let dim = data.dim();
    let mtry = params.features_for(dim);
    let mut tree = Tree { nodes: vec![RawNode { feature: LEAF, threshold: 0.0, a: 0, b: 0 }], histograms: Vec::new() };
    let mut scratch = SplitScratch::default();
    let mut counts = Vec::new();
    let mut leaves = 1usize;
    let mut queue = VecDeque::from([(0usize, 0usize, rows.len(), 0usize)]);

    while let Some((id, start, end, depth)) = queue.pop_front() {
        let node_rows = &mut rows[start..end];
        let n = node_rows.len();
        let at_cap = params.max_depth.is_some_and(|d| depth >= d)
            || params.max_leaves.is_some_and(|l| leaves >= l)
            || n < params.min_samples_split.max(2);
        let first = data.label(node_rows[0]);
        let pure = node_rows.iter().all(|&r| data.label(r) == first);
        if at_cap || pure {
            push_leaf(&mut tree, id, data, node_rows, &mut counts);
            continue;
        }
        let features = rand::seq::index::sample(rng, dim, mtry).into_vec();
        let Some(split) = find_split(data, node_rows, &features, &mut scratch) else {
            push_leaf(&mut tree, id, data, node_rows, &mut counts);
            continue;
        };
        // in-place partition: rows with x[f] <= t first
        let mut mid = 0;
        for i in 0..n {
            if data.value(node_rows[i], split.feature) <= split.threshold {
                node_rows.swap(i, mid);
                mid += 1;
            }
        }
        debug_assert!(mid > 0 && mid < n);
        let left = tree.nodes.len();
        let right = left + 1;
        tree.nodes.push(RawNode { feature: LEAF, threshold: 0.0, a: 0, b: 0 });
        tree.nodes.push(RawNode { feature: LEAF, threshold: 0.0, a: 0, b: 0 });
        tree.nodes[id] = RawNode {
            feature: split.feature as u32,
            threshold: split.threshold,
            a: left as u32,
            b: right as u32,
        };
        leaves += 1;
        queue.push_back((left, start, start + mid, depth + 1));
        queue.push_back((right, start + mid, end, depth + 1));
    }
    tree
}
