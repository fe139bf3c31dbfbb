//! Random-forest classifier over link combinations.

mod dataset;
mod features;
mod io;
mod model;
mod split;
mod tree;

pub use dataset::{Dataset, TrainingSample};
pub use features::FeatureVector;
pub use io::{FORMAT_VERSION, MAGIC};
pub use model::{decide, train_forest, Forest, ForestParams, PredictionOutput};
pub use split::{best_split, gini, Split};
pub use tree::{grow_tree, Tree, TreeNode, TreeParams};
