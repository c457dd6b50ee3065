//! Gradient-boosted regression trees for binary classification.
//!
//! Two training modes share one tree grower:
//!
//! * `newton` (default) — second-order: leaf weights come from the
//!   L1/L2-regularized closed form over gradient/Hessian sums.
//! * `friedman` — first-order: after a tree is grown, a per-leaf Newton
//!   line search on the actual loss rescales each leaf weight before
//!   shrinkage is applied.
//!
//! Split finding is sparsity-aware (each split learns a default direction
//! for missing values) and evaluates candidate thresholds from
//! Hessian-weighted quantiles. Training is deterministic for a fixed seed
//! regardless of the rayon worker count.

mod importance;
mod loss;
mod model;
mod params;
mod split;
mod train;
mod tree;

pub use importance::{feature_importance, ImportanceKind};
pub use loss::{
    compute_gradients, init_base_score, log_loss_row, logistic_grad_hess, mean_log_loss, sigmoid,
    GradientPair,
};
pub use model::{BoosterModel, MODEL_FORMAT_VERSION};
pub use params::{BoostMode, BoosterParams};
pub use split::{find_best_split, leaf_weight, quantile_candidates, SplitInfo};
pub use train::{grow_tree, line_search_rho, train, train_with_callback};
pub use tree::{RegressionTree, TreeNode};
