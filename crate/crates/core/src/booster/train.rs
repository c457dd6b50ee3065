//! Tree growth and the boosting loop.

use rand::{RngExt, SeedableRng};
use rand_pcg::Pcg64;

use crate::booster::loss::{
    compute_gradients, init_base_score, logistic_grad_hess, mean_log_loss, row_weights,
    GradientPair,
};
use crate::booster::model::BoosterModel;
use crate::booster::params::{BoostMode, BoosterParams};
use crate::booster::split::{find_best_split, leaf_weight};
use crate::booster::tree::{RegressionTree, TreeNode};
use crate::booster::MODEL_FORMAT_VERSION;
use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Grows one regression tree by recursive best-first splitting of the
/// given rows. Rows with a missing split feature follow the split's
/// learned default direction; the partition is exact (every row lands in
/// exactly one child).
pub fn grow_tree(
    dataset: &Dataset,
    grads: &[GradientPair],
    rows: &[usize],
    params: &BoosterParams,
) -> RegressionTree {
    assert!(!rows.is_empty(), "row sample must be non-empty");
    RegressionTree {
        root: build_node(dataset, grads, rows, params, 0),
    }
}

fn build_node(
    dataset: &Dataset,
    grads: &[GradientPair],
    rows: &[usize],
    params: &BoosterParams,
    depth: usize,
) -> TreeNode {
    if depth < params.max_depth {
        if let Some(split) = find_best_split(rows, grads, dataset, params) {
            let col = dataset.column(split.feature_index);
            let mask = dataset.mask(split.feature_index);
            let mut left = Vec::new();
            let mut right = Vec::new();
            for &r in rows {
                let go_left = if mask[r] {
                    split.default_left
                } else {
                    col[r] <= split.threshold
                };
                if go_left {
                    left.push(r);
                } else {
                    right.push(r);
                }
            }
            // Degenerate midpoints between adjacent floats can route every
            // row one way; fall back to a leaf rather than recurse on
            // nothing.
            if !left.is_empty() && !right.is_empty() {
                return TreeNode::Internal {
                    feature: split.feature_index,
                    threshold: split.threshold,
                    default_left: split.default_left,
                    gain: split.gain,
                    left: Box::new(build_node(dataset, grads, &left, params, depth + 1)),
                    right: Box::new(build_node(dataset, grads, &right, params, depth + 1)),
                };
            }
        }
    }
    leaf_from_rows(grads, rows, params)
}

fn leaf_from_rows(grads: &[GradientPair], rows: &[usize], params: &BoosterParams) -> TreeNode {
    let mut g = 0.0;
    let mut h = 0.0;
    for &r in rows {
        g += grads[r].g;
        h += grads[r].h;
    }
    TreeNode::Leaf {
        weight: leaf_weight(g, h, params),
    }
}

/// 1-D loss interface for the per-leaf step search (unweighted; row
/// weights are applied by the caller).
pub(crate) trait StepLoss {
    fn grad_hess(&self, label: u8, margin: f64) -> (f64, f64);
}

pub(crate) struct LogisticStep;

impl StepLoss for LogisticStep {
    fn grad_hess(&self, label: u8, margin: f64) -> (f64, f64) {
        let gp = logistic_grad_hess(label, margin, 1.0);
        (gp.g, gp.h)
    }
}

/// Newton iteration on the step size rho minimizing
/// `sum_i w_i loss(y_i, m_i + rho * leaf_w)`, starting at rho = 1 with at
/// most 10 iterations or until the update falls under 1e-10. A leaf with
/// no Hessian mass (or weight zero) returns rho = 0.
pub(crate) fn newton_leaf_step<L: StepLoss>(
    loss: &L,
    leaf_w: f64,
    items: &[(u8, f64, f64)],
) -> f64 {
    if leaf_w == 0.0 || items.is_empty() {
        return 0.0;
    }
    let mut rho = 1.0f64;
    for _ in 0..10 {
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        for &(label, margin, weight) in items {
            let (g, h) = loss.grad_hess(label, margin + rho * leaf_w);
            d1 += weight * g * leaf_w;
            d2 += weight * h * leaf_w * leaf_w;
        }
        if d2 <= 0.0 || !d1.is_finite() {
            return 0.0;
        }
        let delta = d1 / d2;
        rho -= delta;
        if delta.abs() < 1e-10 {
            break;
        }
    }
    rho
}

/// Per-leaf line search (one step size per terminal region): replaces
/// each leaf weight `w` by `rho * w` where `rho` minimizes the logistic
/// loss of the leaf's rows along the tree direction. Returns the steps in
/// depth-first leaf order.
pub fn line_search_rho(
    tree: &mut RegressionTree,
    dataset: &Dataset,
    rows: &[usize],
    labels: &[u8],
    margins: &[f64],
    positive_class_weight: f64,
) -> Vec<f64> {
    let n_leaves = tree.root.n_leaves();
    let mut leaf_items: Vec<Vec<(u8, f64, f64)>> = vec![Vec::new(); n_leaves];
    for &r in rows {
        let leaf = tree.root.leaf_index_for(&|f| dataset.value(f, r));
        let weight = if labels[r] == 1 {
            positive_class_weight
        } else {
            1.0
        };
        leaf_items[leaf].push((labels[r], margins[r], weight));
    }
    let mut steps = Vec::with_capacity(n_leaves);
    for (weight, items) in tree.root.leaf_weights_mut().into_iter().zip(&leaf_items) {
        let rho = newton_leaf_step(&LogisticStep, *weight, items);
        *weight *= rho;
        steps.push(rho);
    }
    steps
}

/// Trains a boosted ensemble. Deterministic for fixed params and seed.
pub fn train(dataset: &Dataset, params: &BoosterParams) -> Result<BoosterModel> {
    train_with_callback(dataset, params, |_, _| {})
}

/// Like [`train`], invoking `on_round(round, training_log_loss)` after
/// every boosting round.
pub fn train_with_callback(
    dataset: &Dataset,
    params: &BoosterParams,
    mut on_round: impl FnMut(usize, f64),
) -> Result<BoosterModel> {
    params.validate()?;
    let n = dataset.n_rows();
    if n == 0 {
        return Err(Error::Argument("cannot train on an empty dataset".into()));
    }
    let labels = dataset.target();
    let weights = row_weights(labels, params.positive_class_weight);
    let base_score = init_base_score(labels, &weights)?;
    let mut model = BoosterModel {
        format_version: MODEL_FORMAT_VERSION,
        mode: params.mode,
        params: params.clone(),
        base_score,
        feature_names: dataset.feature_names().to_vec(),
        trees: Vec::new(),
    };

    // With fewer than two rows or a single class there is nothing to
    // boost; the constant base score already minimizes the loss.
    let has_both_classes = labels.contains(&0) && labels.contains(&1);
    if n < 2 || !has_both_classes {
        return Ok(model);
    }

    let mut margins = vec![base_score; n];
    let mut rng = Pcg64::seed_from_u64(params.seed);
    let n_draw = ((n as f64) * params.subsample).round().clamp(1.0, n as f64) as usize;
    let mut indices: Vec<usize> = (0..n).collect();

    for round in 0..params.n_estimators {
        let rows: Vec<usize> = if n_draw < n {
            // Partial Fisher-Yates, then ascending order so that all
            // gradient accumulations run in a canonical row order.
            for i in 0..n_draw {
                let j = rng.random_range(i..n);
                indices.swap(i, j);
            }
            let mut rows = indices[..n_draw].to_vec();
            rows.sort_unstable();
            rows
        } else {
            (0..n).collect()
        };

        let grads = compute_gradients(dataset, &margins, params)?;
        let mut tree = grow_tree(dataset, &grads, &rows, params);
        if params.mode == BoostMode::Friedman {
            line_search_rho(
                &mut tree,
                dataset,
                &rows,
                labels,
                &margins,
                params.positive_class_weight,
            );
        }
        tree.scale_weights(params.learning_rate);
        for (r, margin) in margins.iter_mut().enumerate() {
            *margin += tree.leaf_weight_for(&|f| dataset.value(f, r));
        }
        model.trees.push(tree);
        on_round(round, mean_log_loss(labels, &margins, params.positive_class_weight));
    }
    Ok(model)
}
