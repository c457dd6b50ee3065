//! Binary logistic loss: per-row gradients, the constant-score optimum,
//! and log-loss evaluation.

use crate::booster::params::BoosterParams;
use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Probability clamp used everywhere the loss or its derivatives are
/// evaluated, guarding log(0) and vanishing Hessians.
const P_CLAMP: f64 = 1e-15;
/// Clamp on the weighted positive rate in the base score.
const BASE_RATE_CLAMP: f64 = 1e-6;

/// First- and second-order derivatives of the loss at one row's margin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientPair {
    pub g: f64,
    pub h: f64,
}

/// Numerically stable logistic function.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn clamped_probability(margin: f64) -> f64 {
    sigmoid(margin).clamp(P_CLAMP, 1.0 - P_CLAMP)
}

/// Gradient and Hessian of the weighted logistic loss with respect to the
/// margin: `g = w (p - y)`, `h = w p (1 - p)`.
pub fn logistic_grad_hess(label: u8, margin: f64, weight: f64) -> GradientPair {
    let p = clamped_probability(margin);
    GradientPair {
        g: weight * (p - f64::from(label)),
        h: weight * p * (1.0 - p),
    }
}

/// `ln(1 + e^x)` without overflow or cancellation.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Weighted logistic loss of one row. Computed in softplus form for
/// stability; the cap is exactly the probability clamp's `-ln(1e-15)`.
pub fn log_loss_row(label: u8, margin: f64, weight: f64) -> f64 {
    let nll = if label == 1 {
        softplus(-margin)
    } else {
        softplus(margin)
    };
    weight * nll.min(-P_CLAMP.ln())
}

/// Weighted mean log-loss over all rows, with label-1 rows weighted by
/// `positive_class_weight`.
pub fn mean_log_loss(labels: &[u8], margins: &[f64], positive_class_weight: f64) -> f64 {
    let mut total = 0.0;
    let mut weight_sum = 0.0;
    for (&y, &m) in labels.iter().zip(margins) {
        let w = if y == 1 { positive_class_weight } else { 1.0 };
        total += log_loss_row(y, m, w);
        weight_sum += w;
    }
    if weight_sum > 0.0 {
        total / weight_sum
    } else {
        0.0
    }
}

/// The constant margin minimizing total logistic loss: the logit of the
/// weighted positive rate (clamped away from 0 and 1).
pub fn init_base_score(labels: &[u8], weights: &[f64]) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::Argument("cannot fit a base score on no rows".into()));
    }
    if labels.len() != weights.len() {
        return Err(Error::Argument(format!(
            "labels and weights lengths differ: {} vs {}",
            labels.len(),
            weights.len()
        )));
    }
    let weight_sum: f64 = weights.iter().sum();
    if weight_sum <= 0.0 {
        return Err(Error::Argument("total weight is zero".into()));
    }
    let positive: f64 = labels
        .iter()
        .zip(weights)
        .filter(|(&y, _)| y == 1)
        .map(|(_, &w)| w)
        .sum();
    let rate = (positive / weight_sum).clamp(BASE_RATE_CLAMP, 1.0 - BASE_RATE_CLAMP);
    Ok((rate / (1.0 - rate)).ln())
}

/// Per-row gradient pairs at the current margins, weighting label-1 rows
/// by `positive_class_weight`.
pub fn compute_gradients(
    dataset: &Dataset,
    margins: &[f64],
    params: &BoosterParams,
) -> Result<Vec<GradientPair>> {
    if margins.len() != dataset.n_rows() {
        return Err(Error::Argument(format!(
            "margins length {} does not match row count {}",
            margins.len(),
            dataset.n_rows()
        )));
    }
    Ok(dataset
        .target()
        .iter()
        .zip(margins)
        .map(|(&y, &m)| {
            let w = if y == 1 {
                params.positive_class_weight
            } else {
                1.0
            };
            logistic_grad_hess(y, m, w)
        })
        .collect())
}

pub(crate) fn row_weights(labels: &[u8], positive_class_weight: f64) -> Vec<f64> {
    labels
        .iter()
        .map(|&y| if y == 1 { positive_class_weight } else { 1.0 })
        .collect()
}
