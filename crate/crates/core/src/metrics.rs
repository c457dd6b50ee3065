//! Classification evaluation: confusion matrix, scalar metrics, ROC/AUC.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Counts of a binary classifier's outcomes relative to a declared
/// positive label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    #[serde(rename = "tp")]
    pub true_pos: u64,
    #[serde(rename = "tn")]
    pub true_neg: u64,
    #[serde(rename = "fp")]
    pub false_pos: u64,
    #[serde(rename = "fn")]
    pub false_neg: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.true_pos + self.true_neg + self.false_pos + self.false_neg
    }
}

/// The four headline metrics derived from a confusion matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn check_binary_labels(labels: &[u8]) -> Result<()> {
    if let Some(bad) = labels.iter().find(|&&y| y > 1) {
        return Err(Error::Argument(format!(
            "labels must be 0 or 1, found {bad}"
        )));
    }
    Ok(())
}

/// Counts TP/TN/FP/FN over aligned truth/prediction vectors.
pub fn confusion_matrix(y_true: &[u8], y_pred: &[u8], positive_label: u8) -> Result<ConfusionMatrix> {
    if y_true.is_empty() || y_true.len() != y_pred.len() {
        return Err(Error::Argument(format!(
            "need equal non-empty label vectors, got {} and {}",
            y_true.len(),
            y_pred.len()
        )));
    }
    check_binary_labels(y_true)?;
    check_binary_labels(y_pred)?;
    if positive_label > 1 {
        return Err(Error::Argument(format!(
            "positive_label must be 0 or 1, got {positive_label}"
        )));
    }
    let mut cm = ConfusionMatrix {
        true_pos: 0,
        true_neg: 0,
        false_pos: 0,
        false_neg: 0,
    };
    for (&t, &p) in y_true.iter().zip(y_pred) {
        match (t == positive_label, p == positive_label) {
            (true, true) => cm.true_pos += 1,
            (true, false) => cm.false_neg += 1,
            (false, true) => cm.false_pos += 1,
            (false, false) => cm.true_neg += 1,
        }
    }
    Ok(cm)
}

/// Accuracy, precision, recall, and F1 from the counts. Undefined ratios
/// (empty denominators) evaluate to 0.
pub fn scalar_metrics(cm: &ConfusionMatrix) -> ScalarMetrics {
    let total = cm.total() as f64;
    let tp = cm.true_pos as f64;
    let accuracy = if total > 0.0 {
        (tp + cm.true_neg as f64) / total
    } else {
        0.0
    };
    let predicted_pos = cm.true_pos + cm.false_pos;
    let precision = if predicted_pos > 0 {
        tp / predicted_pos as f64
    } else {
        0.0
    };
    let actual_pos = cm.true_pos + cm.false_neg;
    let recall = if actual_pos > 0 {
        tp / actual_pos as f64
    } else {
        0.0
    };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    ScalarMetrics {
        accuracy,
        precision,
        recall,
        f1,
    }
}

/// ROC polyline from (0, 0) to (1, 1) plus the trapezoidal area under it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    /// `(fpr, tpr)` pairs, both coordinates non-decreasing.
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

impl RocCurve {
    /// Writes the curve as `fpr,tpr` CSV.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "fpr,tpr")?;
        for (fpr, tpr) in &self.points {
            writeln!(out, "{fpr},{tpr}")?;
        }
        Ok(())
    }
}

/// Sweeps thresholds over the scores (descending; tied scores enter as a
/// block) and accumulates the curve. Scores must be oriented so that
/// larger means more likely positive.
///
/// The area is accumulated in integer counts, which makes the trapezoidal
/// value identical to the Mann-Whitney pairwise statistic.
pub fn roc_curve(y_true: &[u8], scores: &[f64], positive_label: u8) -> Result<RocCurve> {
    let (n_pos, n_neg) = ranking_setup(y_true, scores, positive_label)?;
    let mut order: Vec<usize> = (0..y_true.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = vec![(0.0, 0.0)];
    let mut tp: u64 = 0;
    let mut fp: u64 = 0;
    let mut twice_area: u64 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        let mut block_tp = 0u64;
        let mut block_fp = 0u64;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            if y_true[order[j]] == positive_label {
                block_tp += 1;
            } else {
                block_fp += 1;
            }
            j += 1;
        }
        twice_area += block_fp * (tp + (tp + block_tp));
        tp += block_tp;
        fp += block_fp;
        points.push((fp as f64 / n_neg as f64, tp as f64 / n_pos as f64));
        i = j;
    }
    debug_assert_eq!(points.last(), Some(&(1.0, 1.0)));
    Ok(RocCurve {
        points,
        auc: twice_area as f64 / (2 * n_pos * n_neg) as f64,
    })
}

/// AUC by exhaustive pairwise concordance: the mean over all
/// (negative, positive) pairs of 1 / 0.5 / 0 for the positive scoring
/// higher / tying / lower. Quadratic; intended as a test oracle.
pub fn auc_concordance_oracle(y_true: &[u8], scores: &[f64], positive_label: u8) -> Result<f64> {
    let (n_pos, n_neg) = ranking_setup(y_true, scores, positive_label)?;
    let mut credit = 0.0f64;
    for (i, &yi) in y_true.iter().enumerate() {
        if yi != positive_label {
            continue;
        }
        for (j, &yj) in y_true.iter().enumerate() {
            if yj == positive_label {
                continue;
            }
            credit += if scores[i] > scores[j] {
                1.0
            } else if scores[i] == scores[j] {
                0.5
            } else {
                0.0
            };
        }
    }
    Ok(credit / (n_pos * n_neg) as f64)
}

/// Shared validation for the ranking metrics; returns the class counts.
fn ranking_setup(y_true: &[u8], scores: &[f64], positive_label: u8) -> Result<(u64, u64)> {
    if y_true.is_empty() || y_true.len() != scores.len() {
        return Err(Error::Argument(format!(
            "need equal non-empty label/score vectors, got {} and {}",
            y_true.len(),
            scores.len()
        )));
    }
    check_binary_labels(y_true)?;
    if positive_label > 1 {
        return Err(Error::Argument(format!(
            "positive_label must be 0 or 1, got {positive_label}"
        )));
    }
    let n_pos = y_true.iter().filter(|&&y| y == positive_label).count() as u64;
    let n_neg = y_true.len() as u64 - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::Argument(
            "both classes must be present; FPR or TPR is undefined otherwise".into(),
        ));
    }
    Ok((n_pos, n_neg))
}
