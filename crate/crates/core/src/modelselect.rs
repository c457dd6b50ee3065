//! Stratified k-fold cross-validation and exhaustive grid search.

use rand::{RngExt, SeedableRng};
use rand_pcg::Pcg64;
use serde::{Deserialize, Serialize};

use crate::booster::{train, BoosterParams};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::metrics::{confusion_matrix, roc_curve, scalar_metrics};

/// Fold index per row, all values in `[0, k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub k: usize,
    pub fold_of: Vec<usize>,
}

impl FoldAssignment {
    pub fn rows_in_fold(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len())
            .filter(|&r| self.fold_of[r] == fold)
            .collect()
    }

    pub fn rows_outside_fold(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len())
            .filter(|&r| self.fold_of[r] != fold)
            .collect()
    }
}

/// Stratified fold assignment: within each class, rows are shuffled by
/// the seeded generator and dealt round-robin. The dealing cursor carries
/// over between classes so every fold is populated whenever `k <= n`.
pub fn stratified_kfold(target: &[u8], k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 || k > target.len() {
        return Err(Error::Argument(format!(
            "k must lie in [2, n_rows]; got k = {k} for {} rows",
            target.len()
        )));
    }
    if let Some(bad) = target.iter().find(|&&y| y > 1) {
        return Err(Error::Argument(format!(
            "labels must be 0 or 1, found {bad}"
        )));
    }
    let mut rng = Pcg64::seed_from_u64(seed);
    let mut fold_of = vec![0usize; target.len()];
    let mut cursor = 0usize;
    for class in [0u8, 1u8] {
        let mut rows: Vec<usize> = (0..target.len())
            .filter(|&r| target[r] == class)
            .collect();
        // Fisher-Yates shuffle.
        for i in (1..rows.len()).rev() {
            let j = rng.random_range(0..=i);
            rows.swap(i, j);
        }
        for row in rows {
            fold_of[row] = cursor % k;
            cursor += 1;
        }
    }
    Ok(FoldAssignment { k, fold_of })
}

/// Metrics of one held-out fold. `auc` is absent when the fold holds a
/// single class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoldMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub auc: Option<f64>,
}

/// Cross-validation outcome: per-fold metrics plus their mean and sample
/// standard deviation. Folds without a defined AUC are excluded from the
/// AUC aggregate and counted in `auc_folds_skipped`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub params: BoosterParams,
    pub k: usize,
    pub seed: u64,
    pub positive_label: u8,
    pub folds: Vec<FoldMetrics>,
    pub mean: FoldMetrics,
    pub std: FoldMetrics,
    pub auc_folds_skipped: usize,
}

fn aggregate(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, std)
}

/// Runs k-fold cross-validation: for each fold, trains on the remaining
/// folds and evaluates on the held-out one. Label metrics use threshold
/// 0.5 on the predicted probability; AUC uses the raw probabilities
/// oriented toward `positive_label`.
pub fn cross_validate(
    dataset: &Dataset,
    params: &BoosterParams,
    k: usize,
    seed: u64,
    positive_label: u8,
) -> Result<CvReport> {
    params.validate()?;
    if positive_label > 1 {
        return Err(Error::Argument(format!(
            "positive_label must be 0 or 1, got {positive_label}"
        )));
    }
    let assignment = stratified_kfold(dataset.target(), k, seed)?;

    let mut folds = Vec::with_capacity(k);
    for fold in 0..k {
        let train_rows = assignment.rows_outside_fold(fold);
        let test_rows = assignment.rows_in_fold(fold);
        let train_set = dataset.select_rows(&train_rows);
        let test_set = dataset.select_rows(&test_rows);

        let model = train(&train_set, params)?;
        let probs = model.predict_proba(&test_set)?;
        let y_true = test_set.target();
        let y_pred: Vec<u8> = probs.iter().map(|&p| u8::from(p >= 0.5)).collect();

        let cm = confusion_matrix(y_true, &y_pred, positive_label)?;
        let scalars = scalar_metrics(&cm);
        let scores: Vec<f64> = if positive_label == 1 {
            probs.clone()
        } else {
            probs.iter().map(|p| 1.0 - p).collect()
        };
        let auc = match roc_curve(y_true, &scores, positive_label) {
            Ok(roc) => Some(roc.auc),
            Err(Error::Argument(_)) => None, // single-class fold
            Err(e) => return Err(e),
        };
        folds.push(FoldMetrics {
            accuracy: scalars.accuracy,
            precision: scalars.precision,
            recall: scalars.recall,
            f1: scalars.f1,
            auc,
        });
    }

    let column = |get: fn(&FoldMetrics) -> f64| -> Vec<f64> { folds.iter().map(get).collect() };
    let (acc_mean, acc_std) = aggregate(&column(|f| f.accuracy));
    let (pre_mean, pre_std) = aggregate(&column(|f| f.precision));
    let (rec_mean, rec_std) = aggregate(&column(|f| f.recall));
    let (f1_mean, f1_std) = aggregate(&column(|f| f.f1));
    let auc_values: Vec<f64> = folds.iter().filter_map(|f| f.auc).collect();
    let auc_folds_skipped = folds.len() - auc_values.len();
    let (auc_mean, auc_std) = if auc_values.is_empty() {
        (None, None)
    } else {
        let (m, s) = aggregate(&auc_values);
        (Some(m), Some(s))
    };

    Ok(CvReport {
        params: params.clone(),
        k,
        seed,
        positive_label,
        folds,
        mean: FoldMetrics {
            accuracy: acc_mean,
            precision: pre_mean,
            recall: rec_mean,
            f1: f1_mean,
            auc: auc_mean,
        },
        std: FoldMetrics {
            accuracy: acc_std,
            precision: pre_std,
            recall: rec_std,
            f1: f1_std,
            auc: auc_std,
        },
        auc_folds_skipped,
    })
}

/// Per-parameter candidate lists for [`grid_search`]. `None` keeps the
/// base value. The Cartesian product enumerates in field order with the
/// last parameter varying fastest.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamGrid {
    pub n_estimators: Option<Vec<usize>>,
    pub learning_rate: Option<Vec<f64>>,
    pub subsample: Option<Vec<f64>>,
    pub reg_alpha: Option<Vec<f64>>,
    pub reg_lambda: Option<Vec<f64>>,
    pub max_depth: Option<Vec<usize>>,
}

impl ParamGrid {
    /// All parameter combinations over the base settings.
    pub fn combinations(&self, base: &BoosterParams) -> Result<Vec<BoosterParams>> {
        fn axis<T: Clone>(list: &Option<Vec<T>>, base: T, name: &str) -> Result<Vec<T>> {
            match list {
                Some(values) if values.is_empty() => Err(Error::Argument(format!(
                    "grid list for {name} is empty"
                ))),
                Some(values) => Ok(values.clone()),
                None => Ok(vec![base]),
            }
        }
        let n_estimators = axis(&self.n_estimators, base.n_estimators, "n_estimators")?;
        let learning_rate = axis(&self.learning_rate, base.learning_rate, "learning_rate")?;
        let subsample = axis(&self.subsample, base.subsample, "subsample")?;
        let reg_alpha = axis(&self.reg_alpha, base.reg_alpha, "reg_alpha")?;
        let reg_lambda = axis(&self.reg_lambda, base.reg_lambda, "reg_lambda")?;
        let max_depth = axis(&self.max_depth, base.max_depth, "max_depth")?;

        let mut out = Vec::new();
        for &n in &n_estimators {
            for &lr in &learning_rate {
                for &ss in &subsample {
                    for &alpha in &reg_alpha {
                        for &lambda in &reg_lambda {
                            for &depth in &max_depth {
                                out.push(BoosterParams {
                                    n_estimators: n,
                                    learning_rate: lr,
                                    subsample: ss,
                                    reg_alpha: alpha,
                                    reg_lambda: lambda,
                                    max_depth: depth,
                                    ..base.clone()
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Grid-search outcome: the winning combination plus every CV report in
/// enumeration order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearchResult {
    pub best_params: BoosterParams,
    pub best_index: usize,
    pub reports: Vec<CvReport>,
}

/// Cross-validates every combination of `grid` over `base` and returns
/// the one with the highest mean AUC (ties keep the earliest combination
/// in enumeration order).
pub fn grid_search(
    dataset: &Dataset,
    base: &BoosterParams,
    grid: &ParamGrid,
    k: usize,
    seed: u64,
    positive_label: u8,
) -> Result<GridSearchResult> {
    let combinations = grid.combinations(base)?;
    let mut reports = Vec::with_capacity(combinations.len());
    let mut best_index = 0usize;
    let mut best_auc = f64::NEG_INFINITY;
    for (index, params) in combinations.iter().enumerate() {
        let report = cross_validate(dataset, params, k, seed, positive_label)?;
        let auc = report.mean.auc.unwrap_or(f64::NEG_INFINITY);
        if auc > best_auc {
            best_auc = auc;
            best_index = index;
        }
        reports.push(report);
    }
    Ok(GridSearchResult {
        best_params: combinations[best_index].clone(),
        best_index,
        reports,
    })
}
