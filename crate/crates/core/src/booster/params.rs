use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which update rule sets the leaf weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoostMode {
    /// First-order boosting with a per-leaf line search.
    Friedman,
    /// Second-order boosting with regularized closed-form leaf weights.
    Newton,
}

impl std::fmt::Display for BoostMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoostMode::Friedman => "friedman",
            BoostMode::Newton => "newton",
        })
    }
}

/// All training hyperparameters. The defaults are the grid-search optimum
/// the pipeline is tuned around.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoosterParams {
    /// Number of boosting rounds (trees).
    pub n_estimators: usize,
    /// Shrinkage applied to every tree's contribution, in (0, 1].
    pub learning_rate: f64,
    /// Row fraction drawn (without replacement) per round, in (0, 1].
    pub subsample: f64,
    /// L1 penalty on leaf weights (soft threshold on gradient sums).
    pub reg_alpha: f64,
    /// L2 penalty on leaf weights.
    pub reg_lambda: f64,
    /// Maximum tree depth (root is depth 0).
    pub max_depth: usize,
    /// Minimum gain a split must reach to be applied.
    pub min_gain: f64,
    /// Number of quantile bins for split candidates; when a feature has
    /// at most this many distinct values the search is exact.
    pub max_bins: usize,
    pub mode: BoostMode,
    /// Loss weight multiplier for label-1 rows.
    pub positive_class_weight: f64,
    pub seed: u64,
}

impl Default for BoosterParams {
    fn default() -> Self {
        BoosterParams {
            n_estimators: 1000,
            learning_rate: 0.01,
            subsample: 0.8,
            reg_alpha: 1.0,
            reg_lambda: 1.0,
            max_depth: 6,
            min_gain: 0.0,
            max_bins: 256,
            mode: BoostMode::Newton,
            positive_class_weight: 1.0,
            seed: 42,
        }
    }
}

impl BoosterParams {
    pub fn validate(&self) -> Result<()> {
        fn check(ok: bool, msg: &str) -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::Config(msg.to_owned()))
            }
        }
        check(
            self.learning_rate > 0.0 && self.learning_rate <= 1.0,
            "learning_rate must lie in (0, 1]",
        )?;
        check(
            self.subsample > 0.0 && self.subsample <= 1.0,
            "subsample must lie in (0, 1]",
        )?;
        check(self.reg_alpha >= 0.0, "reg_alpha must be non-negative")?;
        check(self.reg_lambda >= 0.0, "reg_lambda must be non-negative")?;
        check(self.max_depth >= 1, "max_depth must be at least 1")?;
        check(self.min_gain >= 0.0, "min_gain must be non-negative")?;
        check(self.max_bins >= 2, "max_bins must be at least 2")?;
        check(
            self.positive_class_weight >= 0.0,
            "positive_class_weight must be non-negative",
        )?;
        Ok(())
    }
}
