//! The trained ensemble: prediction and JSON persistence.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::booster::loss::sigmoid;
use crate::booster::params::{BoostMode, BoosterParams};
use crate::booster::tree::RegressionTree;
use crate::dataset::Dataset;
use crate::error::{Error, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// A trained booster. The prediction margin of a row is exactly
/// `base_score` plus the sum of reached leaf weights, in tree order;
/// leaf weights are stored post-shrinkage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoosterModel {
    pub format_version: u32,
    pub mode: BoostMode,
    pub params: BoosterParams,
    pub base_score: f64,
    pub feature_names: Vec<String>,
    pub trees: Vec<RegressionTree>,
}

impl BoosterModel {
    /// Maps each model feature to its column in `dataset`, by name.
    fn feature_mapping(&self, dataset: &Dataset) -> Result<Vec<usize>> {
        self.feature_names
            .iter()
            .map(|name| {
                dataset
                    .feature_index(name)
                    .ok_or_else(|| Error::Schema(format!("missing feature column `{name}`")))
            })
            .collect()
    }

    /// Raw additive margins (pre-sigmoid) for every row: the base score
    /// plus each tree's leaf weight, accumulated exactly in tree order.
    pub fn predict_margin(&self, dataset: &Dataset) -> Result<Vec<f64>> {
        let mapping = self.feature_mapping(dataset)?;
        Ok((0..dataset.n_rows())
            .map(|row| {
                let value_of = |feature: usize| dataset.value(mapping[feature], row);
                let mut margin = self.base_score;
                for tree in &self.trees {
                    margin += tree.leaf_weight_for(&value_of);
                }
                margin
            })
            .collect())
    }

    /// Predicted probability of label 1 for every row.
    pub fn predict_proba(&self, dataset: &Dataset) -> Result<Vec<f64>> {
        Ok(self
            .predict_margin(dataset)?
            .into_iter()
            .map(sigmoid)
            .collect())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self)
            .map_err(|e| Error::ModelFormat(format!("serialization failed: {e}")))
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let model: BoosterModel = serde_json::from_str(json)
            .map_err(|e| Error::ModelFormat(format!("malformed model JSON: {e}")))?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::ModelFormat(format!(
                "unknown format_version {} (expected {MODEL_FORMAT_VERSION})",
                model.format_version
            )));
        }
        if model.mode != model.params.mode {
            return Err(Error::ModelFormat(format!(
                "mode `{}` disagrees with params.mode `{}`",
                model.mode, model.params.mode
            )));
        }
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()? + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let json = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&json)
    }
}
