//! Feature importance from a trained ensemble.

use serde::{Deserialize, Serialize};

use crate::booster::model::BoosterModel;

/// How a feature's contribution is scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImportanceKind {
    /// Sum of realized split gains per feature.
    Gain,
    /// Number of splits using the feature.
    SplitCount,
}

impl std::fmt::Display for ImportanceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ImportanceKind::Gain => "gain",
            ImportanceKind::SplitCount => "split_count",
        })
    }
}

/// Ranked `(feature name, score)` pairs, scores normalized to sum 1.
/// Features that never split are omitted; a model with no splits yields
/// an empty list. Ties rank by feature index.
pub fn feature_importance(model: &BoosterModel, kind: ImportanceKind) -> Vec<(String, f64)> {
    let mut scores = vec![0.0f64; model.feature_names.len()];
    for tree in &model.trees {
        tree.root.for_each_split(&mut |feature, gain| {
            scores[feature] += match kind {
                ImportanceKind::Gain => gain,
                ImportanceKind::SplitCount => 1.0,
            };
        });
    }
    let total: f64 = scores.iter().sum();
    if total <= 0.0 {
        return Vec::new();
    }
    let mut ranked: Vec<(usize, f64)> = scores
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > 0.0)
        .map(|(i, &s)| (i, s / total))
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked
        .into_iter()
        .map(|(i, s)| (model.feature_names[i].clone(), s))
        .collect()
}
