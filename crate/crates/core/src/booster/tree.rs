//! The base learner: a binary regression tree with sparsity-aware routing.

use serde::{Deserialize, Serialize};

/// One tree node. Internal nodes route rows by `value <= threshold`
/// (missing values follow `default_left`); leaves contribute `weight` to
/// the additive margin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeNode {
    Internal {
        feature: usize,
        threshold: f64,
        default_left: bool,
        /// Realized split gain, kept so gain-based importance survives
        /// persistence. Absent in hand-written files; defaults to 0.
        #[serde(default)]
        gain: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        weight: f64,
    },
}

impl TreeNode {
    /// Leaf weight reached by a row, reading feature values through
    /// `value_of` (`None` = missing).
    pub fn leaf_weight_for<F>(&self, value_of: &F) -> f64
    where
        F: Fn(usize) -> Option<f64>,
    {
        match self {
            TreeNode::Leaf { weight } => *weight,
            TreeNode::Internal {
                feature,
                threshold,
                default_left,
                left,
                right,
                ..
            } => {
                let go_left = match value_of(*feature) {
                    Some(v) => v <= *threshold,
                    None => *default_left,
                };
                if go_left {
                    left.leaf_weight_for(value_of)
                } else {
                    right.leaf_weight_for(value_of)
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Internal { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn n_leaves(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Internal { left, right, .. } => left.n_leaves() + right.n_leaves(),
        }
    }

    /// Index (in depth-first leaf order) of the leaf a row reaches.
    pub fn leaf_index_for<F>(&self, value_of: &F) -> usize
    where
        F: Fn(usize) -> Option<f64>,
    {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Internal {
                feature,
                threshold,
                default_left,
                left,
                right,
                ..
            } => {
                let go_left = match value_of(*feature) {
                    Some(v) => v <= *threshold,
                    None => *default_left,
                };
                if go_left {
                    left.leaf_index_for(value_of)
                } else {
                    left.n_leaves() + right.leaf_index_for(value_of)
                }
            }
        }
    }

    /// Visits every internal node as `(feature, gain)`.
    pub fn for_each_split<F: FnMut(usize, f64)>(&self, visit: &mut F) {
        if let TreeNode::Internal {
            feature,
            gain,
            left,
            right,
            ..
        } = self
        {
            visit(*feature, *gain);
            left.for_each_split(visit);
            right.for_each_split(visit);
        }
    }

    /// Mutable references to all leaf weights, in depth-first
    /// (left-before-right) order.
    pub fn leaf_weights_mut(&mut self) -> Vec<&mut f64> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a mut self, out: &mut Vec<&'a mut f64>) {
        match self {
            TreeNode::Leaf { weight } => out.push(weight),
            TreeNode::Internal { left, right, .. } => {
                left.collect_leaves(out);
                right.collect_leaves(out);
            }
        }
    }
}

/// A single tree of the ensemble; serializes as its root node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RegressionTree {
    pub root: TreeNode,
}

impl RegressionTree {
    pub fn leaf_weight_for<F>(&self, value_of: &F) -> f64
    where
        F: Fn(usize) -> Option<f64>,
    {
        self.root.leaf_weight_for(value_of)
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    /// Multiplies every leaf weight (shrinkage).
    pub fn scale_weights(&mut self, factor: f64) {
        for w in self.root.leaf_weights_mut() {
            *w *= factor;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_tree() -> RegressionTree {
        RegressionTree {
            root: TreeNode::Internal {
                feature: 0,
                threshold: 2.5,
                default_left: false,
                gain: 2.0,
                left: Box::new(TreeNode::Leaf { weight: -2.0 }),
                right: Box::new(TreeNode::Internal {
                    feature: 1,
                    threshold: 0.5,
                    default_left: true,
                    gain: 1.0,
                    left: Box::new(TreeNode::Leaf { weight: 1.0 }),
                    right: Box::new(TreeNode::Leaf { weight: 3.0 }),
                }),
            },
        }
    }

    #[test]
    fn routing_follows_thresholds_and_defaults() {
        let tree = sample_tree();
        let row = |x: Option<f64>, y: Option<f64>| {
            tree.leaf_weight_for(&|f| if f == 0 { x } else { y })
        };
        assert_eq!(row(Some(1.0), Some(0.0)), -2.0);
        assert_eq!(row(Some(2.5), Some(0.0)), -2.0); // boundary goes left
        assert_eq!(row(Some(3.0), Some(0.0)), 1.0);
        assert_eq!(row(Some(3.0), Some(0.7)), 3.0);
        // Missing x: default right at the root; missing y: default left.
        assert_eq!(row(None, None), 1.0);
    }

    #[test]
    fn json_roundtrip_preserves_structure() {
        let tree = sample_tree();
        let json = serde_json::to_string(&tree).unwrap();
        let back: RegressionTree = serde_json::from_str(&json).unwrap();
        assert_eq!(tree, back);
    }

    #[test]
    fn nodes_without_gain_field_still_load() {
        let json = r#"{"feature":0,"threshold":1.5,"default_left":true,
                       "left":{"weight":-1.0},"right":{"weight":1.0}}"#;
        let node: TreeNode = serde_json::from_str(json).unwrap();
        match node {
            TreeNode::Internal { gain, .. } => assert_eq!(gain, 0.0),
            _ => panic!("expected internal node"),
        }
    }

    #[test]
    fn scale_weights_hits_every_leaf() {
        let mut tree = sample_tree();
        tree.scale_weights(0.5);
        let weights: Vec<f64> = tree
            .root
            .leaf_weights_mut()
            .into_iter()
            .map(|w| *w)
            .collect();
        assert_eq!(weights, vec![-1.0, 0.5, 1.5]);
    }

    #[test]
    fn depth_and_leaf_count() {
        let tree = sample_tree();
        assert_eq!(tree.depth(), 2);
        assert_eq!(tree.root.n_leaves(), 3);
    }
}
