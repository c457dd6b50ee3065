//! Gradient-boosted decision trees for binary loan-default classification.
//!
//! The crate covers the full desk-scale pipeline:
//!
//! * [`dataset`] — CSV ingestion of the three loan tables (demographic,
//!   performance, previous loans), join + feature engineering into a
//!   numeric [`dataset::Dataset`], and a seeded synthetic-data generator.
//! * [`booster`] — the tree ensemble itself, trainable in `newton` mode
//!   (second-order, L1/L2-regularized leaf weights, sparsity-aware default
//!   directions) or `friedman` mode (first-order with a per-leaf line
//!   search).
//! * [`metrics`] — confusion matrix, accuracy/precision/recall/F1, ROC
//!   curve and trapezoidal AUC with a pairwise-concordance oracle.
//! * [`modelselect`] — stratified k-fold cross-validation and exhaustive
//!   grid search.
//!
//! Everything is deterministic for a fixed seed, including under
//! multi-threaded split search.

pub mod booster;
pub mod dataset;
pub mod error;
pub mod metrics;
pub mod modelselect;

pub use error::{Error, Result};
