//! Split finding: Hessian-weighted quantile candidates, regularized gain,
//! and sparsity-aware default directions.

use rayon::prelude::*;

use crate::booster::loss::GradientPair;
use crate::booster::params::BoosterParams;
use crate::dataset::Dataset;

/// Gains below this floor are treated as zero to suppress phantom splits
/// born of floating-point noise.
pub(crate) const MIN_GAIN_FLOOR: f64 = 1e-12;

/// The winning split of one node.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitInfo {
    pub feature_index: usize,
    pub threshold: f64,
    pub gain: f64,
    pub default_left: bool,
    pub g_left: f64,
    pub h_left: f64,
    pub g_right: f64,
    pub h_right: f64,
}

impl SplitInfo {
    /// Strict total order: higher gain wins; exact ties fall back to
    /// lower feature index, lower threshold, then default-left first.
    /// Order-free, so parallel reduction is deterministic.
    pub(crate) fn beats(&self, other: &SplitInfo) -> bool {
        if self.gain != other.gain {
            return self.gain > other.gain;
        }
        if self.feature_index != other.feature_index {
            return self.feature_index < other.feature_index;
        }
        if self.threshold != other.threshold {
            return self.threshold < other.threshold;
        }
        self.default_left && !other.default_left
    }
}

/// L1 soft threshold on a gradient sum.
fn soft_threshold(g: f64, alpha: f64) -> f64 {
    g.signum() * (g.abs() - alpha).max(0.0)
}

/// Regularized quality of a node: `S(G)^2 / (H + lambda)`.
fn node_score(g: f64, h: f64, params: &BoosterParams) -> f64 {
    let s = soft_threshold(g, params.reg_alpha);
    if s == 0.0 {
        return 0.0;
    }
    let denom = h + params.reg_lambda;
    if denom <= 0.0 {
        0.0
    } else {
        s * s / denom
    }
}

/// Optimal leaf weight for gradient/Hessian sums: `-S(G) / (H + lambda)`,
/// before shrinkage.
pub fn leaf_weight(g_sum: f64, h_sum: f64, params: &BoosterParams) -> f64 {
    let s = soft_threshold(g_sum, params.reg_alpha);
    if s == 0.0 {
        return 0.0;
    }
    let denom = h_sum + params.reg_lambda;
    if denom <= 0.0 {
        0.0
    } else {
        -s / denom
    }
}

/// Split-candidate thresholds for one feature.
///
/// Over the non-missing entries: when at most `max_bins` distinct values
/// exist, every midpoint between consecutive distinct values is returned
/// (exact mode). Otherwise thresholds sit at the Hessian-weighted
/// quantile cuts `k/max_bins`; each cut emits the midpoint between the
/// distinct value whose cumulative weight first reaches the cut and its
/// successor.
pub fn quantile_candidates(
    values: &[f64],
    hessian_weights: &[f64],
    missing_mask: &[bool],
    max_bins: usize,
) -> Vec<f64> {
    assert_eq!(values.len(), hessian_weights.len());
    assert_eq!(values.len(), missing_mask.len());
    assert!(max_bins >= 2, "max_bins must be at least 2");

    let mut present: Vec<(f64, f64)> = values
        .iter()
        .zip(hessian_weights)
        .zip(missing_mask)
        .filter(|(_, &missing)| !missing)
        .map(|((&v, &w), _)| (v, w))
        .collect();
    present.sort_by(|a, b| a.0.total_cmp(&b.0));
    let distinct = aggregate_distinct(&present);
    candidates_from_sorted(&distinct, max_bins)
}

/// Collapses a value-sorted slice into (distinct value, weight sum) pairs.
fn aggregate_distinct(sorted: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for &(v, w) in sorted {
        match out.last_mut() {
            Some(last) if last.0 == v => last.1 += w,
            _ => out.push((v, w)),
        }
    }
    out
}

pub(crate) fn candidates_from_sorted(distinct: &[(f64, f64)], max_bins: usize) -> Vec<f64> {
    if distinct.len() < 2 {
        return Vec::new();
    }
    if distinct.len() <= max_bins {
        return distinct
            .windows(2)
            .map(|w| 0.5 * (w[0].0 + w[1].0))
            .collect();
    }

    let mut total: f64 = distinct.iter().map(|d| d.1).sum();
    let unit = total <= 0.0;
    if unit {
        total = distinct.len() as f64;
    }
    let mut cumulative = Vec::with_capacity(distinct.len());
    let mut acc = 0.0;
    for d in distinct {
        acc += if unit { 1.0 } else { d.1 };
        cumulative.push(acc);
    }

    let mut out = Vec::with_capacity(max_bins - 1);
    for k in 1..max_bins {
        let cut = total * k as f64 / max_bins as f64;
        let j = cumulative.partition_point(|&c| c < cut);
        if j + 1 < distinct.len() {
            out.push(0.5 * (distinct[j].0 + distinct[j + 1].0));
        }
    }
    out.dedup();
    out
}

/// Sums over a node's rows, with missing rows of the feature separated.
struct FeatureStats {
    /// (value, g, h) sorted ascending by value, duplicates aggregated.
    distinct: Vec<(f64, f64, f64)>,
    g_missing: f64,
    h_missing: f64,
}

fn feature_stats(
    feature: usize,
    rows: &[usize],
    grads: &[GradientPair],
    dataset: &Dataset,
) -> FeatureStats {
    let col = dataset.column(feature);
    let mask = dataset.mask(feature);
    let mut present: Vec<(f64, f64, f64)> = Vec::with_capacity(rows.len());
    let mut g_missing = 0.0;
    let mut h_missing = 0.0;
    for &r in rows {
        let gp = grads[r];
        if mask[r] {
            g_missing += gp.g;
            h_missing += gp.h;
        } else {
            present.push((col[r], gp.g, gp.h));
        }
    }
    present.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut distinct: Vec<(f64, f64, f64)> = Vec::new();
    for (v, g, h) in present {
        match distinct.last_mut() {
            Some(last) if last.0 == v => {
                last.1 += g;
                last.2 += h;
            }
            _ => distinct.push((v, g, h)),
        }
    }
    FeatureStats {
        distinct,
        g_missing,
        h_missing,
    }
}

fn best_split_for_feature(
    feature: usize,
    rows: &[usize],
    grads: &[GradientPair],
    dataset: &Dataset,
    params: &BoosterParams,
    g_total: f64,
    h_total: f64,
    parent_score: f64,
) -> Option<SplitInfo> {
    let stats = feature_stats(feature, rows, grads, dataset);
    if stats.distinct.len() < 2 {
        return None;
    }
    let weighted: Vec<(f64, f64)> = stats.distinct.iter().map(|d| (d.0, d.2)).collect();
    let thresholds = candidates_from_sorted(&weighted, params.max_bins);

    let gain_floor = params.min_gain.max(MIN_GAIN_FLOOR);
    let mut best: Option<SplitInfo> = None;
    let mut g_prefix = 0.0;
    let mut h_prefix = 0.0;
    let mut next = 0usize;
    for &threshold in &thresholds {
        while next < stats.distinct.len() && stats.distinct[next].0 <= threshold {
            g_prefix += stats.distinct[next].1;
            h_prefix += stats.distinct[next].2;
            next += 1;
        }
        for default_left in [true, false] {
            let (g_left, h_left) = if default_left {
                (g_prefix + stats.g_missing, h_prefix + stats.h_missing)
            } else {
                (g_prefix, h_prefix)
            };
            let g_right = g_total - g_left;
            let h_right = h_total - h_left;
            let gain = 0.5
                * (node_score(g_left, h_left, params) + node_score(g_right, h_right, params)
                    - parent_score);
            if gain < gain_floor {
                continue;
            }
            let candidate = SplitInfo {
                feature_index: feature,
                threshold,
                gain,
                default_left,
                g_left,
                h_left,
                g_right,
                h_right,
            };
            if best.as_ref().is_none_or(|b| candidate.beats(b)) {
                best = Some(candidate);
            }
        }
    }
    best
}

/// Best split over all features for the rows of one node, or `None` when
/// no split reaches the gain floor.
///
/// Candidate thresholds per feature come from [`quantile_candidates`]
/// over the node's rows; for each threshold both default directions for
/// missing values are scored. Features are searched in parallel; the
/// tie-breaking order makes the result independent of the worker count.
pub fn find_best_split(
    rows: &[usize],
    grads: &[GradientPair],
    dataset: &Dataset,
    params: &BoosterParams,
) -> Option<SplitInfo> {
    assert!(!rows.is_empty(), "row set must be non-empty");
    let mut g_total = 0.0;
    let mut h_total = 0.0;
    for &r in rows {
        g_total += grads[r].g;
        h_total += grads[r].h;
    }
    let parent_score = node_score(g_total, h_total, params);

    (0..dataset.n_features())
        .into_par_iter()
        .filter_map(|feature| {
            best_split_for_feature(
                feature,
                rows,
                grads,
                dataset,
                params,
                g_total,
                h_total,
                parent_score,
            )
        })
        .reduce_with(|a, b| if b.beats(&a) { b } else { a })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Dataset;
    use proptest::prelude::*;

    fn params_plain() -> BoosterParams {
        BoosterParams {
            reg_alpha: 0.0,
            reg_lambda: 0.0,
            ..BoosterParams::default()
        }
    }

    #[test]
    fn exact_mode_returns_all_midpoints() {
        let v = [1.0, 2.0, 3.0, 4.0];
        let w = [1.0; 4];
        let m = [false; 4];
        assert_eq!(quantile_candidates(&v, &w, &m, 8), vec![1.5, 2.5, 3.5]);
    }

    #[test]
    fn two_bins_cut_at_weighted_median() {
        let v = [1.0, 2.0, 3.0, 4.0];
        let w = [1.0; 4];
        let m = [false; 4];
        assert_eq!(quantile_candidates(&v, &w, &m, 2), vec![2.5]);
    }

    #[test]
    fn heavier_weights_pull_the_cut() {
        // Cumulative weights [3,4,5]; the half-total cut 2.5 lands inside
        // the first value's mass, so the threshold sits just above it.
        let v = [1.0, 2.0, 3.0];
        let w = [3.0, 1.0, 1.0];
        let m = [false; 3];
        assert_eq!(quantile_candidates(&v, &w, &m, 2), vec![1.5]);
    }

    #[test]
    fn single_distinct_value_has_no_candidates() {
        let v = [5.0, 5.0, 5.0];
        let w = [1.0; 3];
        let m = [false; 3];
        assert!(quantile_candidates(&v, &w, &m, 8).is_empty());
    }

    #[test]
    fn all_missing_has_no_candidates() {
        let v = [1.0, 2.0];
        let w = [1.0; 2];
        let m = [true; 2];
        assert!(quantile_candidates(&v, &w, &m, 8).is_empty());
    }

    #[test]
    fn quantile_thresholds_are_a_subset_of_exact_ones() {
        let v: Vec<f64> = (0..40).map(|i| (i % 13) as f64).collect();
        let w: Vec<f64> = (0..40).map(|i| 0.1 + (i % 5) as f64).collect();
        let m = vec![false; 40];
        let exact = quantile_candidates(&v, &w, &m, 1000);
        let coarse = quantile_candidates(&v, &w, &m, 4);
        assert!(coarse.len() <= 3);
        assert!(coarse.iter().all(|t| exact.contains(t)));
        assert!(coarse.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn leaf_weight_matches_quadratic_minimizer() {
        let params = BoosterParams {
            reg_lambda: 1.0,
            reg_alpha: 0.0,
            ..BoosterParams::default()
        };
        let w = leaf_weight(-2.0, 4.0, &params);
        assert!((w - 0.4).abs() < 1e-15);

        // Oracle: golden-section minimization of 0.5 H w^2 + G w + 0.5 L w^2
        // (accurate to about sqrt(machine epsilon) near the optimum).
        let objective = |x: f64| 0.5 * 4.0 * x * x + (-2.0) * x + 0.5 * 1.0 * x * x;
        let (mut lo, mut hi) = (-10.0f64, 10.0f64);
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        while hi - lo > 1e-12 {
            let a = hi - phi * (hi - lo);
            let b = lo + phi * (hi - lo);
            if objective(a) < objective(b) {
                hi = b;
            } else {
                lo = a;
            }
        }
        assert!((w - 0.5 * (lo + hi)).abs() < 1e-7);
        assert!(objective(w) <= objective(0.5 * (lo + hi)) + 1e-12);
    }

    #[test]
    fn l1_zeroes_small_gradient_sums() {
        let params = BoosterParams {
            reg_alpha: 2.0,
            ..BoosterParams::default()
        };
        assert_eq!(leaf_weight(1.5, 3.0, &params), 0.0);
        assert_eq!(leaf_weight(-2.0, 3.0, &params), 0.0);
        assert!(leaf_weight(-2.5, 3.0, &params) > 0.0);
    }

    #[test]
    fn zero_gradient_sum_gives_zero_weight() {
        assert_eq!(leaf_weight(0.0, 5.0, &params_plain()), 0.0);
        // Unregularized empty Hessian must not divide by zero.
        assert_eq!(leaf_weight(0.0, 0.0, &params_plain()), 0.0);
    }

    fn four_row_dataset() -> (Dataset, Vec<GradientPair>) {
        let d = Dataset::new(
            vec!["x".into()],
            vec![vec![1.0, 2.0, 3.0, 4.0]],
            vec![vec![false; 4]],
            vec![0, 0, 1, 1],
        )
        .unwrap();
        let grads = vec![
            GradientPair { g: 0.5, h: 0.25 },
            GradientPair { g: 0.5, h: 0.25 },
            GradientPair { g: -0.5, h: 0.25 },
            GradientPair { g: -0.5, h: 0.25 },
        ];
        (d, grads)
    }

    #[test]
    fn hand_computed_split_on_four_rows() {
        // Oracle: brute-force enumeration of all midpoints and default
        // directions gives threshold 2.5 with gain
        // 0.5 * (1/0.5 + 1/0.5 - 0) = 2.0 and children (G, H) = (+-1, 0.5).
        let (d, grads) = four_row_dataset();
        let split = find_best_split(&[0, 1, 2, 3], &grads, &d, &params_plain()).unwrap();
        assert_eq!(split.feature_index, 0);
        assert_eq!(split.threshold, 2.5);
        assert!((split.gain - 2.0).abs() < 1e-12);
        assert!((split.g_left - 1.0).abs() < 1e-15);
        assert!((split.h_left - 0.5).abs() < 1e-15);
        assert!((split.g_right + 1.0).abs() < 1e-15);
        assert!((split.h_right - 0.5).abs() < 1e-15);
    }

    #[test]
    fn constant_target_has_no_split() {
        let d = Dataset::new(
            vec!["x".into()],
            vec![vec![1.0, 2.0, 3.0, 4.0]],
            vec![vec![false; 4]],
            vec![0, 0, 0, 0],
        )
        .unwrap();
        let grads = vec![GradientPair { g: 0.5, h: 0.25 }; 4];
        assert!(find_best_split(&[0, 1, 2, 3], &grads, &d, &params_plain()).is_none());
    }

    #[test]
    fn large_alpha_kills_every_split() {
        let (d, grads) = four_row_dataset();
        let params = BoosterParams {
            reg_alpha: 10.0,
            reg_lambda: 0.0,
            ..BoosterParams::default()
        };
        assert!(find_best_split(&[0, 1, 2, 3], &grads, &d, &params).is_none());
    }

    #[test]
    fn missing_rows_learn_their_best_direction() {
        // Rows 4 and 5 are missing on x and share the right child's sign,
        // so default_right must win.
        let d = Dataset::new(
            vec!["x".into()],
            vec![vec![1.0, 2.0, 3.0, 4.0, f64::NAN, f64::NAN]],
            vec![vec![false, false, false, false, true, true]],
            vec![0, 0, 1, 1, 1, 1],
        )
        .unwrap();
        let grads = vec![
            GradientPair { g: 0.5, h: 0.25 },
            GradientPair { g: 0.5, h: 0.25 },
            GradientPair { g: -0.5, h: 0.25 },
            GradientPair { g: -0.5, h: 0.25 },
            GradientPair { g: -0.5, h: 0.25 },
            GradientPair { g: -0.5, h: 0.25 },
        ];
        let split = find_best_split(&[0, 1, 2, 3, 4, 5], &grads, &d, &params_plain()).unwrap();
        assert_eq!(split.threshold, 2.5);
        assert!(!split.default_left);
        assert!((split.g_right + 2.0).abs() < 1e-15);
    }

    #[test]
    fn equal_gain_ties_prefer_lower_feature_index() {
        // Two identical features: identical gains everywhere.
        let d = Dataset::new(
            vec!["a".into(), "b".into()],
            vec![vec![1.0, 2.0, 3.0, 4.0], vec![1.0, 2.0, 3.0, 4.0]],
            vec![vec![false; 4], vec![false; 4]],
            vec![0, 0, 1, 1],
        )
        .unwrap();
        let (_, grads) = four_row_dataset();
        let split = find_best_split(&[0, 1, 2, 3], &grads, &d, &params_plain()).unwrap();
        assert_eq!(split.feature_index, 0);
        assert!(split.default_left);
    }

    /// Brute-force best gain for one node: every midpoint of every
    /// feature, both default directions, sums taken directly per side.
    fn oracle_best_gain(
        rows: &[usize],
        grads: &[GradientPair],
        d: &Dataset,
        params: &BoosterParams,
    ) -> Option<f64> {
        let score = |g: f64, h: f64| node_score(g, h, params);
        let (mut g_tot, mut h_tot) = (0.0, 0.0);
        for &r in rows {
            g_tot += grads[r].g;
            h_tot += grads[r].h;
        }
        let mut best: Option<f64> = None;
        for f in 0..d.n_features() {
            let mut vals: Vec<f64> = rows
                .iter()
                .filter_map(|&r| d.value(f, r))
                .collect();
            vals.sort_by(f64::total_cmp);
            vals.dedup();
            for w in vals.windows(2) {
                let t = 0.5 * (w[0] + w[1]);
                for default_left in [true, false] {
                    let (mut g_l, mut h_l) = (0.0, 0.0);
                    for &r in rows {
                        let left = match d.value(f, r) {
                            Some(v) => v <= t,
                            None => default_left,
                        };
                        if left {
                            g_l += grads[r].g;
                            h_l += grads[r].h;
                        }
                    }
                    let gain = 0.5
                        * (score(g_l, h_l) + score(g_tot - g_l, h_tot - h_l)
                            - score(g_tot, h_tot));
                    if gain >= params.min_gain.max(MIN_GAIN_FLOOR)
                        && best.is_none_or(|b| gain > b)
                    {
                        best = Some(gain);
                    }
                }
            }
        }
        best
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn best_gain_matches_brute_force(
            raw in proptest::collection::vec((0u8..6, 0u8..2, proptest::bool::ANY), 4..24),
            alpha in 0.0f64..0.4,
            lambda in 0.0f64..2.0,
        ) {
            let n = raw.len();
            let values: Vec<f64> = raw.iter().map(|(v, _, _)| f64::from(*v)).collect();
            let mask: Vec<bool> = raw.iter().map(|(_, _, m)| *m).collect();
            let labels: Vec<u8> = raw.iter().map(|(_, y, _)| *y).collect();
            let d = Dataset::new(vec!["x".into()], vec![values], vec![mask], labels.clone()).unwrap();
            let grads: Vec<GradientPair> = labels
                .iter()
                .map(|&y| crate::booster::loss::logistic_grad_hess(y, 0.0, 1.0))
                .collect();
            let params = BoosterParams {
                reg_alpha: alpha,
                reg_lambda: lambda,
                max_bins: 1024,
                ..BoosterParams::default()
            };
            let rows: Vec<usize> = (0..n).collect();
            let found = find_best_split(&rows, &grads, &d, &params);
            let oracle = oracle_best_gain(&rows, &grads, &d, &params);
            match (found, oracle) {
                (None, None) => {}
                (Some(s), Some(g)) => prop_assert!((s.gain - g).abs() <= 1e-9 * g.abs().max(1.0),
                    "gain {} vs oracle {}", s.gain, g),
                (found, oracle) => prop_assert!(false, "found {found:?} oracle {oracle:?}"),
            }
        }
    }
}
