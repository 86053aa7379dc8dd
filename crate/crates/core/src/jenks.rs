//! Exact 1-D natural-breaks clustering (Fisher/Jenks dynamic program).
//!
//! Minimizes total within-class sum of squared deviations over sorted values,
//! which for fixed class counts is the exact optimum a brute-force scan over
//! all contiguous break placements would find. Runs in `O(k * n^2)`; scenes
//! cluster at most a few dozen objects, so the quadratic term is irrelevant.

use crate::error::Error;
use crate::Result;

/// Clusters `values` into `k` classes and returns, in input order, each
/// value's cluster index with `0` the smallest-valued cluster and `k - 1` the
/// largest. When several break placements achieve the optimal cost, the
/// earliest (left-most) break positions are chosen.
///
/// Errors when `k` is zero, `k` exceeds the number of values, or a value is
/// not finite.
pub fn jenks_breaks(values: &[f64], k: usize) -> Result<Vec<usize>> {
    let n = values.len();
    if k == 0 {
        return Err(Error::invalid("cluster count must be positive"));
    }
    if k > n {
        return Err(Error::invalid(format!(
            "cannot split {n} values into {k} clusters"
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("values must be finite"));
    }

    // Stable sort keeps equal values in input order, so ties assign
    // deterministically.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();

    // Prefix sums let any interval's sum of squared deviations be computed in
    // O(1): ssd = sum(x^2) - sum(x)^2 / len.
    let mut prefix = vec![0.0; n + 1];
    let mut prefix_sq = vec![0.0; n + 1];
    for (i, &v) in sorted.iter().enumerate() {
        prefix[i + 1] = prefix[i] + v;
        prefix_sq[i + 1] = prefix_sq[i] + v * v;
    }
    // Sum of squared deviations of sorted[lo..hi] (half-open).
    let ssd = |lo: usize, hi: usize| -> f64 {
        let len = (hi - lo) as f64;
        let sum = prefix[hi] - prefix[lo];
        let sum_sq = prefix_sq[hi] - prefix_sq[lo];
        (sum_sq - sum * sum / len).max(0.0)
    };

    // cost[m][i]: optimal cost of splitting the first i values into m + 1
    // clusters; start[m][i]: the (earliest optimal) start index of the last
    // cluster in that solution.
    let mut cost = vec![vec![f64::INFINITY; n + 1]; k];
    let mut start = vec![vec![0usize; n + 1]; k];
    for i in 1..=n {
        cost[0][i] = ssd(0, i);
        start[0][i] = 0;
    }
    for m in 1..k {
        // m + 1 clusters need at least m + 1 values.
        for i in (m + 1)..=n {
            for j in m..i {
                let c = cost[m - 1][j] + ssd(j, i);
                // Strict < keeps the earliest start among equal costs.
                if c < cost[m][i] {
                    cost[m][i] = c;
                    start[m][i] = j;
                }
            }
        }
    }

    // Walk the break table back to label each sorted position.
    let mut labels_sorted = vec![0usize; n];
    let mut hi = n;
    for m in (0..k).rev() {
        let lo = start[m][hi];
        for label in labels_sorted.iter_mut().take(hi).skip(lo) {
            *label = m;
        }
        hi = lo;
    }

    let mut labels = vec![0usize; n];
    for (pos, &orig) in order.iter().enumerate() {
        labels[orig] = labels_sorted[pos];
    }
    Ok(labels)
}

/// Total within-class sum of squared deviations of an assignment, used by
/// callers that need to inspect clustering quality.
pub fn assignment_cost(values: &[f64], labels: &[usize]) -> f64 {
    let k = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut cost = 0.0;
    for cluster in 0..k {
        let members: Vec<f64> = values
            .iter()
            .zip(labels)
            .filter(|&(_, &l)| l == cluster)
            .map(|(&v, _)| v)
            .collect();
        if members.is_empty() {
            continue;
        }
        let mean = members.iter().sum::<f64>() / members.len() as f64;
        cost += members.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
    }
    cost
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    /// Brute-force oracle: enumerate every contiguous break placement over the
    /// sorted values and keep the cheapest assignment.
    fn brute_force(values: &[f64], k: usize) -> (f64, Vec<usize>) {
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());

        // Choose k - 1 break positions among the n - 1 gaps.
        let mut best_cost = f64::INFINITY;
        let mut best_labels = vec![0usize; n];
        let mut breaks = vec![0usize; k - 1];
        fn recurse(
            breaks: &mut Vec<usize>,
            depth: usize,
            lo: usize,
            n: usize,
            eval: &mut dyn FnMut(&[usize]),
        ) {
            if depth == breaks.len() {
                eval(breaks);
                return;
            }
            for b in lo..n {
                breaks[depth] = b;
                recurse(breaks, depth + 1, b + 1, n, eval);
            }
        }
        let k_breaks = k - 1;
        let mut eval = |breaks: &[usize]| {
            let mut labels_sorted = vec![0usize; n];
            let mut cluster = 0;
            for (pos, label) in labels_sorted.iter_mut().enumerate() {
                while cluster < k_breaks && pos >= breaks[cluster] {
                    cluster += 1;
                }
                *label = cluster;
            }
            let mut labels = vec![0usize; n];
            for (pos, &orig) in order.iter().enumerate() {
                labels[orig] = labels_sorted[pos];
            }
            let cost = assignment_cost(values, &labels);
            if cost < best_cost {
                best_cost = cost;
                best_labels = labels;
            }
        };
        if k_breaks == 0 {
            eval(&[]);
        } else {
            recurse(&mut breaks, 0, 1, n, &mut eval);
        }
        (best_cost, best_labels)
    }

    #[test]
    fn separates_three_obvious_groups() {
        let labels = jenks_breaks(&[1.0, 2.0, 3.0, 10.0, 11.0, 100.0], 3).unwrap();
        assert_eq!(labels, vec![0, 0, 0, 1, 1, 2]);
    }

    #[test]
    fn assignment_is_reported_in_input_order() {
        let labels = jenks_breaks(&[10.0, 1.0, 100.0, 2.0, 11.0, 3.0], 3).unwrap();
        assert_eq!(labels, vec![1, 0, 2, 0, 1, 0]);
    }

    #[test]
    fn single_cluster_labels_everything_zero() {
        let labels = jenks_breaks(&[4.0, 1.0, 9.0], 1).unwrap();
        assert_eq!(labels, vec![0, 0, 0]);
    }

    #[test]
    fn equal_values_split_at_earliest_break() {
        let labels = jenks_breaks(&[5.0, 5.0, 5.0, 5.0], 2).unwrap();
        assert_eq!(labels, vec![0, 1, 1, 1]);
    }

    #[test]
    fn more_clusters_than_values_errors() {
        assert!(jenks_breaks(&[1.0, 2.0], 3).is_err());
        assert!(jenks_breaks(&[1.0, 2.0], 0).is_err());
        assert!(jenks_breaks(&[1.0, f64::NAN], 1).is_err());
    }

    #[test]
    fn matches_brute_force_on_random_inputs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(2..=10);
            let k = rng.gen_range(1..=n.min(4));
            let values: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..100.0)).collect();
            let labels = jenks_breaks(&values, k).unwrap();
            let (oracle_cost, _) = brute_force(&values, k);
            let cost = assignment_cost(&values, &labels);
            assert_eq!(cost, oracle_cost, "values {values:?} k {k}");
        }
    }

    proptest! {
        // Smaller values never land in a larger-indexed cluster.
        #[test]
        fn cluster_indices_are_monotone_in_value(
            values in proptest::collection::vec(0.0f64..1000.0, 2..12),
            k in 1usize..5,
        ) {
            let k = k.min(values.len());
            let labels = jenks_breaks(&values, k).unwrap();
            for i in 0..values.len() {
                for j in 0..values.len() {
                    if values[i] < values[j] {
                        prop_assert!(labels[i] <= labels[j]);
                    }
                }
            }
        }

        // Rescaling by a power of two (exact in floating point) leaves the
        // assignment unchanged.
        #[test]
        fn assignments_are_scale_invariant(
            values in proptest::collection::vec(0.0f64..1000.0, 2..12),
            k in 1usize..5,
            exp in -3i32..6,
        ) {
            let k = k.min(values.len());
            let scale = 2.0f64.powi(exp);
            let scaled: Vec<f64> = values.iter().map(|v| v * scale).collect();
            prop_assert_eq!(
                jenks_breaks(&values, k).unwrap(),
                jenks_breaks(&scaled, k).unwrap()
            );
        }

        // Every value is labeled and every cluster index is in range and
        // non-empty up to the maximum used.
        #[test]
        fn labels_are_contiguous_cluster_ids(
            values in proptest::collection::vec(0.0f64..100.0, 1..12),
            k in 1usize..5,
        ) {
            let k = k.min(values.len());
            let labels = jenks_breaks(&values, k).unwrap();
            prop_assert_eq!(labels.len(), values.len());
            for cluster in 0..k {
                prop_assert!(labels.iter().any(|&l| l == cluster));
            }
            prop_assert!(labels.iter().all(|&l| l < k));
        }
    }
}
