//! Reduction of label distributions to typical label sets.
//!
//! Raw aggregated distributions keep every observed label, including rare
//! noise. Typicalization prunes improbable labels with a
//! cardinality-dependent threshold and renormalizes, repeating until the
//! distribution is stable. The threshold grows as the label set shrinks, so
//! a two-way split must be fairly decisive to keep both labels.

use std::collections::BTreeMap;

use crate::dist::LabelDistribution;

/// Minimum probability a label must exceed to survive, given the current
/// number of labels in the distribution.
pub fn p_min(cardinality: usize) -> f64 {
    match cardinality {
        0 | 1 => 0.0,
        2 => 0.30,
        3 => 0.20,
        _ => 0.10,
    }
}

/// Iteratively drops labels whose probability is at or below the threshold
/// for the current cardinality, renormalizing after each pass, until no
/// label falls. If a pass would drop everything, the single most probable
/// label (ties broken lexically) survives with probability one.
pub fn typicalize(dist: &LabelDistribution) -> LabelDistribution {
    let mut probs = dist.probs.clone();
    loop {
        let threshold = p_min(probs.len());
        let survivors: BTreeMap<String, f64> = probs
            .iter()
            .filter(|&(_, &p)| p > threshold)
            .map(|(label, &p)| (label.clone(), p))
            .collect();
        if survivors.len() == probs.len() {
            break;
        }
        if survivors.is_empty() {
            // Everything fell at once: keep the modal label. Iteration is in
            // ascending label order, so strict `>` retains the lexically
            // smallest among ties.
            let (best, _) = probs
                .iter()
                .fold(None::<(&String, f64)>, |acc, (label, &p)| match acc {
                    Some((_, best_p)) if p > best_p => Some((label, p)),
                    None => Some((label, p)),
                    some => some,
                })
                .expect("non-empty distribution");
            probs = BTreeMap::from([(best.clone(), 1.0)]);
            break;
        }
        let total: f64 = survivors.values().sum();
        probs = survivors
            .into_iter()
            .map(|(label, p)| (label, p / total))
            .collect();
    }
    LabelDistribution {
        probs,
        support: dist.support,
    }
}

/// Applies [`typicalize`] to every distribution in a keyed collection.
pub fn typicalize_all<K: Clone + Ord>(
    dists: &BTreeMap<K, LabelDistribution>,
) -> BTreeMap<K, LabelDistribution> {
    dists
        .iter()
        .map(|(key, dist)| (key.clone(), typicalize(dist)))
        .collect()
}

/// Histogram of typical-set sizes: `cardinality -> number of keys`.
pub fn cardinality_histogram<K>(dists: &BTreeMap<K, LabelDistribution>) -> BTreeMap<usize, usize> {
    let mut hist = BTreeMap::new();
    for dist in dists.values() {
        *hist.entry(dist.cardinality()).or_insert(0) += 1;
    }
    hist
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dist(pairs: &[(&str, f64)], support: usize) -> LabelDistribution {
        LabelDistribution {
            probs: pairs.iter().map(|&(l, p)| (l.to_string(), p)).collect(),
            support,
        }
    }

    #[test]
    fn thresholds_by_cardinality() {
        assert_eq!(p_min(1), 0.0);
        assert_eq!(p_min(2), 0.30);
        assert_eq!(p_min(3), 0.20);
        assert_eq!(p_min(4), 0.10);
        assert_eq!(p_min(11), 0.10);
    }

    #[test]
    fn drops_minor_label_and_renormalizes() {
        let d = typicalize(&dist(&[("red", 0.5), ("brown", 0.4), ("blue", 0.1)], 20));
        assert_eq!(d.cardinality(), 2);
        assert!((d.probs["red"] - 5.0 / 9.0).abs() < 1e-9);
        assert!((d.probs["brown"] - 4.0 / 9.0).abs() < 1e-9);
        assert_eq!(d.support, 20);
    }

    #[test]
    fn two_way_split_keeps_both_only_when_decisive() {
        let kept = typicalize(&dist(&[("red", 0.65), ("blue", 0.35)], 10));
        assert_eq!(kept.cardinality(), 2);
        let pruned = typicalize(&dist(&[("red", 0.72), ("blue", 0.28)], 10));
        assert_eq!(pruned.cardinality(), 1);
        assert_eq!(pruned.probs["red"], 1.0);
    }

    #[test]
    fn threshold_is_inclusive() {
        // Exactly the threshold falls: survival requires strictly more.
        let d = typicalize(&dist(&[("red", 0.7), ("blue", 0.3)], 10));
        assert_eq!(d.cardinality(), 1);
        assert_eq!(d.probs["red"], 1.0);
    }

    #[test]
    fn renormalization_can_trigger_a_second_drop() {
        // 0.18 falls at three labels; renormalized 0.22/0.82 ~ 0.268 then
        // falls at two labels, leaving a singleton.
        let d = typicalize(&dist(&[("red", 0.60), ("blue", 0.22), ("gray", 0.18)], 10));
        assert_eq!(d.cardinality(), 1);
        assert_eq!(d.probs["red"], 1.0);
    }

    #[test]
    fn near_uniform_wide_distribution_collapses_to_modal_label() {
        let labels = [
            "red", "orange", "yellow", "brown", "green", "blue", "purple", "pink", "white",
            "gray", "black",
        ];
        let pairs: Vec<(&str, f64)> = labels.iter().map(|&l| (l, 1.0 / 11.0)).collect();
        let d = typicalize(&dist(&pairs, 11));
        assert_eq!(d.probs, BTreeMap::from([("black".to_string(), 1.0)]));
    }

    #[test]
    fn modal_fallback_prefers_higher_probability_then_lex_order() {
        // Twelve labels, all at or below 0.10, so one pass drops everything.
        // The fallback must pick from the 0.095 group (mango/zebra), not the
        // lexically smallest overall label (apple), and break the remaining
        // tie lexically.
        let mut pairs = vec![("mango", 0.095), ("zebra", 0.095)];
        for label in [
            "apple", "berry", "cherry", "grape", "guava", "lemon", "melon", "olive", "pear",
            "plumb",
        ] {
            pairs.push((label, 0.081));
        }
        let d = typicalize(&dist(&pairs, 12));
        assert_eq!(d.probs, BTreeMap::from([("mango".to_string(), 1.0)]));
    }

    #[test]
    fn singleton_is_a_fixpoint() {
        let d = dist(&[("red", 1.0)], 4);
        assert_eq!(typicalize(&d), d);
    }

    #[test]
    fn histogram_counts_cardinalities() {
        let mut dists = BTreeMap::new();
        dists.insert("a".to_string(), dist(&[("red", 1.0)], 1));
        dists.insert("b".to_string(), dist(&[("red", 0.5), ("blue", 0.5)], 2));
        dists.insert("c".to_string(), dist(&[("red", 0.5), ("gray", 0.5)], 2));
        assert_eq!(
            cardinality_histogram(&dists),
            BTreeMap::from([(1, 1), (2, 2)])
        );
    }

    prop_compose! {
        fn arb_dist()(
            raw in proptest::collection::btree_map("[a-e]", 0.05f64..1.0, 1..6),
            support in 1usize..100,
        ) -> LabelDistribution {
            let total: f64 = raw.values().sum();
            LabelDistribution {
                probs: raw.into_iter().map(|(l, p)| (l, p / total)).collect(),
                support,
            }
        }
    }

    proptest! {
        #[test]
        fn typicalize_is_idempotent(d in arb_dist()) {
            let once = typicalize(&d);
            let twice = typicalize(&once);
            prop_assert_eq!(&once.probs.len(), &twice.probs.len());
            for (label, p) in &once.probs {
                prop_assert!((twice.probs[label] - p).abs() < 1e-12);
            }
        }

        #[test]
        fn output_sums_to_one_and_clears_threshold(d in arb_dist()) {
            let out = typicalize(&d);
            let total: f64 = out.probs.values().sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
            if out.cardinality() > 1 {
                let threshold = p_min(out.cardinality());
                for &p in out.probs.values() {
                    prop_assert!(p > threshold);
                }
            }
            prop_assert_eq!(out.support, d.support);
        }
    }
}
