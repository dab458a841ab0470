//! Fixed-length bag vectors built from per-feature order statistics.
//!
//! A bag of `n` instances in `R^d` becomes a vector of length `d * |Q|`:
//! for every feature the `n` values are ranked, and the entry for level `q`
//! is the order statistic at index `floor(q * n)` (0-based, clamped to the
//! last element). Entries are always elements of the bag — never
//! interpolations — so `q = 0` is the per-feature minimum and `q = 1` the
//! per-feature maximum. The classic min/max bag vector is exactly the
//! `{0, 1}` special case.

use crate::data::{Bag, QuantileSpec};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RepError {
    #[error("cannot take a quantile of an empty value list")]
    EmptyValues,
    #[error("quantile level {0} outside [0, 1]")]
    LevelOutOfRange(f64),
}

/// Quantile summary of one bag, laid out feature-major: all levels of
/// feature 0, then all levels of feature 1, and so on.
#[derive(Debug, Clone, PartialEq)]
pub struct BagVector {
    pub values: Vec<f64>,
    pub spec: QuantileSpec,
}

impl BagVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Sorted-position index selected for level `q` over `n` values:
/// `floor(q * n)` clamped to `n - 1`.
pub fn quantile_index(q: f64, n: usize) -> usize {
    ((q * n as f64).floor() as usize).min(n - 1)
}

/// Order statistic of `values` at level `q`.
///
/// `q = 0` gives the minimum and `q = 1` the maximum; intermediate levels
/// pick the element a fraction `q` of the way up the ranked list.
pub fn quantile_value(values: &[f64], q: f64) -> Result<f64, RepError> {
    if values.is_empty() {
        return Err(RepError::EmptyValues);
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(RepError::LevelOutOfRange(q));
    }
    let mut work = values.to_vec();
    let k = quantile_index(q, work.len());
    let (_, kth, _) = work.select_nth_unstable_by(k, f64::total_cmp);
    Ok(*kth)
}

/// Maps a bag to its quantile vector under `spec`, feature-major.
pub fn bag_quantile_rep(bag: &Bag, spec: &QuantileSpec) -> Result<BagVector, RepError> {
    if bag.instances.is_empty() {
        return Err(RepError::EmptyValues);
    }
    let dim = bag.dim();
    let mut values = Vec::with_capacity(dim * spec.len());
    for feature in 0..dim {
        let column = bag.feature_column(feature);
        for &q in spec.levels() {
            values.push(quantile_value(&column, q)?);
        }
    }
    Ok(BagVector {
        values,
        spec: spec.clone(),
    })
}

/// Per-feature minimum and maximum, `[min_0, max_0, min_1, max_1, ...]`.
///
/// Computed by a direct scan rather than through the ranking path; agrees
/// with [`bag_quantile_rep`] at levels `{0, 1}`, whose feature-major layout
/// interleaves the same way.
pub fn bag_minimax_rep(bag: &Bag) -> Result<BagVector, RepError> {
    if bag.instances.is_empty() {
        return Err(RepError::EmptyValues);
    }
    let dim = bag.dim();
    let mut values = Vec::with_capacity(2 * dim);
    for feature in 0..dim {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for instance in &bag.instances {
            let v = instance.features[feature];
            lo = lo.min(v);
            hi = hi.max(v);
        }
        values.push(lo);
        values.push(hi);
    }
    Ok(BagVector {
        values,
        spec: QuantileSpec::minimax(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Instance;
    use proptest::prelude::*;

    /// Order statistic by counting, with no sorting and no shared code
    /// with the implementation path.
    fn orderstat_by_counting(values: &[f64], k: usize) -> f64 {
        for &v in values {
            let less = values.iter().filter(|&&x| x < v).count();
            let less_eq = values.iter().filter(|&&x| x <= v).count();
            if less <= k && k < less_eq {
                return v;
            }
        }
        unreachable!("k within range of a nonempty list");
    }

    /// The 11 points of the worked two-feature example bag.
    fn example_bag() -> Bag {
        let points = [
            (2.1, 3.9),
            (0.9, 5.5),
            (8.0, 3.0),
            (7.0, 3.6),
            (8.6, 2.8),
            (7.6, 1.3),
            (7.9, 4.1),
            (5.0, 2.9),
            (5.5, 3.6),
            (6.4, 1.1),
            (6.6, 2.1),
        ];
        let instances = points
            .iter()
            .map(|&(a, b)| Instance::new(vec![a, b]).unwrap())
            .collect();
        Bag::new("example", None, instances).unwrap()
    }

    #[test]
    fn eleven_value_quantiles() {
        let f1 = [0.9, 2.1, 5.0, 5.5, 6.4, 6.6, 7.0, 7.6, 7.9, 8.0, 8.6];
        assert_eq!(quantile_value(&f1, 0.1).unwrap(), 2.1);
        assert_eq!(quantile_value(&f1, 0.5).unwrap(), 6.6);
        assert_eq!(quantile_value(&f1, 0.9).unwrap(), 8.0);
    }

    #[test]
    fn zero_and_one_are_min_and_max() {
        let values = [3.0, -1.0, 2.0, 7.5, 0.0];
        assert_eq!(quantile_value(&values, 0.0).unwrap(), -1.0);
        assert_eq!(quantile_value(&values, 1.0).unwrap(), 7.5);
    }

    #[test]
    fn single_value_for_any_level() {
        for q in [0.0, 0.3, 0.5, 0.99, 1.0] {
            assert_eq!(quantile_value(&[4.2], q).unwrap(), 4.2);
        }
    }

    #[test]
    fn rejects_empty_and_out_of_range() {
        assert_eq!(quantile_value(&[], 0.5), Err(RepError::EmptyValues));
        assert_eq!(
            quantile_value(&[1.0], 1.5),
            Err(RepError::LevelOutOfRange(1.5))
        );
        assert_eq!(
            quantile_value(&[1.0], -0.1),
            Err(RepError::LevelOutOfRange(-0.1))
        );
    }

    #[test]
    fn example_bag_rep_matches_counting_oracle() {
        let bag = example_bag();
        let spec = QuantileSpec::new(vec![0.1, 0.5, 0.9]).unwrap();
        let rep = bag_quantile_rep(&bag, &spec).unwrap();
        let n = bag.len();
        let mut expected = Vec::new();
        for feature in 0..2 {
            let column = bag.feature_column(feature);
            for &q in spec.levels() {
                expected.push(orderstat_by_counting(&column, quantile_index(q, n)));
            }
        }
        assert_eq!(rep.values, expected);
        // Hand-checked ranks: index floor(q*11) is 1, 5 and 9.
        assert_eq!(rep.values, vec![2.1, 6.6, 8.0, 1.3, 3.0, 4.1]);
    }

    #[test]
    fn example_bag_minimax() {
        let rep = bag_minimax_rep(&example_bag()).unwrap();
        assert_eq!(rep.values, vec![0.9, 8.6, 1.1, 5.5]);
    }

    #[test]
    fn single_instance_bag_repeats_the_instance() {
        let bag = Bag::new(
            "one",
            None,
            vec![Instance::new(vec![3.0, -2.0]).unwrap()],
        )
        .unwrap();
        let rep = bag_minimax_rep(&bag).unwrap();
        assert_eq!(rep.values, vec![3.0, 3.0, -2.0, -2.0]);
        let spec = QuantileSpec::default();
        let qrep = bag_quantile_rep(&bag, &spec).unwrap();
        assert_eq!(qrep.values, vec![3.0, 3.0, 3.0, 3.0, -2.0, -2.0, -2.0, -2.0]);
    }

    #[test]
    fn identical_instances_give_constant_entries() {
        let inst = Instance::new(vec![1.5, 0.25]).unwrap();
        let bag = Bag::new("same", None, vec![inst.clone(), inst.clone(), inst]).unwrap();
        let spec = QuantileSpec::new(vec![0.2, 0.8]).unwrap();
        let rep = bag_quantile_rep(&bag, &spec).unwrap();
        assert_eq!(rep.values, vec![1.5, 1.5, 0.25, 0.25]);
    }

    fn arb_bag() -> impl Strategy<Value = (Vec<Vec<f64>>, usize)> {
        // (instances, dim) with 1..=50 instances of dimension 1..=10
        (1usize..=10).prop_flat_map(|dim| {
            (
                prop::collection::vec(
                    prop::collection::vec(-1e6f64..1e6, dim..=dim),
                    1..=50,
                ),
                Just(dim),
            )
        })
    }

    fn arb_spec() -> impl Strategy<Value = QuantileSpec> {
        prop::collection::btree_set(0u32..=1000, 1..=6).prop_map(|set| {
            QuantileSpec::new(set.into_iter().map(|k| k as f64 / 1000.0).collect()).unwrap()
        })
    }

    fn bag_from_rows(rows: &[Vec<f64>]) -> Bag {
        let instances = rows
            .iter()
            .map(|r| Instance::new(r.clone()).unwrap())
            .collect();
        Bag::new("prop", None, instances).unwrap()
    }

    proptest! {
        #[test]
        fn matches_counting_oracle((rows, dim) in arb_bag(), spec in arb_spec()) {
            let bag = bag_from_rows(&rows);
            let rep = bag_quantile_rep(&bag, &spec).unwrap();
            let n = bag.len();
            for feature in 0..dim {
                let column = bag.feature_column(feature);
                for (qi, &q) in spec.levels().iter().enumerate() {
                    let expect = orderstat_by_counting(&column, quantile_index(q, n));
                    prop_assert_eq!(rep.values[feature * spec.len() + qi], expect);
                }
            }
        }

        #[test]
        fn permutation_invariant((rows, _dim) in arb_bag(), spec in arb_spec(), seed in any::<u64>()) {
            let bag = bag_from_rows(&rows);
            let mut shuffled = rows.clone();
            // Cheap deterministic shuffle.
            let mut state = seed;
            for i in (1..shuffled.len()).rev() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let j = (state >> 33) as usize % (i + 1);
                shuffled.swap(i, j);
            }
            let shuffled_bag = bag_from_rows(&shuffled);
            prop_assert_eq!(
                bag_quantile_rep(&bag, &spec).unwrap().values,
                bag_quantile_rep(&shuffled_bag, &spec).unwrap().values
            );
            prop_assert_eq!(
                bag_minimax_rep(&bag).unwrap().values,
                bag_minimax_rep(&shuffled_bag).unwrap().values
            );
        }

        #[test]
        fn monotone_in_level_and_member_of_bag((rows, dim) in arb_bag(), spec in arb_spec()) {
            let bag = bag_from_rows(&rows);
            let rep = bag_quantile_rep(&bag, &spec).unwrap();
            for feature in 0..dim {
                let column = bag.feature_column(feature);
                let entries = &rep.values[feature * spec.len()..(feature + 1) * spec.len()];
                for pair in entries.windows(2) {
                    prop_assert!(pair[0] <= pair[1]);
                }
                for &v in entries {
                    prop_assert!(column.contains(&v));
                }
            }
        }

        #[test]
        fn minimax_equals_zero_one_spec((rows, _dim) in arb_bag()) {
            let bag = bag_from_rows(&rows);
            let direct = bag_minimax_rep(&bag).unwrap();
            let via_quantiles = bag_quantile_rep(&bag, &QuantileSpec::minimax()).unwrap();
            prop_assert_eq!(direct.values, via_quantiles.values);
        }

        #[test]
        fn commutes_with_monotone_feature_maps((rows, dim) in arb_bag(), spec in arb_spec()) {
            // Apply a strictly increasing map to feature 0 of every instance.
            let map = |v: f64| v / 2.0 + 1.0;
            let mut mapped = rows.clone();
            for row in &mut mapped {
                row[0] = map(row[0]);
            }
            let rep = bag_quantile_rep(&bag_from_rows(&rows), &spec).unwrap();
            let mapped_rep = bag_quantile_rep(&bag_from_rows(&mapped), &spec).unwrap();
            for qi in 0..spec.len() {
                prop_assert_eq!(mapped_rep.values[qi], map(rep.values[qi]));
            }
            // Other features are untouched.
            for feature in 1..dim {
                for qi in 0..spec.len() {
                    let idx = feature * spec.len() + qi;
                    prop_assert_eq!(mapped_rep.values[idx], rep.values[idx]);
                }
            }
        }
    }
}
