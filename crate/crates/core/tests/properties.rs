//! Randomized invariants across modules.

use std::sync::Arc;

use jordanlab::chain::{exact_column_distribution, simulate_columns, transition_law, GeometricRows};
use jordanlab::gfq::{column_lengths, jordan_type, jordan_type_incremental, power_ranks, sample_strict_upper, FiniteField};
use jordanlab::harness::sample_chain_columns;
use jordanlab::limit::{limit_pmf_series, LimitQuery};
use jordanlab::partition::interlaces;
use jordanlab::prelimit::{prelimit_pmf_integral, TorusQuad};
use jordanlab::rng::stream;
use jordanlab::scalar::{exact_to_f64, inverse_of};
use jordanlab::{dinf, ExactScalar, Partition, Signature};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn arb_partition(max_len: usize, max_part: usize) -> impl Strategy<Value = Partition> {
    prop::collection::vec(0..=max_part, 0..=max_len).prop_map(Partition::from_unsorted)
}

fn arb_signature(k: usize, lo: i64, hi: i64) -> impl Strategy<Value = Signature> {
    prop::collection::vec(lo..=hi, k).prop_map(|mut v| {
        v.sort_unstable_by(|a, b| b.cmp(a));
        Signature::new(v).unwrap()
    })
}

fn arb_q() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugation_is_an_involution(lam in arb_partition(12, 15)) {
        prop_assert_eq!(lam.conjugate().conjugate(), lam.clone());
        prop_assert_eq!(lam.conjugate().size(), lam.size());
        let weighted: usize = (1..=lam.part(1)).map(|i| i * lam.multiplicity(i)).sum();
        prop_assert_eq!(weighted, lam.size());
    }

    #[test]
    fn shift_preserves_signatures(s in arb_signature(4, -20, 20), d in -10i64..10, e in -10i64..10) {
        let shifted = s.shift(d);
        prop_assert!(shifted.entries().windows(2).all(|w| w[0] >= w[1]));
        prop_assert_eq!(shifted.size(), s.size() + 4 * d);
        prop_assert_eq!(shifted.shift(e), s.shift(d + e));
    }

    #[test]
    fn transitions_are_exact_probabilities(mu in arb_partition(10, 10), q in arb_q()) {
        let law = transition_law(&mu, &inverse_of(q)).unwrap();
        prop_assert!(law.total().is_one());
        for (nu, p) in law.successors() {
            prop_assert!(p > ExactScalar::zero());
            prop_assert_eq!(nu.size(), mu.size() + 1);
            prop_assert!(nu.contains(&mu));
            // adding one box is a horizontal strip
            prop_assert!(interlaces(&mu, &nu));
        }
    }

    #[test]
    fn column_laws_are_exact_probabilities(n in 0usize..30, k in 1usize..4, q in arb_q()) {
        let d = exact_column_distribution(n, k, &inverse_of(q)).unwrap();
        prop_assert!(d.is_exact_probability());
        for (s, p) in d.iter() {
            prop_assert!(*p > ExactScalar::zero());
            prop_assert_eq!(s.k(), k);
            prop_assert!(s.size() <= n as i64 && s.last().unwrap() >= 0);
        }
    }

    #[test]
    fn jordan_type_is_consistent(n in 1usize..40, q in prop::sample::select(vec![2usize, 3, 4]), seed in any::<u64>()) {
        let field = Arc::new(FiniteField::new(q).unwrap());
        let a = sample_strict_upper(n, &field, &mut stream(seed, 0));
        let lam = jordan_type(&a).unwrap();
        prop_assert_eq!(lam.size(), n);
        prop_assert_eq!(jordan_type_incremental(&a).unwrap(), lam.clone());
        let ranks = power_ranks(&a, n);
        prop_assert!(ranks.windows(2).all(|w| w[0] >= w[1]));
        let gaps: Vec<usize> = ranks.windows(2).map(|w| w[0] - w[1]).collect();
        prop_assert!(gaps.windows(2).all(|w| w[0] >= w[1]));
        prop_assert_eq!(lam.conjugate().part(1), n - a.rank());
        prop_assert_eq!(column_lengths(&a, 3).unwrap(), lam.columns(3));
    }

    #[test]
    fn limit_law_shift_covariance(
        l in arb_signature(2, -3, 6),
        t in 0.25f64..0.75,
        chi in 0.5f64..2.0,
    ) {
        let a = limit_pmf_series(&LimitQuery::new(t, t * chi, l.clone(), 1e-14).unwrap()).unwrap();
        let b = limit_pmf_series(&LimitQuery::new(t, chi, l.shift(1), 1e-14).unwrap()).unwrap();
        prop_assert!((a.value - b.value).abs() < 1e-12, "{} vs {}", a.value, b.value);
        // nonnegative up to the reported accuracy
        prop_assert!(a.value >= -a.error.max(1e-14), "{:?}", a);
    }

    #[test]
    fn finite_n_integral_is_radius_free(n in 1u64..9, eta in 0usize..9, radius in 1.05f64..2.5) {
        prop_assume!(eta as u64 <= n);
        let eta = Partition::from_unsorted(vec![eta]);
        let a = prelimit_pmf_integral(n, 1, 0.5, &eta, &TorusQuad { radius, ..TorusQuad::default() }, 1e-12).unwrap();
        let b = prelimit_pmf_integral(n, 1, 0.5, &eta, &TorusQuad::default(), 1e-12).unwrap();
        prop_assert!((a.value - b.value).abs() < 1e-9);
        let exact = exact_column_distribution(n as usize, 1, &inverse_of(2)).unwrap();
        let key = Signature::new(vec![eta.part(1) as i64]).unwrap();
        let want = exact.get(&key).map(exact_to_f64).unwrap_or(0.0);
        prop_assert!((b.value - want).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sampling_is_reproducible(seed in any::<u64>(), n in 1u64..200, k in 1usize..3) {
        let a = sample_chain_columns(n, 2, k, 1500, seed, 0).unwrap();
        let b = sample_chain_columns(n, 2, k, 1500, seed, 0).unwrap();
        prop_assert_eq!(dinf(&a, &b), 0.0);
        let total: f64 = a.iter().map(|(_, p)| *p).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chain_columns_are_partition_columns(seed in any::<u64>(), n in 0usize..300, q in arb_q()) {
        let rows = GeometricRows::from_q(q).unwrap();
        let cols = simulate_columns(n, 3, &rows, &mut stream(seed, 1));
        prop_assert!(cols.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(cols.iter().sum::<usize>() <= n);
    }
}
