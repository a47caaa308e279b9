use plank_core::duality::{all_posets, final_segments, prime_filters, FinPoset};
use proptest::prelude::*;

fn poset_upto(max: usize) -> impl Strategy<Value = FinPoset> {
    (0..=max).prop_flat_map(|n| prop::sample::select(all_posets(n)))
}

fn poset() -> impl Strategy<Value = FinPoset> {
    poset_upto(4)
}

/// Up-sets counted straight from the order relation.
fn count_up_sets(p: &FinPoset) -> usize {
    let n = p.len();
    (0u32..1 << n)
        .filter(|m| (0..n).all(|a| m >> a & 1 == 0 || (0..n).all(|b| !p.le(a, b) || m >> b & 1 == 1)))
        .count()
}

proptest! {
    #[test]
    fn final_segment_count(p in poset()) {
        prop_assert_eq!(final_segments(&p).len(), count_up_sets(&p));
    }

    #[test]
    fn round_trip(p in poset()) {
        prop_assert!(prime_filters(&final_segments(&p)).is_isomorphic(&p));
    }

    #[test]
    fn sum_goes_to_product(p in poset_upto(3), q in poset_upto(3)) {
        let lhs = final_segments(&p.disjoint_sum(&q));
        let rhs = final_segments(&p).product(&final_segments(&q));
        prop_assert!(lhs.is_isomorphic(&rhs));
    }

    #[test]
    fn lattice_laws(p in poset()) {
        let l = final_segments(&p);
        for a in 0..l.len() {
            prop_assert_eq!(l.meet(a, l.one()), a);
            prop_assert_eq!(l.join(a, l.zero()), a);
            for b in 0..l.len() {
                prop_assert_eq!(l.meet(a, l.join(a, b)), a);
                for c in 0..l.len() {
                    prop_assert_eq!(l.meet(a, l.join(b, c)), l.join(l.meet(a, b), l.meet(a, c)));
                }
            }
        }
    }
}

#[test]
fn chains_and_antichains() {
    for n in 0..6 {
        assert_eq!(final_segments(&FinPoset::chain(n)).len(), n + 1);
        assert_eq!(final_segments(&FinPoset::antichain(n)).len(), 1 << n);
    }
}
