use plank_core::region::{lattice_closure_points, CbOutcome, PointRank, DEFAULT_BOUND};
use plank_core::{ord, Ordinal, Region, StrataSet};
use proptest::prelude::*;
use std::collections::BTreeSet;

const SIDE: u8 = 8;

fn n(v: u8) -> Ordinal {
    Ordinal::nat(v as u64)
}

fn region(pts: &BTreeSet<(u8, u8)>) -> Region {
    let pts: Vec<_> = pts.iter().map(|&(x, y)| (n(x), n(y))).collect();
    Region::points(&n(SIDE), &n(SIDE), &pts)
}

fn closure(pts: &BTreeSet<(u8, u8)>) -> BTreeSet<(u8, u8)> {
    let mut k = pts.clone();
    loop {
        let before = k.len();
        let v: Vec<_> = k.iter().copied().collect();
        for p in &v {
            for q in &v {
                k.insert((p.0.min(q.0), p.1.min(q.1)));
                k.insert((p.0.max(q.0), p.1.max(q.1)));
            }
        }
        if k.len() == before {
            return k;
        }
    }
}

fn is_lattice(k: &BTreeSet<(u8, u8)>) -> bool {
    closure(k) == *k
}

fn points() -> impl Strategy<Value = BTreeSet<(u8, u8)>> {
    prop::collection::btree_set((0..=SIDE, 0..=SIDE), 0..7)
}

fn grid() -> impl Iterator<Item = (u8, u8)> {
    (0..=SIDE).flat_map(|x| (0..=SIDE).map(move |y| (x, y)))
}

proptest! {
    #[test]
    fn transpose_is_an_involution(p in points()) {
        let r = region(&p);
        let t = r.transpose();
        prop_assert!(t.transpose().set_eq(&r));
        for (x, y) in grid() {
            prop_assert_eq!(t.contains(&n(x), &n(y)), p.contains(&(y, x)));
        }
    }

    #[test]
    fn boolean_ops(p in points(), q in points()) {
        let (r, s) = (region(&p), region(&q));
        let (u, i, d) = (r.union(&s).unwrap(), r.intersect(&s).unwrap(), r.difference(&s).unwrap());
        for (x, y) in grid() {
            let (a, b) = (p.contains(&(x, y)), q.contains(&(x, y)));
            prop_assert_eq!(u.contains(&n(x), &n(y)), a || b);
            prop_assert_eq!(i.contains(&n(x), &n(y)), a && b);
            prop_assert_eq!(d.contains(&n(x), &n(y)), a && !b);
        }
    }

    #[test]
    fn finite_regions_are_discrete(p in points()) {
        let r = region(&p);
        prop_assert!(r.derivative().is_empty());
        prop_assert!(r.is_closed());
    }

    #[test]
    fn sublattice_matches_brute_force(p in points()) {
        prop_assert_eq!(region(&p).is_sublattice().unwrap(), is_lattice(&p));
    }

    #[test]
    fn lattice_closure_matches_brute_force(p in points()) {
        let pts: Vec<_> = p.iter().map(|&(x, y)| (n(x), n(y))).collect();
        let got: BTreeSet<_> = lattice_closure_points(&pts).into_iter().collect();
        let want: BTreeSet<_> = closure(&p).into_iter().map(|(x, y)| (n(x), n(y))).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn box_rank_is_natural_sum(a in 0u64..4, b in 0u64..4) {
        let top = Ordinal::omega_nat(a.max(b).max(1));
        let s = StrataSet::interval(&top, &Ordinal::zero(), &Ordinal::omega_nat(a));
        let t = StrataSet::interval(&top, &Ordinal::zero(), &Ordinal::omega_nat(b));
        let r = Region::product(&s, &t);
        let corner = r.point_rank(&Ordinal::omega_nat(a), &Ordinal::omega_nat(b), DEFAULT_BOUND).unwrap();
        prop_assert_eq!(corner, PointRank::Known(Ordinal::nat(a + b)));
        prop_assert!(matches!(r.cb_rank_finite(DEFAULT_BOUND), CbOutcome::Rank(k) if k as u64 == a + b));
        let d = r.derivative();
        prop_assert!(d.is_subset(&r));
    }
}

#[test]
fn l_shape_is_not_a_sublattice() {
    let r = Region::parse("ambient w w\nbox [0,w] x {w}\nbox {w} x [0,w]", &Default::default()).unwrap();
    assert!(!r.is_sublattice().unwrap());
}

#[test]
fn triangle_rank() {
    let top = ord("w^2");
    let full = StrataSet::full(&top);
    let tri = Region::triangle(&full, &full);
    assert!(matches!(tri.cb_rank_finite(DEFAULT_BOUND), CbOutcome::Rank(4)));
    assert!(tri.is_sublattice().unwrap());
    assert!(tri.transpose().is_sublattice().unwrap());
}
