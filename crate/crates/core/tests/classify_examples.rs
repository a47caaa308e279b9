use plank_core::classify::{catalog, classify, ClassLabel};
use plank_core::{ord, Ordinal, Region, StrataSet};
use proptest::prelude::*;
use std::collections::BTreeSet;

fn label(k: &Region, top: &str) -> String {
    let c = classify(k, &ord(top)).unwrap();
    assert!(c.matches, "{c}");
    c.label.to_string()
}

fn parse(src: &str) -> Region {
    Region::parse(src, &Default::default()).unwrap()
}

#[test]
fn lattice_closure_of_two_points() {
    let k = Region::lattice_closure(&[(ord("0"), ord("3")), (ord("3"), ord("0"))]);
    let k = Region::from_pieces(&ord("w"), &ord("w"), k.pieces().to_vec());
    assert_eq!(k.finite_points().unwrap().len(), 4);
    assert_eq!(label(&k, "w"), "Countable(3)");
}

#[test]
fn basic_shapes() {
    assert_eq!(label(&parse("ambient w^3 w^3\nbox [0,w^3] x [0,w]"), "w^3"), "Plank(w)");
    assert_eq!(label(&parse("ambient w^3 w^3\nbox [0,w] x [0,w^3]"), "w^3"), "Plank(w)");
    assert_eq!(label(&parse("ambient w^2 w^2\nbox [0,w^2] x [0,w^2]"), "w^2"), "FullSquare");
    assert_eq!(label(&parse("ambient w^2 w^2\ntri [0,w^2] x [0,w^2]"), "w^2"), "Triangle");
    assert_eq!(label(&parse("ambient w^2 w^2\npiece eq [0,w^2] x [0,w^2]"), "w^2"), "OrdinalSpace");
    assert_eq!(label(&parse("ambient w^2 w^2\nbox [0,w] x [0,w]"), "w^2"), "Countable(w^2)");
}

#[test]
fn plank_zero_is_an_ordinal_space() {
    let k = parse("ambient w^2 w^2\nbox [0,w^2] x {0}");
    assert_eq!(label(&k, "w^2"), "OrdinalSpace");
}

#[test]
fn rejects_bad_input() {
    let l_shape = parse("ambient w w\nbox [0,w] x {w}\nbox {w} x [0,w]");
    assert!(classify(&l_shape, &ord("w")).is_err());
    let open = parse("ambient w w\nbox [0,w) x {0}");
    assert!(classify(&open, &ord("w")).is_err());
    let box_ = parse("ambient w w\nbox [0,w] x [0,w]");
    assert!(classify(&box_, &ord("w+1")).is_err());
}

#[test]
fn catalog_is_consistent_under_transpose() {
    for e in catalog() {
        let a = classify(&e.region, &e.top).unwrap();
        let b = classify(&e.region.transpose(), &e.top).unwrap();
        assert_eq!(a.label.to_string(), e.expected, "{}", e.name);
        assert_eq!(a.label, b.label, "{}", e.name);
        assert!(a.matches && b.matches, "{}", e.name);
    }
}

fn close(mut k: BTreeSet<(u8, u8)>) -> BTreeSet<(u8, u8)> {
    loop {
        let v: Vec<_> = k.iter().copied().collect();
        let before = k.len();
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

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn finite_lattices_are_countable(pts in prop::collection::btree_set((0u8..9, 0u8..9), 1..5)) {
        let k = close(pts);
        let pts: Vec<_> = k.iter().map(|&(x, y)| (Ordinal::nat(x as u64), Ordinal::nat(y as u64))).collect();
        let r = Region::points(&ord("w"), &ord("w"), &pts);
        let c = classify(&r, &ord("w")).unwrap();
        prop_assert_eq!(c.label, ClassLabel::Countable { sigma: Ordinal::nat(k.len() as u64 - 1) });
    }

    #[test]
    fn planks_report_their_height(b in 0u64..3) {
        let top = ord("w^3");
        let s = StrataSet::full(&top);
        let t = StrataSet::interval(&top, &Ordinal::zero(), &Ordinal::omega_nat(b));
        let c = classify(&Region::product(&s, &t), &top).unwrap();
        prop_assert!(c.matches);
        match c.label {
            ClassLabel::Plank { gamma, .. } => prop_assert_eq!(gamma, Ordinal::omega_nat(b)),
            ClassLabel::OrdinalSpace { .. } => prop_assert_eq!(b, 0),
            other => prop_assert!(false, "unexpected {}", other),
        }
    }
}
