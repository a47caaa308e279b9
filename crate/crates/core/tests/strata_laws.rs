//! Strata sets inside [0, ω²] against a direct membership model.

use plank_core::{ord, Bound, Ordinal, StrataSet};
use proptest::prelude::*;

/// `None` is ω²; `Some((i, j))` is ω·i + j.
type Pt = Option<(u64, u64)>;

fn to_ord(p: Pt) -> Ordinal {
    match p {
        None => ord("w^2"),
        Some((i, j)) => Ordinal::omega().mul_nat(&i.into()).add(&Ordinal::nat(j)),
    }
}

fn le(p: Pt) -> u64 {
    match p {
        None => 2,
        Some((i, 0)) if i > 0 => 1,
        Some(_) => 0,
    }
}

fn key(p: Pt) -> (u64, u64) {
    p.unwrap_or((u64::MAX, 0))
}

#[derive(Clone, Debug)]
struct Atom {
    a: Pt,
    b: Pt,
    lo: u64,
    hi: Option<u64>,
}

impl Atom {
    fn has(&self, p: Pt) -> bool {
        key(self.a) <= key(p)
            && key(p) <= key(self.b)
            && p != Some((0, 0))
            && self.lo <= le(p)
            && self.hi.map_or(true, |h| le(p) < h)
    }
}

fn member(atoms: &[Atom], p: Pt) -> bool {
    atoms.iter().any(|a| a.has(p))
}

/// Limits below ω² are approached by ω·k + n; ω² by ω·n or ω·n + 5.
fn in_acc(atoms: &[Atom], p: Pt) -> bool {
    match p {
        None => member(atoms, Some((60, 0))) || member(atoms, Some((60, 5))),
        Some((i, 0)) if i > 0 => member(atoms, Some((i - 1, 60))),
        Some(_) => false,
    }
}

fn pt() -> impl Strategy<Value = Pt> {
    prop_oneof![1 => Just(None), 6 => (0u64..6, 0u64..6).prop_map(Some)]
}

fn atom() -> impl Strategy<Value = Atom> {
    (pt(), pt(), 0u64..3, prop_oneof![Just(None), (1u64..4).prop_map(Some)]).prop_map(|(a, b, lo, hi)| {
        let (a, b) = if key(a) <= key(b) { (a, b) } else { (b, a) };
        Atom { a, b, lo, hi }
    })
}

fn build(atoms: &[Atom]) -> StrataSet {
    let top = ord("w^2");
    atoms.iter().fold(StrataSet::empty(&top), |acc, a| {
        let hi = a.hi.map_or(Bound::Inf, |h| Bound::Fin(Ordinal::nat(h)));
        acc.u(&StrataSet::strata(&top, &to_ord(a.a), &to_ord(a.b), &Ordinal::nat(a.lo), &hi))
    })
}

fn samples() -> Vec<Pt> {
    let mut v: Vec<Pt> = (0..8).flat_map(|i| (0..8).map(move |j| Some((i, j)))).collect();
    v.extend([Some((60, 0)), Some((60, 5)), Some((3, 60)), None]);
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn membership(atoms in prop::collection::vec(atom(), 1..4)) {
        let s = build(&atoms);
        for p in samples() {
            prop_assert_eq!(s.contains(&to_ord(p)), member(&atoms, p), "{:?} in {}", p, s);
        }
    }

    #[test]
    fn accumulation(atoms in prop::collection::vec(atom(), 1..4)) {
        let acc = build(&atoms).acc();
        for p in samples() {
            prop_assert_eq!(acc.contains(&to_ord(p)), in_acc(&atoms, p), "{:?} in acc = {}", p, acc);
        }
    }

    #[test]
    fn boolean_ops(x in prop::collection::vec(atom(), 1..3), y in prop::collection::vec(atom(), 1..3)) {
        let (s, t) = (build(&x), build(&y));
        let (u, i, d, c) = (s.u(&t), s.i(&t), s.d(&t), s.complement());
        for p in samples() {
            let (a, b) = (member(&x, p), member(&y, p));
            let o = to_ord(p);
            prop_assert_eq!(u.contains(&o), a || b);
            prop_assert_eq!(i.contains(&o), a && b);
            prop_assert_eq!(d.contains(&o), a && !b);
            prop_assert_eq!(c.contains(&o), !a);
        }
        prop_assert!(s.u(&t).complement().set_eq(&c.i(&t.complement())));
    }

    #[test]
    fn closure_and_derivative(atoms in prop::collection::vec(atom(), 1..4)) {
        let s = build(&atoms);
        let cl = s.closure();
        prop_assert!(s.is_subset(&cl));
        prop_assert!(cl.is_closed());
        prop_assert!(cl.closure().set_eq(&cl));
        prop_assert!(s.derivative().set_eq(&s.i(&s.acc())));
        prop_assert!(s.acc().acc().is_subset(&s.acc()));
    }

    #[test]
    fn acc_distributes_over_union(x in prop::collection::vec(atom(), 1..3), y in prop::collection::vec(atom(), 1..3)) {
        let (s, t) = (build(&x), build(&y));
        prop_assert!(s.u(&t).acc().set_eq(&s.acc().u(&t.acc())));
    }
}

#[test]
fn ranks_of_intervals() {
    let top = ord("w^2");
    let full = StrataSet::full(&top);
    assert_eq!(full.point_rank(&top).unwrap(), ord("2"));
    assert_eq!(full.point_rank(&ord("w*3")).unwrap(), ord("1"));
    assert_eq!(full.point_rank(&ord("w+4")).unwrap(), ord("0"));
    assert_eq!(full.order_type(), ord("w^2 + 1"));
    assert!(full.is_unitary());
    assert!(StrataSet::finite(&top, &[ord("3"), ord("w")]).acc().is_empty());
}
