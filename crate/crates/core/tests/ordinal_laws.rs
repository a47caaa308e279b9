//! Ordinal arithmetic below ω^ω against a coefficient-vector model.

use num_bigint::BigUint;
use plank_core::{ord, Ordinal};
use proptest::prelude::*;

const DEG: usize = 4;

/// `c[k]` is the coefficient of ω^k.
#[derive(Clone, Debug, PartialEq)]
struct Model([u64; DEG * 2]);

impl Model {
    fn lead(&self) -> Option<usize> {
        (0..self.0.len()).rev().find(|&k| self.0[k] > 0)
    }

    fn add(&self, o: &Model) -> Model {
        let Some(k) = o.lead() else { return self.clone() };
        let mut r = [0; DEG * 2];
        r[k + 1..].copy_from_slice(&self.0[k + 1..]);
        r[k] = self.0[k] + o.0[k];
        r[..k].copy_from_slice(&o.0[..k]);
        Model(r)
    }

    fn mul(&self, o: &Model) -> Model {
        let Some(lead) = self.lead() else { return Model([0; DEG * 2]) };
        let mut acc = Model([0; DEG * 2]);
        for j in (0..o.0.len()).rev().filter(|&j| o.0[j] > 0) {
            let mut t = [0; DEG * 2];
            if j == 0 {
                t = self.0;
                t[lead] *= o.0[0];
            } else {
                t[lead + j] = o.0[j];
            }
            acc = acc.add(&Model(t));
        }
        acc
    }

    fn nat_sum(&self, o: &Model) -> Model {
        let mut r = self.0;
        for (a, b) in r.iter_mut().zip(o.0) {
            *a += b;
        }
        Model(r)
    }

    fn to_ordinal(&self) -> Ordinal {
        Ordinal::from_cnf((0..self.0.len()).rev().filter(|&k| self.0[k] > 0).map(|k| (Ordinal::nat(k as u64), BigUint::from(self.0[k]))))
    }

    fn key(&self) -> Vec<u64> {
        self.0.iter().rev().copied().collect()
    }
}

fn model() -> impl Strategy<Value = Model> {
    proptest::array::uniform4(prop_oneof![3 => Just(0u64), 2 => 1u64..4]).prop_map(|c| {
        let mut r = [0; DEG * 2];
        r[..DEG].copy_from_slice(&c);
        Model(r)
    })
}

proptest! {
    #[test]
    fn add_matches_model(a in model(), b in model()) {
        prop_assert_eq!(a.to_ordinal().add(&b.to_ordinal()), a.add(&b).to_ordinal());
    }

    #[test]
    fn mul_matches_model(a in model(), b in model()) {
        prop_assert_eq!(a.to_ordinal().mul(&b.to_ordinal()), a.mul(&b).to_ordinal());
    }

    #[test]
    fn natural_sum_matches_model(a in model(), b in model()) {
        prop_assert_eq!(a.to_ordinal().natural_sum(&b.to_ordinal()), a.nat_sum(&b).to_ordinal());
    }

    #[test]
    fn order_matches_model(a in model(), b in model()) {
        prop_assert_eq!(a.to_ordinal().cmp(&b.to_ordinal()), a.key().cmp(&b.key()));
    }

    #[test]
    fn display_round_trips(a in model()) {
        let o = a.to_ordinal();
        prop_assert_eq!(Ordinal::parse(&o.to_string()).unwrap(), o);
    }

    #[test]
    fn left_sub_inverts_add(a in model(), b in model()) {
        let (a, b) = (a.to_ordinal(), b.to_ordinal());
        prop_assert_eq!(a.left_sub(&a.add(&b)), Some(b));
    }

    #[test]
    fn mul_distributes_left(a in model(), b in model(), c in model()) {
        let (a, b, c) = (a.to_ordinal(), b.to_ordinal(), c.to_ordinal());
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
    }
}

#[test]
fn absorption_examples() {
    assert_eq!(ord("1").add(&ord("w")), ord("w"));
    assert_eq!(ord("w").add(&ord("w^2")), ord("w^2"));
    assert_eq!(ord("w*2").mul(&ord("w")), ord("w^2"));
    assert_eq!(ord("w").mul(&ord("2")), ord("w*2"));
    assert_eq!(Ordinal::parse_normalize("w^2 + w + w^2").unwrap().to_string(), "w^2*2");
}

#[test]
fn epsilon_fixed_points() {
    let e0 = Ordinal::epsilon(0);
    assert_eq!(Ordinal::omega_pow(&e0), e0);
    assert!(e0 > Ordinal::omega_pow(&ord("w^w")));
    assert_eq!(e0.le(), e0);
}
