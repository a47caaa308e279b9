//! Property suites run by `plank suite all` and the acceptance tests.
//!
//! Each suite compares two independent code paths or checks an algebraic
//! law exhaustively, and reports the number of cases and every failure.

use crate::classify::{catalog, classify_with, rectangle_selftest};
use crate::construct::{separate, ClubSpec};
use crate::duality::{all_posets, check_universal_property, final_segments, free_boolean_algebra, prime_filters, FinPoset};
use crate::error::Result;
use crate::ordinal::{ord, Ordinal};
use crate::region::CbOutcome;
use crate::spaceterm::{measure, SpaceTerm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;

/// Settings shared by all suites.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub bound: usize,
    pub seed: u64,
    pub ordinal_triples: usize,
    pub lattices: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { bound: crate::region::DEFAULT_BOUND, seed: 1, ordinal_triples: 10_000, lattices: 1_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteOutcome {
    pub id: u8,
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// The first few failures, verbatim.
    pub examples: Vec<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }
}

impl fmt::Display for SuiteOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "[{verdict}] {} {}: {} cases, {} failures", self.id, self.name, self.cases, self.failures)?;
        for e in &self.examples {
            write!(f, "\n    {e}")?;
        }
        Ok(())
    }
}

struct Tally {
    cases: usize,
    failures: usize,
    examples: Vec<String>,
}

impl Tally {
    fn new() -> Tally {
        Tally { cases: 0, failures: 0, examples: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.examples.len() < 8 {
                self.examples.push(what());
            }
        }
    }

    fn done(self, id: u8, name: &'static str) -> SuiteOutcome {
        SuiteOutcome { id, name, cases: self.cases, failures: self.failures, examples: self.examples }
    }
}

pub const SUITE_NAMES: [&str; 8] = [
    "ordinal-laws",
    "rank-two-path",
    "vecsum-rank",
    "square-ranks",
    "duality",
    "spectrum-separation",
    "rectangle-identity",
    "classifier-catalog",
];

/// Runs suite `id` (1 to 8).
pub fn run(id: u8, cfg: &SuiteConfig) -> Option<SuiteOutcome> {
    Some(match id {
        1 => ordinal_laws(cfg),
        2 => rank_two_path(cfg),
        3 => vecsum_rank(),
        4 => square_ranks(cfg),
        5 => duality(),
        6 => spectrum_separation(cfg),
        7 => rectangle_identity(cfg),
        8 => classifier_catalog(cfg),
        _ => return None,
    })
}

pub fn run_all(cfg: &SuiteConfig) -> Vec<SuiteOutcome> {
    (1..=8).filter_map(|id| run(id, cfg)).collect()
}

/// A random ordinal below `ε₂`, built from small atoms by `+`, `·` and `ω^`.
pub fn random_ordinal(rng: &mut impl Rng, depth: u32) -> Ordinal {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..6) {
            0 => Ordinal::zero(),
            1 => Ordinal::nat(rng.gen_range(1u32..5)),
            2 => Ordinal::omega(),
            3 => Ordinal::epsilon(0),
            4 => Ordinal::epsilon(1),
            _ => Ordinal::omega_nat(rng.gen_range(2..4)),
        };
    }
    let a = random_ordinal(rng, depth - 1);
    let b = random_ordinal(rng, depth - 1);
    match rng.gen_range(0..4) {
        0 => a.add(&b),
        1 => a.mul(&b),
        2 if a < Ordinal::epsilon(0).mul(&Ordinal::omega()) => Ordinal::omega_pow(&a).add(&b),
        _ => a.natural_sum(&b),
    }
}

fn ordinal_laws(cfg: &SuiteConfig) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut t = Tally::new();
    let bound = Ordinal::epsilon(2);
    for _ in 0..cfg.ordinal_triples {
        let a = random_ordinal(&mut rng, 3);
        let b = random_ordinal(&mut rng, 3);
        let c = random_ordinal(&mut rng, 3);
        let show = || format!("a = {a}, b = {b}, c = {c}");
        t.check(a < bound && b < bound && c < bound, || format!("out of range: {}", show()));
        t.check(a.add(&b).add(&c) == a.add(&b.add(&c)), || format!("+ associativity: {}", show()));
        t.check(a.mul(&b).mul(&c) == a.mul(&b.mul(&c)), || format!("· associativity: {}", show()));
        t.check(a.mul(&b.add(&c)) == a.mul(&b).add(&a.mul(&c)), || format!("left distributivity: {}", show()));
        t.check(a.natural_sum(&b) == b.natural_sum(&a), || format!("⊕ commutativity: {}", show()));
        t.check(
            a.natural_sum(&b).natural_sum(&c) == a.natural_sum(&b.natural_sum(&c)),
            || format!("⊕ associativity: {}", show()),
        );
        let (lo, hi) = if b <= c { (&b, &c) } else { (&c, &b) };
        t.check(a.add(lo) <= a.add(hi), || format!("+ right monotone: {}", show()));
        t.check(lo.add(&a) <= hi.add(&a), || format!("+ left weak monotone: {}", show()));
        t.check(lo.mul(&a) <= hi.mul(&a), || format!("· left weak monotone: {}", show()));
        if lo < hi {
            t.check(a.add(lo) < a.add(hi), || format!("+ strict monotone: {}", show()));
            t.check(lo.natural_sum(&a) < hi.natural_sum(&a), || format!("⊕ strict monotone: {}", show()));
            if !a.is_zero() {
                t.check(a.mul(lo) < a.mul(hi), || format!("· strict monotone: {}", show()));
            }
        }
        t.check(a <= a.add(&b) && b <= a.add(&b), || format!("sum bounds: {}", show()));
        t.check(a.left_sub(&a.add(&b)).as_ref() == Some(&b), || format!("left subtraction: {}", show()));
    }
    t.done(1, SUITE_NAMES[0])
}

/// Terms with instantiable regions and rank at most 6.
pub fn rank_suite_terms() -> Vec<SpaceTerm> {
    let params: Vec<Ordinal> = ["0", "1", "3", "w", "w^2", "w^3", "w^2 + w", "w^3 + w^2*2"].iter().map(|s| ord(s)).collect();
    let ord_t = |g: &Ordinal| SpaceTerm::Ord(g.clone());
    let mut terms = Vec::new();
    for a in &params {
        terms.push(ord_t(a));
        terms.push(SpaceTerm::K(a.clone()));
        terms.push(SpaceTerm::Tri(a.clone()));
        terms.push(SpaceTerm::T(a.clone()));
        for rho in ["1", "w", "w^2"] {
            terms.push(SpaceTerm::VecSum(ord(rho), vec![ord_t(a)]));
        }
        for b in &params {
            terms.push(SpaceTerm::Prod(Box::new(ord_t(a)), Box::new(ord_t(b))));
            terms.push(SpaceTerm::Plank(a.clone(), b.clone()));
            terms.push(SpaceTerm::Prod(Box::new(SpaceTerm::VecSum(Ordinal::omega(), vec![ord_t(a)])), Box::new(ord_t(b))));
            terms.push(SpaceTerm::Disj(Box::new(ord_t(a)), Box::new(SpaceTerm::K(b.clone()))));
        }
    }
    terms.retain(|t| matches!(t.rank(), Ok(r) if r <= Ordinal::nat(6u32)) && t.instantiate().is_ok());
    terms
}

fn rank_two_path(cfg: &SuiteConfig) -> SuiteOutcome {
    let mut t = Tally::new();
    for term in rank_suite_terms() {
        let symbolic = term.rank().expect("filtered");
        let region = term.instantiate().expect("filtered");
        let oracle = match region.cb_rank_finite(cfg.bound) {
            CbOutcome::Rank(n) => Some(Ordinal::nat(n as u64)),
            _ => None,
        };
        t.check(oracle.as_ref() == Some(&symbolic), || format!("{term}: symbolic {symbolic}, oracle {oracle:?}"));
    }
    t.done(2, SUITE_NAMES[1])
}

fn vecsum_rank() -> SuiteOutcome {
    let mut t = Tally::new();
    for a in 0..=4u64 {
        for b in 0..=4u64 {
            let (pa, pb) = (Ordinal::omega_pow(&Ordinal::nat(a)), Ordinal::omega_pow(&Ordinal::nat(b)));
            let term = SpaceTerm::VecSum(pb.clone(), vec![SpaceTerm::Ord(pa.clone())]);
            let want = Ordinal::nat(a + b);
            let symbolic = term.rank();
            let line = pa.mul(&pb).rank_of_ordinal_space();
            t.check(symbolic.as_ref() == Ok(&want) && line == want, || {
                format!("vecsum(w^{b}, ord(w^{a})): symbolic {symbolic:?}, line {line}, want {want}")
            });
        }
    }
    t.done(3, SUITE_NAMES[2])
}

fn square_ranks(cfg: &SuiteConfig) -> SuiteOutcome {
    let mut t = Tally::new();
    for n in 0..=3 {
        let e = Ordinal::epsilon(n);
        let k = SpaceTerm::K(e.clone()).rank();
        let tt = SpaceTerm::T(e.clone()).rank();
        t.check(k.as_ref() == Ok(&e.mul_nat(&2u32.into())), || format!("rank K(e{n}) = {k:?}"));
        t.check(tt.as_ref() == Ok(&e), || format!("rank T(e{n}) = {tt:?}"));
    }
    for a in ["w", "w^2", "w^3"] {
        let a = ord(a);
        for term in [SpaceTerm::K(a.clone()), SpaceTerm::Tri(a.clone())] {
            let region = term.instantiate().expect("square instantiates");
            let predicted = term.invariant_vector();
            let m = measure(&region, predicted.top.as_ref(), cfg.bound);
            let rank_ok = predicted.rank == m.rank.map(|n| Ordinal::nat(n as u64));
            let top_ok = predicted.top.is_some() && predicted.top == m.top;
            let unit_ok = predicted.unitary == m.unitary && m.end_point == Some((a.clone(), a.clone()));
            t.check(rank_ok && top_ok && unit_ok, || {
                format!("{term}: predicted {predicted}, measured rank {:?} top {:?} end {:?}", m.rank, m.top, m.end_point)
            });
        }
    }
    let a = ord("w^2");
    let shapes: Vec<String> = [SpaceTerm::Tri(a.clone()), SpaceTerm::K(a)]
        .iter()
        .map(|term| {
            let region = term.instantiate().expect("square instantiates");
            let m = measure(&region, term.top_derivative_type().ok().flatten().as_ref(), cfg.bound);
            m.top.map(|s| s.shape.to_string()).unwrap_or_default()
        })
        .collect();
    t.check(shapes == ["chain(3)", "T(2)"], || format!("profiles at w^2: {shapes:?}"));
    t.done(4, SUITE_NAMES[3])
}

/// One representative per isomorphism class of posets on `n` points.
fn poset_classes(n: usize) -> Vec<FinPoset> {
    let mut reps: Vec<FinPoset> = Vec::new();
    for p in all_posets(n) {
        if !reps.iter().any(|q| q.is_isomorphic(&p)) {
            reps.push(p);
        }
    }
    reps
}

fn duality() -> SuiteOutcome {
    let mut t = Tally::new();
    for n in 0..=5 {
        for p in all_posets(n) {
            let back = prime_filters(&final_segments(&p));
            t.check(back.is_isomorphic(&p), || format!("round trip fails on\n{p}"));
        }
    }
    for n in 0..=5 {
        for p in poset_classes(n) {
            if free_boolean_algebra(&p).atoms() > 5 {
                continue;
            }
            for b_atoms in 0..=4 {
                match check_universal_property(&p, b_atoms) {
                    Ok(r) => t.check(r.holds(), || format!("universal property, |B| = {}: {r:?}\n{p}", 1 << b_atoms)),
                    Err(e) => t.check(false, || format!("universal property: {e}")),
                }
            }
        }
    }
    let classes: Vec<Vec<FinPoset>> = (0..=6).map(poset_classes).collect();
    for (n, ps) in classes.iter().enumerate() {
        for qs in &classes[..=6 - n] {
            for p in ps {
                for q in qs {
                    let lhs = final_segments(&p.disjoint_sum(q));
                    let rhs = final_segments(p).product(&final_segments(q));
                    t.check(lhs.is_isomorphic(&rhs), || format!("fs of a disjoint sum:\n{p}\n{q}"));
                }
            }
        }
    }
    t.done(5, SUITE_NAMES[4])
}

/// The subsets of `{ω, ω², ω³, ω⁴}` with at least two elements.
pub fn generator_subsets() -> Vec<Vec<Ordinal>> {
    (0u32..16)
        .filter(|m| m.count_ones() >= 2)
        .map(|m| (0..4).filter(|i| m >> i & 1 == 1).map(|i| Ordinal::omega_nat(i as u64 + 1)).collect())
        .collect()
}

fn spectrum_separation(cfg: &SuiteConfig) -> SuiteOutcome {
    let mut t = Tally::new();
    let nu = Ordinal::omega();
    let subsets = generator_subsets();
    let show = |s: &[Ordinal]| s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    let run = |a: &[Ordinal], b: &[Ordinal]| -> Result<_> {
        separate(&ClubSpec::new(a.to_vec(), None)?, &ClubSpec::new(b.to_vec(), None)?, &nu, cfg.bound)
    };
    for (i, a) in subsets.iter().enumerate() {
        for b in &subsets[i + 1..] {
            match run(a, b) {
                Ok(s) => {
                    let want = |g: &[Ordinal]| g.iter().map(|x| x.ln().expect("power")).collect::<BTreeSet<_>>();
                    let ok = s.separated
                        && s.a.agrees()
                        && s.b.agrees()
                        && s.a.oracle == want(a)
                        && s.b.oracle == want(b);
                    t.check(ok, || {
                        format!("{{{}}} vs {{{}}}: {:?} / {:?}", show(a), show(b), s.a.oracle, s.b.oracle)
                    });
                }
                Err(e) => t.check(false, || format!("{{{}}} vs {{{}}}: {e}", show(a), show(b))),
            }
        }
    }
    t.done(6, SUITE_NAMES[5])
}

fn rectangle_identity(cfg: &SuiteConfig) -> SuiteOutcome {
    let r = rectangle_selftest(cfg.seed, cfg.lattices, 8);
    let mut t = Tally::new();
    t.cases = r.lattices;
    t.failures = r.failures.len();
    t.examples = r.failures.into_iter().take(8).collect();
    t.done(7, SUITE_NAMES[6])
}

fn classifier_catalog(cfg: &SuiteConfig) -> SuiteOutcome {
    let mut t = Tally::new();
    for e in catalog() {
        match classify_with(&e.region, &e.top, cfg.bound) {
            Ok(c) => t.check(c.matches && c.label.to_string() == e.expected, || {
                format!("{}: got {}, expected {}\n{c}", e.name, c.label, e.expected)
            }),
            Err(err) => t.check(false, || format!("{}: {err}", e.name)),
        }
    }
    t.done(8, SUITE_NAMES[7])
}
