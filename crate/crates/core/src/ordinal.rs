//! Ordinals below ε_ω in Cantor normal form.
//!
//! An ordinal is a list of terms `ω^e · c` with strictly decreasing exponents
//! and positive coefficients. The exponent of a term is either another ordinal
//! or one of the atoms `ε_n`; since `ω^{ε_n} = ε_n` the term `ω^{ε_n}·c` is the
//! ordinal `ε_n·c`, and an exponent equal to an atom is always stored as the
//! atom itself. That keeps the representation unique.
//!
//! Comparison is structural. Two normal forms compare lexicographically by
//! term, and an atom `ε_n` against a general exponent `o` compares the ordinal
//! `ε_n` with `o`, which recurses into the leading exponent of `o`. The
//! recursion is on strictly smaller syntax, so it terminates.

use crate::error::{Error, Result};
use crate::parse::Cursor;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;

/// Default number of ε-atoms accepted by the parser (`e0` .. `e7`).
pub const DEFAULT_EPS_ATOMS: u32 = 8;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Ordinal {
    terms: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Term {
    exp: Exp,
    coeff: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Exp {
    Eps(u32),
    Pow(Box<Ordinal>),
}

impl Exp {
    fn zero() -> Exp {
        Exp::Pow(Box::default())
    }

    fn is_zero(&self) -> bool {
        matches!(self, Exp::Pow(o) if o.is_zero())
    }

    fn value(&self) -> Ordinal {
        match self {
            Exp::Eps(n) => Ordinal::epsilon(*n),
            Exp::Pow(o) => (**o).clone(),
        }
    }

    fn from_value(e: Ordinal) -> Exp {
        match e.epsilon_index() {
            Some(n) => Exp::Eps(n),
            None => Exp::Pow(Box::new(e)),
        }
    }
}

fn cmp_exp(a: &Exp, b: &Exp) -> Ordering {
    match (a, b) {
        (Exp::Eps(m), Exp::Eps(n)) => m.cmp(n),
        (Exp::Eps(m), Exp::Pow(o)) => cmp_eps(*m, o),
        (Exp::Pow(o), Exp::Eps(n)) => cmp_eps(*n, o).reverse(),
        (Exp::Pow(x), Exp::Pow(y)) => x.cmp(y),
    }
}

/// Compares `ε_n` with `o`, where `o` is not itself an atom.
fn cmp_eps(n: u32, o: &Ordinal) -> Ordering {
    match o.terms.first() {
        None => Ordering::Greater,
        Some(t) => match cmp_exp(&Exp::Eps(n), &t.exp) {
            Ordering::Equal => {
                // ω^{ε_n} = ε_n, so o = ε_n·c + ... is at least ε_n.
                if t.coeff.is_one() && o.terms.len() == 1 {
                    Ordering::Equal
                } else {
                    Ordering::Less
                }
            }
            ord => ord,
        },
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            match cmp_exp(&a.exp, &b.exp) {
                Ordering::Equal => {}
                ord => return ord,
            }
            match a.coeff.cmp(&b.coeff) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ordinal {
    pub fn zero() -> Ordinal {
        Ordinal { terms: Vec::new() }
    }

    pub fn one() -> Ordinal {
        Ordinal::nat(1u32)
    }

    pub fn nat(n: impl Into<BigUint>) -> Ordinal {
        let n = n.into();
        if n.is_zero() {
            Ordinal::zero()
        } else {
            Ordinal { terms: vec![Term { exp: Exp::zero(), coeff: n }] }
        }
    }

    pub fn omega() -> Ordinal {
        Ordinal::omega_pow(&Ordinal::one())
    }

    /// `ω^k` for a natural `k`.
    pub fn omega_nat(k: u64) -> Ordinal {
        Ordinal::omega_pow(&Ordinal::nat(k))
    }

    pub fn epsilon(n: u32) -> Ordinal {
        Ordinal { terms: vec![Term { exp: Exp::Eps(n), coeff: BigUint::one() }] }
    }

    /// `ω^e`; fixes the ε-atoms.
    pub fn omega_pow(e: &Ordinal) -> Ordinal {
        Ordinal { terms: vec![Term { exp: Exp::from_value(e.clone()), coeff: BigUint::one() }] }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.terms.iter().all(|t| t.exp.is_zero())
    }

    /// The value as a natural number, if finite.
    pub fn as_nat(&self) -> Option<BigUint> {
        match self.terms.as_slice() {
            [] => Some(BigUint::zero()),
            [t] if t.exp.is_zero() => Some(t.coeff.clone()),
            _ => None,
        }
    }

    pub fn as_u64(&self) -> Option<u64> {
        self.as_nat().and_then(|n| n.to_u64())
    }

    pub fn is_successor(&self) -> bool {
        self.terms.last().is_some_and(|t| t.exp.is_zero())
    }

    pub fn is_limit(&self) -> bool {
        self.terms.last().is_some_and(|t| !t.exp.is_zero())
    }

    pub fn is_epsilon(&self) -> bool {
        self.epsilon_index().is_some()
    }

    /// `Some(n)` when the ordinal is the atom `ε_n`.
    pub fn epsilon_index(&self) -> Option<u32> {
        match self.terms.as_slice() {
            [Term { exp: Exp::Eps(n), coeff }] if coeff.is_one() => Some(*n),
            _ => None,
        }
    }

    /// Largest ε index mentioned anywhere in the notation.
    pub fn max_epsilon_index(&self) -> Option<u32> {
        self.terms
            .iter()
            .filter_map(|t| match &t.exp {
                Exp::Eps(n) => Some(*n),
                Exp::Pow(o) => o.max_epsilon_index(),
            })
            .max()
    }

    /// Number of Cantor normal form terms.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// The normal form as `(exponent, coefficient)` pairs.
    pub fn cnf(&self) -> Vec<(Ordinal, BigUint)> {
        self.terms.iter().map(|t| (t.exp.value(), t.coeff.clone())).collect()
    }

    /// Builds an ordinal from arbitrary `(exponent, coefficient)` pairs by
    /// ordinal summation, so the input need not be normal.
    pub fn from_cnf(pairs: impl IntoIterator<Item = (Ordinal, BigUint)>) -> Ordinal {
        pairs.into_iter().fold(Ordinal::zero(), |acc, (e, c)| {
            acc.add(&Ordinal::omega_pow(&e).mul_nat(&c))
        })
    }

    pub fn leading_exponent(&self) -> Ordinal {
        self.terms.first().map(|t| t.exp.value()).unwrap_or_default()
    }

    pub fn leading_coefficient(&self) -> BigUint {
        self.terms.first().map(|t| t.coeff.clone()).unwrap_or_default()
    }

    /// Smallest exponent of the normal form, with `le(0) = 0`.
    pub fn le(&self) -> Ordinal {
        self.terms.last().map(|t| t.exp.value()).unwrap_or_default()
    }

    /// Smallest exponent of the normal form; 0 has none.
    pub fn last_exponent(&self) -> Result<Ordinal> {
        if self.is_zero() {
            Err(Error::domain("last_exponent is undefined for 0"))
        } else {
            Ok(self.le())
        }
    }

    pub fn is_indecomposable(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::domain("0 is not a candidate for indecomposability"));
        }
        Ok(self.is_power())
    }

    /// True iff the ordinal is `ω^e` for some `e` (false for 0).
    pub fn is_power(&self) -> bool {
        matches!(self.terms.as_slice(), [t] if t.coeff.is_one())
    }

    /// `e` such that `self = ω^e`.
    pub fn ln(&self) -> Result<Ordinal> {
        if self.is_power() {
            Ok(self.leading_exponent())
        } else {
            Err(Error::domain(format!("ln: {self} is not indecomposable")))
        }
    }

    pub fn succ(&self) -> Ordinal {
        self.add(&Ordinal::one())
    }

    /// Ordinal sum `self + other`.
    pub fn add(&self, other: &Ordinal) -> Ordinal {
        let Some(head) = other.terms.first() else {
            return self.clone();
        };
        let mut terms = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut rest = other.terms.iter();
        for t in &self.terms {
            match cmp_exp(&t.exp, &head.exp) {
                Ordering::Greater => terms.push(t.clone()),
                Ordering::Equal => {
                    rest.next();
                    terms.push(Term { exp: t.exp.clone(), coeff: &t.coeff + &head.coeff });
                    break;
                }
                Ordering::Less => break,
            }
        }
        terms.extend(rest.cloned());
        Ordinal { terms }
    }

    /// `self · c` for a natural `c`.
    pub fn mul_nat(&self, c: &BigUint) -> Ordinal {
        if c.is_zero() || self.is_zero() {
            return Ordinal::zero();
        }
        let mut terms = self.terms.clone();
        terms[0].coeff *= c;
        Ordinal { terms }
    }

    /// Ordinal product `self · other`.
    pub fn mul(&self, other: &Ordinal) -> Ordinal {
        if self.is_zero() || other.is_zero() {
            return Ordinal::zero();
        }
        let lead = self.leading_exponent();
        other.terms.iter().fold(Ordinal::zero(), |acc, t| {
            let piece = if t.exp.is_zero() {
                self.mul_nat(&t.coeff)
            } else {
                Ordinal::omega_pow(&lead.add(&t.exp.value())).mul_nat(&t.coeff)
            };
            acc.add(&piece)
        })
    }

    /// Hessenberg natural sum: merge the normal forms term by term.
    pub fn natural_sum(&self, other: &Ordinal) -> Ordinal {
        let mut terms = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (a, b) = (&self.terms[i], &other.terms[j]);
            match cmp_exp(&a.exp, &b.exp) {
                Ordering::Greater => {
                    terms.push(a.clone());
                    i += 1;
                }
                Ordering::Less => {
                    terms.push(b.clone());
                    j += 1;
                }
                Ordering::Equal => {
                    terms.push(Term { exp: a.exp.clone(), coeff: &a.coeff + &b.coeff });
                    i += 1;
                    j += 1;
                }
            }
        }
        terms.extend_from_slice(&self.terms[i..]);
        terms.extend_from_slice(&other.terms[j..]);
        Ordinal { terms }
    }

    /// The unique `c` with `self + c = other`, when `self <= other`.
    pub fn left_sub(&self, other: &Ordinal) -> Option<Ordinal> {
        let mut i = 0;
        while i < self.terms.len() && i < other.terms.len() && self.terms[i] == other.terms[i] {
            i += 1;
        }
        if i == self.terms.len() {
            return Some(Ordinal { terms: other.terms[i..].to_vec() });
        }
        if i == other.terms.len() {
            return None;
        }
        let (a, b) = (&self.terms[i], &other.terms[i]);
        match cmp_exp(&a.exp, &b.exp) {
            Ordering::Less => Some(Ordinal { terms: other.terms[i..].to_vec() }),
            Ordering::Equal if a.coeff < b.coeff => {
                let mut terms = vec![Term { exp: b.exp.clone(), coeff: &b.coeff - &a.coeff }];
                terms.extend_from_slice(&other.terms[i + 1..]);
                Some(Ordinal { terms })
            }
            _ => None,
        }
    }

    /// Splits off one copy of the last term: `self = head + ω^e`.
    /// Returns `(head, e)`; `None` for 0.
    pub fn split_last_unit(&self) -> Option<(Ordinal, Ordinal)> {
        let last = self.terms.last()?;
        let mut head = self.clone();
        let t = head.terms.last_mut().expect("nonempty");
        if t.coeff.is_one() {
            head.terms.pop();
        } else {
            t.coeff -= 1u32;
        }
        Some((head, last.exp.value()))
    }

    /// Removes the whole last term: `self = head + ω^e·c`. Returns `(head, e, c)`.
    pub fn split_last_term(&self) -> Option<(Ordinal, Ordinal, BigUint)> {
        let last = self.terms.last()?;
        let head = Ordinal { terms: self.terms[..self.terms.len() - 1].to_vec() };
        Some((head, last.exp.value(), last.coeff.clone()))
    }

    /// Cantor-Bendixson rank of the compact space `[0, self]`: its leading exponent.
    pub fn rank_of_ordinal_space(&self) -> Ordinal {
        self.leading_exponent()
    }

    /// Parses canonical notation; non-canonical input is rejected.
    pub fn parse(src: &str) -> Result<Ordinal> {
        Ordinal::parse_with(src, &ParseOptions::default())
    }

    /// Parses and canonicalizes any well-formed expression.
    pub fn parse_normalize(src: &str) -> Result<Ordinal> {
        Ordinal::parse_with(src, &ParseOptions { normalize: true, ..ParseOptions::default() })
    }

    pub fn parse_with(src: &str, opts: &ParseOptions) -> Result<Ordinal> {
        let mut cur = Cursor::new(src);
        let value = parse_expr(&mut cur, opts)?;
        cur.expect_end()?;
        if !opts.normalize {
            check_canonical(src, &value)?;
        }
        Ok(value)
    }
}

/// Options for the ordinal grammar.
#[derive(Clone, Debug)]
pub struct ParseOptions {
    /// Accept non-canonical input and normalize it.
    pub normalize: bool,
    /// Number of ε-atoms available: indices must be below this.
    pub eps_atoms: u32,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { normalize: false, eps_atoms: DEFAULT_EPS_ATOMS }
    }
}

pub(crate) fn parse_expr(cur: &mut Cursor<'_>, opts: &ParseOptions) -> Result<Ordinal> {
    let mut acc = parse_term(cur, opts)?;
    while cur.eat('+') {
        acc = acc.add(&parse_term(cur, opts)?);
    }
    Ok(acc)
}

fn parse_term(cur: &mut Cursor<'_>, opts: &ParseOptions) -> Result<Ordinal> {
    let base = match cur.peek() {
        Some('w') | Some('ω') => {
            cur.bump();
            if cur.eat('^') {
                let e = if cur.eat('(') {
                    let e = parse_expr(cur, opts)?;
                    cur.expect(')')?;
                    e
                } else {
                    parse_atom(cur, opts)?
                };
                Ordinal::omega_pow(&e)
            } else {
                Ordinal::omega()
            }
        }
        Some('e') | Some('ε') => {
            cur.bump();
            parse_eps(cur, opts)?
        }
        Some(c) if c.is_ascii_digit() => return Ok(Ordinal::nat(cur.nat()?)),
        _ => return Err(cur.error("expected an ordinal term (`w`, `eN` or a number)")),
    };
    if cur.eat('*') {
        Ok(base.mul_nat(&cur.nat()?))
    } else {
        Ok(base)
    }
}

fn parse_eps(cur: &mut Cursor<'_>, opts: &ParseOptions) -> Result<Ordinal> {
    let start = cur.pos();
    let n = cur.small_nat()?;
    if n >= opts.eps_atoms {
        return Err(Error::Parse {
            pos: start,
            msg: format!("ε index {n} out of range (atoms e0..e{})", opts.eps_atoms.saturating_sub(1)),
        });
    }
    Ok(Ordinal::epsilon(n))
}

fn parse_atom(cur: &mut Cursor<'_>, opts: &ParseOptions) -> Result<Ordinal> {
    match cur.peek() {
        Some('w') | Some('ω') => {
            cur.bump();
            Ok(Ordinal::omega())
        }
        Some('e') | Some('ε') => {
            cur.bump();
            parse_eps(cur, opts)
        }
        Some(c) if c.is_ascii_digit() => Ok(Ordinal::nat(cur.nat()?)),
        _ => Err(cur.error("expected an exponent")),
    }
}

fn check_canonical(src: &str, value: &Ordinal) -> Result<()> {
    let squash = |s: &str| -> String {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                'ω' => 'w',
                'ε' => 'e',
                c => c,
            })
            .collect()
    };
    let canonical = value.to_string();
    if squash(src) == squash(&canonical) {
        Ok(())
    } else {
        Err(Error::NonCanonical { input: src.trim().to_string(), canonical })
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match &t.exp {
                Exp::Pow(e) if e.is_zero() => {
                    write!(f, "{}", t.coeff)?;
                    continue;
                }
                Exp::Eps(n) => write!(f, "e{n}")?,
                Exp::Pow(e) => {
                    if e.as_u64() == Some(1) {
                        write!(f, "w")?;
                    } else if e.is_finite() || **e == Ordinal::omega() {
                        let inner = if e.is_finite() { e.to_string() } else { "w".into() };
                        write!(f, "w^{inner}")?;
                    } else {
                        write!(f, "w^({e})")?;
                    }
                }
            }
            if !t.coeff.is_one() {
                write!(f, "*{}", t.coeff)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ordinal({self})")
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::nat(n)
    }
}

impl std::str::FromStr for Ordinal {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ordinal::parse_normalize(s)
    }
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ordinal::parse_normalize(&s).map_err(serde::de::Error::custom)
    }
}

/// Shorthand used throughout the tests: parses with normalization and panics on error.
pub fn ord(src: &str) -> Ordinal {
    Ordinal::parse_normalize(src).unwrap_or_else(|e| panic!("bad ordinal literal `{src}`: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_absorbs_and_merges() {
        assert_eq!(ord("w").add(&ord("1")), ord("w + 1"));
        assert_eq!(ord("1").add(&ord("w")), ord("w"));
        assert_eq!(ord("w^2 + w").add(&ord("w^2")), ord("w^2*2"));
    }

    #[test]
    fn mul_cases() {
        assert_eq!(ord("w^2").mul(&ord("w^3")), ord("w^5"));
        assert_eq!(ord("w + 1").mul(&Ordinal::zero()), Ordinal::zero());
        assert_eq!(ord("w + 1").mul(&ord("w")), ord("w^2"));
        assert_eq!(ord("w + 1").mul(&ord("2")), ord("w*2 + 1"));
        assert_eq!(ord("e0").mul(&ord("w")), ord("w^(e0 + 1)"));
        assert_eq!(ord("w").mul(&ord("e0")), ord("e0"));
    }

    #[test]
    fn omega_pow_fixes_epsilons() {
        assert_eq!(Ordinal::omega_pow(&Ordinal::zero()), Ordinal::one());
        assert_eq!(Ordinal::omega_pow(&ord("2")), ord("w^2"));
        assert_eq!(Ordinal::omega_pow(&ord("e0")), ord("e0"));
    }

    #[test]
    fn compare_cases() {
        assert!(ord("w") < ord("w + 1"));
        assert!(ord("e0") > ord("w^(w^w)"));
        assert!(ord("w^2*2") > ord("w^2 + w*9"));
        assert!(ord("e1") > ord("w^(e0 + 1)"));
        assert!(ord("e0*2") > ord("e0 + w^(w^w)"));
        assert!(ord("e0 + w^(w^(e0 + 1))") > ord("e0*2"));
        assert!(ord("w^(e0 + 1)") > ord("e0*5"));
    }

    #[test]
    fn predicates() {
        assert!(ord("w^2").is_indecomposable().unwrap());
        assert!(!ord("w*2").is_indecomposable().unwrap());
        assert!(ord("1").is_indecomposable().unwrap());
        assert!(Ordinal::zero().is_indecomposable().is_err());
        assert!(ord("e0").is_epsilon());
        assert!(!ord("w^w").is_epsilon());
        assert!(!Ordinal::zero().is_epsilon());
    }

    #[test]
    fn ln_and_last_exponent() {
        assert_eq!(ord("w^3").ln().unwrap(), ord("3"));
        assert_eq!(ord("1").ln().unwrap(), Ordinal::zero());
        assert_eq!(ord("e0").ln().unwrap(), ord("e0"));
        assert!(ord("w*2").ln().is_err());
        assert_eq!(ord("w^3 + w*4").last_exponent().unwrap(), ord("1"));
        assert_eq!(ord("7").last_exponent().unwrap(), Ordinal::zero());
        assert_eq!(ord("w^2").last_exponent().unwrap(), ord("2"));
        assert!(Ordinal::zero().last_exponent().is_err());
    }

    #[test]
    fn natural_sum_cases() {
        assert_eq!(ord("w").natural_sum(&ord("w^2 + 1")), ord("w^2 + w + 1"));
        assert_eq!(ord("w*2").natural_sum(&ord("w*3")), ord("w*5"));
        assert_eq!(ord("w").natural_sum(&Ordinal::zero()), ord("w"));
    }

    #[test]
    fn rank_of_space() {
        assert_eq!(ord("w^2*3 + w").rank_of_ordinal_space(), ord("2"));
        assert_eq!(Ordinal::zero().rank_of_ordinal_space(), Ordinal::zero());
        assert_eq!(ord("e0").rank_of_ordinal_space(), ord("e0"));
        assert_eq!(ord("5").rank_of_ordinal_space(), Ordinal::zero());
    }

    #[test]
    fn left_sub_inverts_add() {
        let a = ord("w*2 + 3");
        let b = ord("w*5");
        let c = a.left_sub(&b).unwrap();
        assert_eq!(a.add(&c), b);
        assert_eq!(ord("w + 1").left_sub(&ord("w^2")).unwrap(), ord("w^2"));
        assert!(ord("w^2").left_sub(&ord("w")).is_none());
    }

    #[test]
    fn printing_and_parsing() {
        for s in ["0", "w^(w^2)*3 + w*2 + 5", "e0", "e1 + 1", "w^w", "w^(e0 + 1)*2 + e0*3", "w^(w + 1)"] {
            assert_eq!(Ordinal::parse(s).unwrap().to_string(), s);
        }
        assert_eq!(Ordinal::parse_normalize("w^(e1) + 1").unwrap().to_string(), "e1 + 1");
        assert!(matches!(Ordinal::parse("w^(e1) + 1"), Err(Error::NonCanonical { .. })));
        assert!(matches!(Ordinal::parse("w + w^2"), Err(Error::NonCanonical { .. })));
        assert!(matches!(Ordinal::parse("w^"), Err(Error::Parse { .. })));
        assert!(matches!(Ordinal::parse("e9"), Err(Error::Parse { .. })));
        assert_eq!(Ordinal::parse_normalize("w^2 + w + w^2").unwrap(), ord("w^2*2"));
    }
}
