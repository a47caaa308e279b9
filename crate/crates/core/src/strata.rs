//! Definable subsets of an ordinal interval `[0, top]`.
//!
//! A set is stored as a sorted list of disjoint segments `[p, q)`, each paired
//! with a set `L` of exponents: the segment contributes
//! `{ ξ ∈ [p, q) : le(ξ) ∈ L }`, where `le(ξ)` is the last exponent of the
//! Cantor normal form and `le(0) = 0`. One segment with an interval `L`
//! is exactly an atom `strata(a, b, lo, hi)`.
//!
//! Everything else follows from one observation. Writing `ξ = p + η` with
//! `0 < η`, we have `le(ξ) = le(η)`, and a limit `ξ` with `le(ξ) = e` is
//! approached from below by points of every last exponent `< e`. So inside a
//! segment the accumulation points are the points with `le > min L`, and the
//! Cantor-Bendixson derivative simply deletes the least element of `L`. The
//! `α`-th derivative deletes the first `α` elements, and the rank of a point
//! `ξ` is the order type of `L ∩ [0, le ξ)` for the `L` seen just below `ξ`.
//! Points only accumulate from below, so the left end of a segment sees the
//! exponent set of the segment before it; for example `ω³` is isolated in
//! `strata(w^3, w^3 + w^2, 1, inf)`.

use crate::error::{Error, Result};
use crate::ordinal::{parse_expr, Ordinal, ParseOptions};
use crate::parse::Cursor;
use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;
use std::fmt;

/// Upper bound of an exponent interval: an ordinal or `∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Bound {
    Fin(Ordinal),
    Inf,
}

impl Bound {
    fn gt(&self, x: &Ordinal) -> bool {
        match self {
            Bound::Fin(b) => x < b,
            Bound::Inf => true,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Fin(o) => write!(f, "{o}"),
            Bound::Inf => write!(f, "inf"),
        }
    }
}

/// A finite union of half-open intervals of exponents, kept sorted and disjoint.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ExpSet {
    ivs: Vec<(Ordinal, Bound)>,
}

impl ExpSet {
    pub fn empty() -> ExpSet {
        ExpSet::default()
    }

    pub fn all() -> ExpSet {
        ExpSet::interval(Ordinal::zero(), Bound::Inf)
    }

    pub fn interval(lo: Ordinal, hi: Bound) -> ExpSet {
        ExpSet::from_raw(vec![(lo, hi)])
    }

    pub fn point(e: &Ordinal) -> ExpSet {
        ExpSet::interval(e.clone(), Bound::Fin(e.succ()))
    }

    fn from_raw(mut v: Vec<(Ordinal, Bound)>) -> ExpSet {
        v.retain(|(lo, hi)| hi.gt(lo));
        v.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Ordinal, Bound)> = Vec::with_capacity(v.len());
        for (lo, hi) in v {
            if let Some(last) = out.last_mut() {
                if last.1.gt(&lo) || Bound::Fin(lo.clone()) == last.1 {
                    // overlapping or adjacent
                    if hi > last.1 {
                        last.1 = hi;
                    }
                    continue;
                }
            }
            out.push((lo, hi));
        }
        ExpSet { ivs: out }
    }

    pub fn intervals(&self) -> &[(Ordinal, Bound)] {
        &self.ivs
    }

    pub fn is_empty(&self) -> bool {
        self.ivs.is_empty()
    }

    pub fn contains(&self, e: &Ordinal) -> bool {
        self.ivs.iter().any(|(lo, hi)| lo <= e && hi.gt(e))
    }

    pub fn min(&self) -> Option<&Ordinal> {
        self.ivs.first().map(|iv| &iv.0)
    }

    pub fn union(&self, other: &ExpSet) -> ExpSet {
        ExpSet::from_raw(self.ivs.iter().chain(&other.ivs).cloned().collect())
    }

    pub fn intersect(&self, other: &ExpSet) -> ExpSet {
        let mut v = Vec::new();
        for (a, b) in &self.ivs {
            for (c, d) in &other.ivs {
                v.push((a.max(c).clone(), b.min(d).clone()));
            }
        }
        ExpSet::from_raw(v)
    }

    fn complement(&self) -> ExpSet {
        let mut v = Vec::new();
        let mut from = Ordinal::zero();
        for (lo, hi) in &self.ivs {
            v.push((from, Bound::Fin(lo.clone())));
            match hi {
                Bound::Fin(h) => from = h.clone(),
                Bound::Inf => return ExpSet::from_raw(v),
            }
        }
        v.push((from, Bound::Inf));
        ExpSet::from_raw(v)
    }

    pub fn difference(&self, other: &ExpSet) -> ExpSet {
        self.intersect(&other.complement())
    }

    /// `self ∩ [0, e)`.
    pub fn below(&self, e: &Ordinal) -> ExpSet {
        self.intersect(&ExpSet::interval(Ordinal::zero(), Bound::Fin(e.clone())))
    }

    /// `self ∩ [e, ∞)`.
    pub fn at_least(&self, e: &Ordinal) -> ExpSet {
        self.intersect(&ExpSet::interval(e.clone(), Bound::Inf))
    }

    /// Order type; `None` when the set is unbounded.
    pub fn order_type(&self) -> Option<Ordinal> {
        let mut total = Ordinal::zero();
        for (lo, hi) in &self.ivs {
            match hi {
                Bound::Fin(h) => total = total.add(&lo.left_sub(h).expect("lo < hi")),
                Bound::Inf => return None,
            }
        }
        Some(total)
    }

    /// Removes the first `alpha` elements.
    pub fn drop_first(&self, alpha: &Ordinal) -> ExpSet {
        let mut alpha = alpha.clone();
        let mut out = Vec::new();
        for (lo, hi) in &self.ivs {
            if alpha.is_zero() {
                out.push((lo.clone(), hi.clone()));
                continue;
            }
            match hi {
                Bound::Fin(h) => {
                    let len = lo.left_sub(h).expect("lo < hi");
                    if alpha >= len {
                        alpha = len.left_sub(&alpha).expect("len <= alpha");
                    } else {
                        out.push((lo.add(&alpha), hi.clone()));
                        alpha = Ordinal::zero();
                    }
                }
                Bound::Inf => {
                    out.push((lo.add(&alpha), Bound::Inf));
                    alpha = Ordinal::zero();
                }
            }
        }
        ExpSet::from_raw(out)
    }

    /// Largest element, or `Err(sup)` when the set is nonempty, bounded and
    /// has no largest element. `None` for empty or unbounded sets.
    fn max_or_sup(&self) -> Option<std::result::Result<Ordinal, Ordinal>> {
        let (_, hi) = self.ivs.last()?;
        let Bound::Fin(h) = hi else { return None };
        match h.split_last_unit() {
            Some((head, e)) if e.is_zero() => Some(Ok(head)),
            _ => Some(Err(h.clone())),
        }
    }
}

impl fmt::Display for ExpSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ivs.is_empty() {
            return write!(f, "{{}}");
        }
        for (i, (lo, hi)) in self.ivs.iter().enumerate() {
            if i > 0 {
                write!(f, " u ")?;
            }
            write!(f, "[{lo},{hi})")?;
        }
        Ok(())
    }
}

/// One atom `{ ξ ∈ [start, end) : lo ≤ le(ξ) < hi }`, with `le(0) = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Atom {
    pub start: Ordinal,
    pub end: Ordinal,
    pub lo: Ordinal,
    pub hi: Bound,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Seg {
    start: Ordinal,
    end: Ordinal,
    exps: ExpSet,
}

/// Greatest exponent reachable strictly inside `(p, q)`: the set of last
/// exponents of points of `(p, q)` is `[0, h]` or `[0, h)`.
fn interior_exps(p: &Ordinal, q: &Ordinal) -> ExpSet {
    let d = p.left_sub(q).expect("p <= q");
    if d.is_zero() {
        return ExpSet::empty();
    }
    let h = d.leading_exponent();
    if d.is_power() {
        ExpSet::interval(Ordinal::zero(), Bound::Fin(h))
    } else {
        ExpSet::interval(Ordinal::zero(), Bound::Fin(h.succ()))
    }
}

/// Order type of `{ η ∈ (0, d) : le(η) ∈ L }`.
fn interior_order_type(d: &Ordinal, l: &ExpSet) -> Ordinal {
    let Some(min) = l.min() else { return Ordinal::zero() };
    let mut total = Ordinal::zero();
    let mut prev: Option<Ordinal> = None;
    for (h, c) in d.cnf() {
        let first = match &prev {
            Some(e) if l.contains(e) => Ordinal::one(),
            _ => Ordinal::zero(),
        };
        let block = if min < &h {
            Ordinal::omega_pow(&min.left_sub(&h).expect("min < h")).mul_nat(&c)
        } else if l.contains(&h) {
            Ordinal::nat(c - BigUint::one())
        } else {
            Ordinal::zero()
        };
        total = total.add(&first).add(&block);
        prev = Some(h);
    }
    total
}

/// Rank of a point, or the supremum of ranks, with attainment flag.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankInfo {
    pub rank: Ordinal,
    /// False when ranks approach `rank` without reaching it.
    pub attained: bool,
}

impl RankInfo {
    fn better(self, other: RankInfo) -> RankInfo {
        match self.rank.cmp(&other.rank) {
            std::cmp::Ordering::Less => other,
            std::cmp::Ordering::Greater => self,
            std::cmp::Ordering::Equal => RankInfo { rank: self.rank, attained: self.attained || other.attained },
        }
    }
}

/// Subset of `[0, top]` built from strata atoms.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StrataSet {
    top: Ordinal,
    segs: Vec<Seg>,
}

impl StrataSet {
    pub fn empty(top: &Ordinal) -> StrataSet {
        StrataSet { top: top.clone(), segs: Vec::new() }
    }

    /// The whole ambient interval `[0, top]`.
    pub fn full(top: &Ordinal) -> StrataSet {
        StrataSet::interval(top, &Ordinal::zero(), top)
    }

    /// Closed interval `[a, b]`, clipped to the ambient interval.
    pub fn interval(top: &Ordinal, a: &Ordinal, b: &Ordinal) -> StrataSet {
        StrataSet::from_atoms(top, [(a.clone(), b.succ(), Ordinal::zero(), Bound::Inf)])
    }

    /// Half-open interval `[a, b)`.
    pub fn half_open(top: &Ordinal, a: &Ordinal, b: &Ordinal) -> StrataSet {
        StrataSet::from_atoms(top, [(a.clone(), b.clone(), Ordinal::zero(), Bound::Inf)])
    }

    /// `{ ξ ∈ [a, b] : ξ > 0, lo ≤ le(ξ) < hi }`.
    pub fn strata(top: &Ordinal, a: &Ordinal, b: &Ordinal, lo: &Ordinal, hi: &Bound) -> StrataSet {
        let a = if a.is_zero() { Ordinal::one() } else { a.clone() };
        StrataSet::from_atoms(top, [(a, b.succ(), lo.clone(), hi.clone())])
    }

    pub fn singleton(top: &Ordinal, x: &Ordinal) -> StrataSet {
        StrataSet::interval(top, x, x)
    }

    pub fn finite(top: &Ordinal, xs: &[Ordinal]) -> StrataSet {
        StrataSet::from_atoms(top, xs.iter().map(|x| (x.clone(), x.succ(), Ordinal::zero(), Bound::Inf)))
    }

    /// Union of half-open atoms `[start, end)` with exponent bounds `[lo, hi)`.
    pub fn from_atoms(top: &Ordinal, atoms: impl IntoIterator<Item = (Ordinal, Ordinal, Ordinal, Bound)>) -> StrataSet {
        let pieces = atoms
            .into_iter()
            .map(|(a, b, lo, hi)| Seg { start: a, end: b, exps: ExpSet::interval(lo, hi) })
            .collect();
        StrataSet::normalize(top, pieces)
    }

    pub fn top(&self) -> &Ordinal {
        &self.top
    }

    /// Normalized atoms, sorted by start; atoms with the same start share a segment.
    pub fn atoms(&self) -> Vec<Atom> {
        self.segs
            .iter()
            .flat_map(|s| {
                s.exps.intervals().iter().map(|(lo, hi)| Atom {
                    start: s.start.clone(),
                    end: s.end.clone(),
                    lo: lo.clone(),
                    hi: hi.clone(),
                })
            })
            .collect()
    }

    /// Builds the canonical segment list from overlapping pieces.
    fn normalize(top: &Ordinal, pieces: Vec<Seg>) -> StrataSet {
        let limit = top.succ();
        let mut cuts: Vec<Ordinal> = vec![Ordinal::zero(), limit.clone()];
        for p in &pieces {
            for x in [&p.start, &p.end] {
                if x < &limit {
                    cuts.push(x.clone());
                }
            }
        }
        cuts.sort();
        cuts.dedup();
        let mut segs: Vec<Seg> = Vec::new();
        for w in cuts.windows(2) {
            let (p, q) = (&w[0], &w[1]);
            let mut exps = ExpSet::empty();
            for piece in &pieces {
                if &piece.start <= p && q <= &piece.end {
                    exps = exps.union(&piece.exps);
                }
            }
            let reach = interior_exps(p, q).union(&ExpSet::point(&p.le()));
            let exps = exps.intersect(&reach);
            if exps.is_empty() {
                continue;
            }
            if let Some(last) = segs.last_mut() {
                if &last.end == p {
                    // Merge when the combined segment denotes the same set.
                    let reach_all = interior_exps(&last.start, q).union(&ExpSet::point(&last.start.le()));
                    let merged = last.exps.union(&exps).intersect(&reach_all);
                    let left = merged.intersect(&interior_exps(&last.start, p).union(&ExpSet::point(&last.start.le())));
                    let right = merged.intersect(&reach);
                    if left == last.exps && right == exps {
                        last.end = q.clone();
                        last.exps = merged;
                        continue;
                    }
                }
            }
            segs.push(Seg { start: p.clone(), end: q.clone(), exps });
        }
        StrataSet { top: top.clone(), segs }
    }

    fn check_ambient(&self, other: &StrataSet) -> Result<()> {
        if self.top == other.top {
            Ok(())
        } else {
            Err(Error::Ambient(format!("[0,{}] vs [0,{}]", self.top, other.top)))
        }
    }

    fn combine(&self, other: &StrataSet, f: impl Fn(&ExpSet, &ExpSet) -> ExpSet) -> StrataSet {
        let limit = self.top.succ();
        let mut cuts: Vec<Ordinal> = vec![Ordinal::zero(), limit];
        for s in self.segs.iter().chain(&other.segs) {
            cuts.push(s.start.clone());
            cuts.push(s.end.clone());
        }
        cuts.sort();
        cuts.dedup();
        let lookup = |set: &StrataSet, p: &Ordinal| -> ExpSet {
            set.segs
                .iter()
                .find(|s| &s.start <= p && p < &s.end)
                .map(|s| s.exps.clone())
                .unwrap_or_default()
        };
        let pieces = cuts
            .windows(2)
            .map(|w| Seg { start: w[0].clone(), end: w[1].clone(), exps: f(&lookup(self, &w[0]), &lookup(other, &w[0])) })
            .collect();
        StrataSet::normalize(&self.top, pieces)
    }

    pub fn union(&self, other: &StrataSet) -> Result<StrataSet> {
        self.check_ambient(other)?;
        Ok(self.combine(other, |a, b| a.union(b)))
    }

    pub fn intersect(&self, other: &StrataSet) -> Result<StrataSet> {
        self.check_ambient(other)?;
        Ok(self.combine(other, |a, b| a.intersect(b)))
    }

    pub fn difference(&self, other: &StrataSet) -> Result<StrataSet> {
        self.check_ambient(other)?;
        Ok(self.combine(other, |a, b| a.difference(b)))
    }

    /// Same operations for callers that already know the ambients agree.
    pub fn u(&self, other: &StrataSet) -> StrataSet {
        self.union(other).expect("same ambient")
    }

    pub fn i(&self, other: &StrataSet) -> StrataSet {
        self.intersect(other).expect("same ambient")
    }

    pub fn d(&self, other: &StrataSet) -> StrataSet {
        self.difference(other).expect("same ambient")
    }

    pub fn complement(&self) -> StrataSet {
        StrataSet::full(&self.top).d(self)
    }

    pub fn is_empty(&self) -> bool {
        self.segs.is_empty()
    }

    pub fn is_subset(&self, other: &StrataSet) -> bool {
        self.d(other).is_empty()
    }

    /// Equality of denoted sets, decided by mutual difference.
    pub fn set_eq(&self, other: &StrataSet) -> bool {
        self.top == other.top && self.is_subset(other) && other.is_subset(self)
    }

    pub fn contains(&self, x: &Ordinal) -> bool {
        self.segs.iter().any(|s| &s.start <= x && x < &s.end && s.exps.contains(&x.le()))
    }

    /// Exponent set governing a left neighbourhood of `x`.
    fn exps_below(&self, x: &Ordinal) -> ExpSet {
        self.segs
            .iter()
            .find(|s| &s.start < x && x <= &s.end)
            .map(|s| s.exps.clone())
            .unwrap_or_default()
    }

    /// Accumulation points in the ambient interval `[0, top]`.
    pub fn acc(&self) -> StrataSet {
        let mut pieces = Vec::new();
        for s in &self.segs {
            let m = s.exps.min().expect("segments are nonempty");
            pieces.push(Seg {
                start: s.start.succ(),
                end: s.end.clone(),
                exps: ExpSet::interval(m.succ(), Bound::Inf),
            });
            if s.end <= self.top && m < &s.end.le() {
                pieces.push(Seg { start: s.end.clone(), end: s.end.succ(), exps: ExpSet::all() });
            }
        }
        StrataSet::normalize(&self.top, pieces)
    }

    pub fn closure(&self) -> StrataSet {
        self.u(&self.acc())
    }

    pub fn is_closed(&self) -> bool {
        self.acc().is_subset(self)
    }

    /// Cantor-Bendixson derivative of the subspace: `s ∩ acc(s)`.
    pub fn derivative(&self) -> StrataSet {
        self.derivative_alpha(&Ordinal::one())
    }

    /// The `alpha`-th iterated derivative, in closed form.
    pub fn derivative_alpha(&self, alpha: &Ordinal) -> StrataSet {
        if alpha.is_zero() {
            return self.clone();
        }
        let mut pieces = Vec::new();
        for s in &self.segs {
            let kept = s.exps.drop_first(alpha);
            if !kept.is_empty() {
                pieces.push(Seg { start: s.start.succ(), end: s.end.clone(), exps: kept });
            }
            if s.exps.contains(&s.start.le()) && &self.start_rank(s) >= alpha {
                pieces.push(Seg { start: s.start.clone(), end: s.start.succ(), exps: ExpSet::all() });
            }
        }
        StrataSet::normalize(&self.top, pieces)
    }

    fn start_rank(&self, s: &Seg) -> Ordinal {
        let le = s.start.le();
        self.exps_below(&s.start).below(&le).order_type().expect("bounded")
    }

    /// Cantor-Bendixson rank of `x` in the subspace.
    pub fn point_rank(&self, x: &Ordinal) -> Result<Ordinal> {
        if !self.contains(x) {
            return Err(Error::domain(format!("{x} is not in the set")));
        }
        let le = x.le();
        Ok(self.exps_below(x).below(&le).order_type().expect("bounded"))
    }

    /// Supremum of the point ranks, and whether it is attained.
    pub fn rank_info(&self) -> Option<RankInfo> {
        let mut best: Option<RankInfo> = None;
        let mut offer = |r: RankInfo| {
            best = Some(match best.take() {
                None => r,
                Some(b) => b.better(r),
            });
        };
        for s in &self.segs {
            if s.exps.contains(&s.start.le()) {
                offer(RankInfo { rank: self.start_rank(s), attained: true });
            }
            let m = s.exps.intersect(&interior_exps(&s.start, &s.end));
            match m.max_or_sup() {
                None => {}
                Some(Ok(e)) => offer(RankInfo { rank: s.exps.below(&e).order_type().expect("bounded"), attained: true }),
                Some(Err(h)) => offer(RankInfo { rank: s.exps.below(&h).order_type().expect("bounded"), attained: false }),
            }
        }
        best
    }

    /// Least `α` with `∂^{α+1} s = ∅`, i.e. the supremum of point ranks.
    pub fn cb_rank(&self) -> Result<Ordinal> {
        self.rank_info().map(|r| r.rank).ok_or_else(|| Error::domain("cb_rank of the empty set"))
    }

    /// The last nonempty derivative, when there is one.
    pub fn top_derivative(&self) -> Option<StrataSet> {
        let info = self.rank_info()?;
        info.attained.then(|| self.derivative_alpha(&info.rank))
    }

    pub fn is_unitary(&self) -> bool {
        self.end_point().is_some()
    }

    /// The unique point of maximal rank, if the set is unitary.
    pub fn end_point(&self) -> Option<Ordinal> {
        let last = self.top_derivative()?;
        if last.order_type() == Ordinal::one() {
            last.min()
        } else {
            None
        }
    }

    pub fn isolated_points(&self) -> StrataSet {
        self.d(&self.derivative())
    }

    pub fn order_type(&self) -> Ordinal {
        self.segs.iter().fold(Ordinal::zero(), |acc, s| {
            let here = if s.exps.contains(&s.start.le()) { Ordinal::one() } else { Ordinal::zero() };
            let d = s.start.left_sub(&s.end).expect("start < end");
            acc.add(&here).add(&interior_order_type(&d, &s.exps))
        })
    }

    pub fn min(&self) -> Option<Ordinal> {
        let s = self.segs.first()?;
        if s.exps.contains(&s.start.le()) {
            Some(s.start.clone())
        } else {
            Some(s.start.add(&Ordinal::omega_pow(s.exps.min().expect("nonempty"))))
        }
    }

    /// Largest element, or `Err(sup)` if the set has no largest element.
    pub fn max_or_sup(&self) -> Option<std::result::Result<Ordinal, Ordinal>> {
        let s = self.segs.last()?;
        let min = s.exps.min().expect("nonempty").clone();
        let mut d = s.start.left_sub(&s.end).expect("start < end");
        loop {
            let Some((head, h, c)) = d.split_last_term() else {
                return Some(Ok(s.start.clone()));
            };
            if min < h {
                return Some(Err(s.start.add(&d)));
            }
            if c > BigUint::one() && s.exps.contains(&h) {
                let top = Ordinal::omega_pow(&h).mul_nat(&(c - BigUint::one()));
                return Some(Ok(s.start.add(&head).add(&top)));
            }
            let cand = s.start.add(&head);
            if s.exps.contains(&cand.le()) {
                return Some(Ok(cand));
            }
            d = head;
        }
    }

    pub fn max(&self) -> Option<Ordinal> {
        self.max_or_sup().and_then(|r| r.ok())
    }

    /// Supremum of the elements (0 for the empty set).
    pub fn sup(&self) -> Ordinal {
        match self.max_or_sup() {
            None => Ordinal::zero(),
            Some(Ok(x)) | Some(Err(x)) => x,
        }
    }

    /// Translates the set by `c` on the left, `ξ ↦ c + ξ`, into `[0, new_top]`.
    /// Requires `c` to be 0 or a successor so that `le` is preserved at 0.
    pub fn shift(&self, c: &Ordinal, new_top: &Ordinal) -> StrataSet {
        assert!(c.is_zero() || c.is_successor(), "shift by a limit ordinal changes le(0)");
        let pieces = self
            .segs
            .iter()
            .map(|s| Seg { start: c.add(&s.start), end: c.add(&s.end), exps: s.exps.clone() })
            .collect();
        StrataSet::normalize(new_top, pieces)
    }

    /// Same set, viewed in a different ambient interval (clipped if smaller).
    pub fn with_top(&self, new_top: &Ordinal) -> StrataSet {
        StrataSet::normalize(new_top, self.segs.clone())
    }

    /// Elements strictly below `x`.
    pub fn below(&self, x: &Ordinal) -> StrataSet {
        self.i(&StrataSet::half_open(&self.top, &Ordinal::zero(), x))
    }

    /// Elements strictly above `x`.
    pub fn above(&self, x: &Ordinal) -> StrataSet {
        self.d(&StrataSet::interval(&self.top, &Ordinal::zero(), x))
    }

    /// Points of the set as an explicit list, when it is finite.
    pub fn finite_points(&self) -> Option<Vec<Ordinal>> {
        let n = self.order_type().as_u64()?;
        let mut out = Vec::with_capacity(n as usize);
        let mut rest = self.clone();
        while let Some(x) = rest.min() {
            rest = rest.d(&StrataSet::singleton(&self.top, &x));
            out.push(x);
        }
        Some(out)
    }

    /// Parses the set grammar: `[a,b]`, `[a,b)`, `strata(a,b,lo,hi)`,
    /// `{x, ...}`, combined with `|`, `&`, `\` and parentheses. The ambient is
    /// `[0, top]`, defaulting to the largest ordinal mentioned.
    pub fn parse(src: &str, top: Option<&Ordinal>, opts: &ParseOptions) -> Result<StrataSet> {
        let mut cur = Cursor::new(src);
        let set = parse_set_at(&mut cur, top, opts)?;
        cur.expect_end()?;
        Ok(set)
    }
}

impl fmt::Display for StrataSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.segs.is_empty() {
            return write!(f, "{{}}");
        }
        let mut first = true;
        let mut sep = |f: &mut fmt::Formatter<'_>| -> fmt::Result {
            if !first {
                write!(f, " | ")?;
            }
            first = false;
            Ok(())
        };
        for a in self.atoms() {
            sep(f)?;
            let closed = a.end.split_last_unit().filter(|(_, e)| e.is_zero()).map(|(h, _)| h);
            let full = a.lo.is_zero() && a.hi == Bound::Inf;
            if full {
                match &closed {
                    Some(b) if *b == a.start => write!(f, "{{{}}}", a.start)?,
                    Some(b) => write!(f, "[{},{}]", a.start, b)?,
                    None => write!(f, "[{},{})", a.start, a.end)?,
                }
                continue;
            }
            if a.start.is_zero() && a.lo.is_zero() {
                write!(f, "{{0}} | ")?;
            }
            match &closed {
                Some(b) => write!(f, "strata({},{},{},{})", a.start, b, a.lo, a.hi)?,
                None => write!(f, "([{},{}) & strata({},{},{},{}))", a.start, a.end, a.start, a.end, a.lo, a.hi)?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for StrataSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StrataSet[0,{}]({})", self.top, self)
    }
}

impl Serialize for StrataSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

enum SetExpr {
    Interval(Ordinal, Ordinal, bool),
    Strata(Ordinal, Ordinal, Ordinal, Bound),
    Finite(Vec<Ordinal>),
    Bin(char, Box<SetExpr>, Box<SetExpr>),
}

impl SetExpr {
    fn max_mentioned(&self) -> Ordinal {
        match self {
            SetExpr::Interval(_, b, _) | SetExpr::Strata(_, b, _, _) => b.clone(),
            SetExpr::Finite(xs) => xs.iter().max().cloned().unwrap_or_default(),
            SetExpr::Bin(_, l, r) => l.max_mentioned().max(r.max_mentioned()),
        }
    }

    fn eval(&self, top: &Ordinal) -> StrataSet {
        match self {
            SetExpr::Interval(a, b, true) => StrataSet::interval(top, a, b),
            SetExpr::Interval(a, b, false) => StrataSet::half_open(top, a, b),
            SetExpr::Strata(a, b, lo, hi) => StrataSet::strata(top, a, b, lo, hi),
            SetExpr::Finite(xs) => StrataSet::finite(top, xs),
            SetExpr::Bin(op, l, r) => {
                let (l, r) = (l.eval(top), r.eval(top));
                match op {
                    '|' => l.u(&r),
                    '&' => l.i(&r),
                    _ => l.d(&r),
                }
            }
        }
    }
}

/// Parses a set expression embedded in a larger grammar.
pub(crate) fn parse_set_at(cur: &mut Cursor<'_>, top: Option<&Ordinal>, opts: &ParseOptions) -> Result<StrataSet> {
    let expr = parse_set_expr(cur, opts)?;
    let top = match top {
        Some(t) => t.clone(),
        None => expr.max_mentioned(),
    };
    Ok(expr.eval(&top))
}

fn parse_set_expr(cur: &mut Cursor<'_>, opts: &ParseOptions) -> Result<SetExpr> {
    let mut lhs = parse_set_diff(cur, opts)?;
    while cur.eat('|') {
        let rhs = parse_set_diff(cur, opts)?;
        lhs = SetExpr::Bin('|', Box::new(lhs), Box::new(rhs));
    }
    Ok(lhs)
}

fn parse_set_diff(cur: &mut Cursor<'_>, opts: &ParseOptions) -> Result<SetExpr> {
    let mut lhs = parse_set_inter(cur, opts)?;
    while cur.eat('\\') {
        let rhs = parse_set_inter(cur, opts)?;
        lhs = SetExpr::Bin('\\', Box::new(lhs), Box::new(rhs));
    }
    Ok(lhs)
}

fn parse_set_inter(cur: &mut Cursor<'_>, opts: &ParseOptions) -> Result<SetExpr> {
    let mut lhs = parse_set_primary(cur, opts)?;
    while cur.eat('&') {
        let rhs = parse_set_primary(cur, opts)?;
        lhs = SetExpr::Bin('&', Box::new(lhs), Box::new(rhs));
    }
    Ok(lhs)
}

fn parse_set_primary(cur: &mut Cursor<'_>, opts: &ParseOptions) -> Result<SetExpr> {
    match cur.peek() {
        Some('[') => {
            cur.bump();
            let a = parse_expr(cur, opts)?;
            cur.expect(',')?;
            let b = parse_expr(cur, opts)?;
            let closed = if cur.eat(']') {
                true
            } else if cur.eat(')') {
                false
            } else {
                return Err(cur.error("expected `]` or `)`"));
            };
            if b < a {
                return Err(cur.error(format!("empty interval: {b} < {a}")));
            }
            Ok(SetExpr::Interval(a, b, closed))
        }
        Some('{') => {
            cur.bump();
            let mut xs = Vec::new();
            if !cur.eat('}') {
                loop {
                    xs.push(parse_expr(cur, opts)?);
                    if cur.eat('}') {
                        break;
                    }
                    cur.expect(',')?;
                }
            }
            Ok(SetExpr::Finite(xs))
        }
        Some('(') => {
            cur.bump();
            let e = parse_set_expr(cur, opts)?;
            cur.expect(')')?;
            Ok(e)
        }
        Some('s') => {
            let start = cur.pos();
            if cur.ident() != Some("strata") {
                cur.reset(start);
                return Err(cur.error("expected `strata(`"));
            }
            cur.expect('(')?;
            let a = parse_expr(cur, opts)?;
            cur.expect(',')?;
            let b = parse_expr(cur, opts)?;
            cur.expect(',')?;
            let lo = parse_expr(cur, opts)?;
            cur.expect(',')?;
            let hi = if cur.eat_str("inf") || cur.eat('∞') { Bound::Inf } else { Bound::Fin(parse_expr(cur, opts)?) };
            cur.expect(')')?;
            Ok(SetExpr::Strata(a, b, lo, hi))
        }
        _ => Err(cur.error("expected a set: `[a,b]`, `strata(...)`, `{...}` or `(`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::ord;

    fn set(src: &str, top: &str) -> StrataSet {
        StrataSet::parse(src, Some(&ord(top)), &ParseOptions { normalize: true, ..Default::default() }).unwrap()
    }

    #[test]
    fn limits_in_omega_plus_one() {
        let s = set("[0,w] & strata(0,w,1,inf)", "w");
        assert!(s.set_eq(&set("{w}", "w")));
    }

    #[test]
    fn acc_examples() {
        assert!(set("[0,w]", "w").acc().set_eq(&set("{w}", "w")));
        assert!(set("strata(0,w^2,1,inf)", "w^2").acc().set_eq(&set("{w^2}", "w^2")));
        assert!(set("{1,5,w+3}", "w^2").acc().is_empty());
        // successors below w^2 accumulate at every limit up to w^2
        assert!(set("strata(0,w^2,0,1)", "w^2").acc().set_eq(&set("strata(0,w^2,1,inf)", "w^2")));
    }

    #[test]
    fn derivative_examples() {
        assert!(set("[0,w]", "w").derivative().set_eq(&set("{w}", "w")));
        assert!(set("[w+1,w*2]", "w*2").derivative().set_eq(&set("{w*2}", "w*2")));
        assert!(set("{w}", "w").derivative().is_empty());
        assert!(set("[0,w^w]", "w^w").derivative_alpha(&ord("w")).set_eq(&set("{w^w}", "w^w")));
        assert!(set("[0,w^2]", "w^2").derivative_alpha(&ord("2")).set_eq(&set("{w^2}", "w^2")));
        let s = set("strata(w^3, w^3 + w^2, 1, inf)", "w^3 + w^2");
        assert!(!s.derivative().contains(&ord("w^3")));
        assert!(s.derivative().contains(&ord("w^3 + w^2")));
    }

    #[test]
    fn point_ranks() {
        let s = set("[0,w^2]", "w^2");
        assert_eq!(s.point_rank(&ord("w*5")).unwrap(), ord("1"));
        assert_eq!(s.point_rank(&ord("3")).unwrap(), ord("0"));
        assert_eq!(s.point_rank(&ord("w^2")).unwrap(), ord("2"));
        assert!(s.point_rank(&ord("w^2 + 1")).is_err());
    }

    #[test]
    fn cb_rank_and_unitary() {
        let s = set("[0,w^2*3 + w]", "w^2*3 + w");
        assert_eq!(s.cb_rank().unwrap(), ord("2"));
        assert!(!s.is_unitary());
        assert_eq!(s.top_derivative().unwrap().order_type(), ord("3"));
        let s = set("[0,w^w]", "w^w");
        assert_eq!(s.cb_rank().unwrap(), ord("w"));
        assert_eq!(s.end_point(), Some(ord("w^w")));
        let s = set("{w+2}", "w*2");
        assert_eq!(s.cb_rank().unwrap(), Ordinal::zero());
        assert!(s.is_unitary());
        assert!(StrataSet::empty(&ord("w")).cb_rank().is_err());
    }

    #[test]
    fn order_types() {
        assert_eq!(set("strata(0,w^2,1,inf)", "w^2").order_type(), ord("w + 1"));
        assert_eq!(set("[w+3,w+3]", "w*2").order_type(), ord("1"));
        assert_eq!(set("[0,w*2]", "w*2").order_type(), ord("w*2 + 1"));
        assert_eq!(set("[0,w^2) & strata(0,w^2,0,1)", "w^2").order_type(), ord("w^2"));
    }

    #[test]
    fn max_and_sup() {
        assert_eq!(set("[0,w)", "w").max_or_sup(), Some(Err(ord("w"))));
        assert_eq!(set("strata(0,w^2,1,2)", "w^2").max_or_sup(), Some(Err(ord("w^2"))));
        assert_eq!(set("strata(0,w^2*3 + 5,1,inf)", "w^3").max(), Some(ord("w^2*3")));
        assert_eq!(set("strata(0,w^2*3 + 5,1,2)", "w^3").max_or_sup(), Some(Err(ord("w^2*3"))));
        assert_eq!(set("{3, w+1}", "w*2").max(), Some(ord("w + 1")));
    }

    #[test]
    fn display_round_trips() {
        for (src, top) in [
            ("[0,w^2]", "w^2"),
            ("strata(0,w^2,1,inf)", "w^2"),
            ("{0} | strata(1,w^3,0,2)", "w^3"),
            ("[w,w^2) & strata(w,w^2,1,2)", "w^2"),
            ("{3, w+1}", "w*2"),
        ] {
            let s = set(src, top);
            let back = set(&s.to_string(), top);
            assert!(s.set_eq(&back), "{src} -> {s}");
        }
    }

    #[test]
    fn ambient_mismatch() {
        assert!(set("[0,w]", "w").union(&set("[0,w]", "w*2")).is_err());
    }
}
