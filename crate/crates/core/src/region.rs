//! Subsets of a product `[0, Λ₁] × [0, Λ₂]` of two ordinal intervals.
//!
//! A region is a finite union of pieces `{ (x, y) ∈ S × T : x ρ y }` where
//! `S`, `T` are strata sets and `ρ` is a union of the relations `<`, `=`, `>`.
//! Boxes use all three, triangles use `≤`.
//!
//! The derivative is computed piece by piece. Away from the diagonal a piece
//! is locally a product, so `acc(S×T) = acc S × cl T ∪ cl S × acc T`. On the
//! diagonal the relation matters: a point `(ξ, ξ)` is a limit of points
//! `x < y` of `S × T` exactly when `ξ ∈ acc S ∩ cl T`, since `x` has to
//! approach strictly from below. Transfinite derivatives are never guessed:
//! iteration is exact but bounded, and anything beyond the bound is reported
//! as unknown.

use crate::error::{Error, Result};
use crate::ordinal::{Ordinal, ParseOptions};
use crate::strata::StrataSet;
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;

/// Default cap on derivative iterations.
pub const DEFAULT_BOUND: usize = 32;

/// A union of the relations `x < y`, `x = y`, `x > y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rel(u8);

impl Rel {
    pub const LT: Rel = Rel(1);
    pub const EQ: Rel = Rel(2);
    pub const GT: Rel = Rel(4);
    pub const LE: Rel = Rel(3);
    pub const GE: Rel = Rel(6);
    pub const NE: Rel = Rel(5);
    pub const ALL: Rel = Rel(7);
    pub const NONE: Rel = Rel(0);

    pub fn has(self, r: Rel) -> bool {
        self.0 & r.0 == r.0
    }

    pub fn and(self, r: Rel) -> Rel {
        Rel(self.0 & r.0)
    }

    pub fn or(self, r: Rel) -> Rel {
        Rel(self.0 | r.0)
    }

    pub fn not(self) -> Rel {
        Rel(!self.0 & 7)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// The same relation with the coordinates swapped.
    pub fn flip(self) -> Rel {
        Rel((self.0 & 2) | ((self.0 & 1) << 2) | ((self.0 & 4) >> 2))
    }

    pub fn holds(self, x: &Ordinal, y: &Ordinal) -> bool {
        let bit = match x.cmp(y) {
            std::cmp::Ordering::Less => Rel::LT,
            std::cmp::Ordering::Equal => Rel::EQ,
            std::cmp::Ordering::Greater => Rel::GT,
        };
        self.has(bit)
    }

    fn singles(self) -> impl Iterator<Item = Rel> {
        [Rel::LT, Rel::EQ, Rel::GT].into_iter().filter(move |r| self.has(*r))
    }

    pub fn name(self) -> &'static str {
        match self.0 {
            0 => "none",
            1 => "lt",
            2 => "eq",
            3 => "le",
            4 => "gt",
            5 => "ne",
            6 => "ge",
            _ => "all",
        }
    }

    pub fn from_name(s: &str) -> Option<Rel> {
        Some(match s {
            "lt" => Rel::LT,
            "eq" => Rel::EQ,
            "le" => Rel::LE,
            "gt" => Rel::GT,
            "ne" => Rel::NE,
            "ge" => Rel::GE,
            "all" => Rel::ALL,
            _ => return None,
        })
    }
}

/// `{ (x, y) : x ∈ s, y ∈ t, x rel y }`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Piece {
    pub s: StrataSet,
    pub t: StrataSet,
    pub rel: Rel,
}

/// Common ambient for comparing an x-set with a y-set.
fn on_common(a: &StrataSet, b: &StrataSet) -> (StrataSet, StrataSet) {
    let top = a.top().max(b.top()).clone();
    (a.with_top(&top), b.with_top(&top))
}

fn meet_sides(a: &StrataSet, b: &StrataSet) -> StrataSet {
    let (a2, b2) = on_common(a, b);
    a2.i(&b2)
}

impl Piece {
    pub fn new(s: StrataSet, t: StrataSet, rel: Rel) -> Piece {
        Piece { s, t, rel }
    }

    fn single_nonempty(&self, r: Rel) -> bool {
        if self.s.is_empty() || self.t.is_empty() {
            return false;
        }
        match r {
            Rel::LT => {
                let m = self.s.min().expect("nonempty");
                self.t.contains_above(&m)
            }
            Rel::GT => {
                let m = self.t.min().expect("nonempty");
                self.s.contains_above(&m)
            }
            _ => !meet_sides(&self.s, &self.t).is_empty(),
        }
    }

    pub fn is_empty(&self) -> bool {
        !self.rel.singles().any(|r| self.single_nonempty(r))
    }

    pub fn contains(&self, x: &Ordinal, y: &Ordinal) -> bool {
        self.rel.holds(x, y) && self.s.contains(x) && self.t.contains(y)
    }

    /// Drops relations that contribute nothing and widens to `all` when the
    /// missing relations would contribute nothing either.
    fn tidy(mut self) -> Option<Piece> {
        let live: Vec<Rel> = Rel::ALL.singles().filter(|r| self.single_nonempty(*r)).collect();
        let rel_live = live.iter().fold(Rel::NONE, |a, r| a.or(*r));
        let kept = self.rel.and(rel_live);
        if kept.is_empty() {
            return None;
        }
        self.rel = if kept == rel_live { Rel::ALL } else { kept };
        Some(self)
    }

    fn intersect(&self, o: &Piece) -> Piece {
        Piece { s: self.s.i(&o.s), t: self.t.i(&o.t), rel: self.rel.and(o.rel) }
    }

    /// Disjoint pieces covering `self \ o`.
    fn minus(&self, o: &Piece) -> Vec<Piece> {
        let s_in = self.s.i(&o.s);
        let t_in = self.t.i(&o.t);
        vec![
            Piece { s: self.s.d(&o.s), t: self.t.clone(), rel: self.rel },
            Piece { s: s_in.clone(), t: self.t.d(&o.t), rel: self.rel },
            Piece { s: s_in, t: t_in, rel: self.rel.and(o.rel.not()) },
        ]
    }

    fn transpose(&self) -> Piece {
        Piece { s: self.t.clone(), t: self.s.clone(), rel: self.rel.flip() }
    }

    /// Accumulation points of the piece in the ambient product.
    fn acc(&self) -> Vec<Piece> {
        let (cs, ct) = (self.s.closure(), self.t.closure());
        let (as_, at) = (self.s.acc(), self.t.acc());
        if self.rel == Rel::ALL {
            return vec![Piece::new(as_, ct, Rel::ALL), Piece::new(cs, at, Rel::ALL)];
        }
        let mut out = Vec::new();
        if self.rel.has(Rel::LT) {
            out.push(Piece::new(as_.clone(), ct.clone(), Rel::LT));
            out.push(Piece::new(cs.clone(), at.clone(), Rel::LT));
            out.push(Piece::new(as_.clone(), ct.clone(), Rel::EQ));
        }
        if self.rel.has(Rel::GT) {
            out.push(Piece::new(cs.clone(), at.clone(), Rel::GT));
            out.push(Piece::new(as_.clone(), ct.clone(), Rel::GT));
            out.push(Piece::new(cs.clone(), at.clone(), Rel::EQ));
        }
        if self.rel.has(Rel::EQ) {
            let d = meet_sides(&self.s, &self.t).acc();
            out.push(Piece::new(d.with_top(self.s.top()), d.with_top(self.t.top()), Rel::EQ));
        }
        out
    }

    fn is_closed_box(&self) -> bool {
        self.rel == Rel::ALL && self.s.is_closed() && self.t.is_closed()
    }
}

trait ContainsAbove {
    fn contains_above(&self, m: &Ordinal) -> bool;
}

impl ContainsAbove for StrataSet {
    fn contains_above(&self, m: &Ordinal) -> bool {
        m < self.top() && !self.above(m).is_empty()
    }
}

/// A finite union of pieces inside `[0, Λ₁] × [0, Λ₂]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Region {
    ambient: (Ordinal, Ordinal),
    pieces: Vec<Piece>,
}

/// Result of bounded rank iteration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CbOutcome {
    Empty,
    /// `∂^{n+1} r = ∅` and `∂^n r ≠ ∅`.
    Rank(usize),
    /// The bound was reached; `residue` is the last derivative computed.
    Unknown { residue: Region },
}

/// Rank of a point, or an explicit unknown.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum PointRank {
    Known(Ordinal),
    Unknown,
}

impl Region {
    pub fn empty(a: &Ordinal, b: &Ordinal) -> Region {
        Region { ambient: (a.clone(), b.clone()), pieces: Vec::new() }
    }

    pub fn ambient(&self) -> (&Ordinal, &Ordinal) {
        (&self.ambient.0, &self.ambient.1)
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Builds a region, re-homing each side to the ambient intervals.
    pub fn from_pieces(a: &Ordinal, b: &Ordinal, pieces: impl IntoIterator<Item = Piece>) -> Region {
        let pieces = pieces
            .into_iter()
            .map(|p| Piece { s: p.s.with_top(a), t: p.t.with_top(b), rel: p.rel })
            .collect();
        Region { ambient: (a.clone(), b.clone()), pieces }.simplify()
    }

    pub fn product(s: &StrataSet, t: &StrataSet) -> Region {
        Region::from_pieces(s.top(), t.top(), [Piece::new(s.clone(), t.clone(), Rel::ALL)])
    }

    /// `(s × t) ∩ { x ≤ y }`.
    pub fn triangle(s: &StrataSet, t: &StrataSet) -> Region {
        Region::from_pieces(s.top(), t.top(), [Piece::new(s.clone(), t.clone(), Rel::LE)])
    }

    /// `[0, a] × [0, b]`.
    pub fn full_box(a: &Ordinal, b: &Ordinal) -> Region {
        Region::product(&StrataSet::full(a), &StrataSet::full(b))
    }

    pub fn points(a: &Ordinal, b: &Ordinal, pts: &[(Ordinal, Ordinal)]) -> Region {
        Region::from_pieces(
            a,
            b,
            pts.iter().map(|(x, y)| Piece::new(StrataSet::singleton(a, x), StrataSet::singleton(b, y), Rel::ALL)),
        )
    }

    fn check_ambient(&self, o: &Region) -> Result<()> {
        if self.ambient == o.ambient {
            Ok(())
        } else {
            Err(Error::Ambient(format!(
                "[0,{}]x[0,{}] vs [0,{}]x[0,{}]",
                self.ambient.0, self.ambient.1, o.ambient.0, o.ambient.1
            )))
        }
    }

    fn with_pieces(&self, pieces: Vec<Piece>) -> Region {
        Region { ambient: self.ambient.clone(), pieces }.simplify()
    }

    /// Drops empty pieces, pieces covered by another piece, and merges pieces
    /// sharing a side and a relation.
    fn simplify(self) -> Region {
        let mut ps: Vec<Piece> = self.pieces.into_iter().filter_map(Piece::tidy).collect();
        let mut dedup = BTreeSet::new();
        ps.retain(|p| dedup.insert(format!("{}|{}|{}", p.s, p.t, p.rel.name())));
        loop {
            let mut changed = false;
            'outer: for i in 0..ps.len() {
                for j in 0..ps.len() {
                    if i == j {
                        continue;
                    }
                    let (a, b) = (&ps[i], &ps[j]);
                    let merged = if a.rel == b.rel && a.t.set_eq(&b.t) {
                        Some(Piece::new(a.s.u(&b.s), a.t.clone(), a.rel))
                    } else if a.rel == b.rel && a.s.set_eq(&b.s) {
                        Some(Piece::new(a.s.clone(), a.t.u(&b.t), a.rel))
                    } else if a.minus(b).iter().all(Piece::is_empty) {
                        Some(b.clone())
                    } else {
                        None
                    };
                    if let Some(m) = merged {
                        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
                        ps.remove(hi);
                        ps.remove(lo);
                        ps.push(m);
                        changed = true;
                        break 'outer;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        Region { ambient: self.ambient, pieces: ps }
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn contains(&self, x: &Ordinal, y: &Ordinal) -> bool {
        self.pieces.iter().any(|p| p.contains(x, y))
    }

    pub fn union(&self, o: &Region) -> Result<Region> {
        self.check_ambient(o)?;
        Ok(self.with_pieces(self.pieces.iter().chain(&o.pieces).cloned().collect()))
    }

    pub fn intersect(&self, o: &Region) -> Result<Region> {
        self.check_ambient(o)?;
        let mut v = Vec::new();
        for p in &self.pieces {
            for q in &o.pieces {
                v.push(p.intersect(q));
            }
        }
        Ok(self.with_pieces(v))
    }

    pub fn difference(&self, o: &Region) -> Result<Region> {
        self.check_ambient(o)?;
        let mut cur: Vec<Piece> = self.pieces.clone();
        for q in &o.pieces {
            cur = cur.iter().flat_map(|p| p.minus(q)).filter(|p| !p.is_empty()).collect();
        }
        Ok(self.with_pieces(cur))
    }

    pub fn is_subset(&self, o: &Region) -> bool {
        self.difference(o).map(|d| d.is_empty()).unwrap_or(false)
    }

    /// Equality of denoted sets by mutual difference.
    pub fn set_eq(&self, o: &Region) -> bool {
        self.is_subset(o) && o.is_subset(self)
    }

    pub fn transpose(&self) -> Region {
        Region {
            ambient: (self.ambient.1.clone(), self.ambient.0.clone()),
            pieces: self.pieces.iter().map(Piece::transpose).collect(),
        }
    }

    /// Accumulation points in the ambient product.
    pub fn acc(&self) -> Region {
        self.with_pieces(self.pieces.iter().flat_map(Piece::acc).collect())
    }

    pub fn closure(&self) -> Region {
        self.union(&self.acc()).expect("same ambient")
    }

    /// Cantor-Bendixson derivative `r ∩ acc(r)`.
    pub fn derivative(&self) -> Region {
        let acc: Vec<Piece> = self.pieces.iter().flat_map(Piece::acc).collect();
        let mut v = Vec::new();
        for p in &self.pieces {
            for q in &acc {
                v.push(p.intersect(q));
            }
        }
        self.with_pieces(v)
    }

    /// `[r, ∂r, ∂²r, ...]`, stopping after the first empty derivative or
    /// after `bound` steps.
    pub fn derivatives(&self, bound: usize) -> Vec<Region> {
        let mut out = vec![self.clone()];
        while out.len() <= bound {
            let last = out.last().expect("nonempty");
            if last.is_empty() {
                break;
            }
            out.push(last.derivative());
        }
        out
    }

    pub fn cb_rank_finite(&self, bound: usize) -> CbOutcome {
        if self.is_empty() {
            return CbOutcome::Empty;
        }
        let ds = self.derivatives(bound + 1);
        match ds.iter().position(Region::is_empty) {
            Some(n) => CbOutcome::Rank(n - 1),
            None => CbOutcome::Unknown { residue: ds.last().expect("nonempty").clone() },
        }
    }

    /// Rank of `(x, y)`: exact iteration up to `bound`, then the closed-box
    /// rule (all pieces closed boxes: maximum over pieces of the natural sum
    /// of the 1-D ranks), otherwise unknown.
    pub fn point_rank(&self, x: &Ordinal, y: &Ordinal, bound: usize) -> Result<PointRank> {
        if !self.contains(x, y) {
            return Err(Error::domain(format!("({x}, {y}) is not in the region")));
        }
        let mut cur = self.clone();
        for n in 0..bound {
            let next = cur.derivative();
            if !next.contains(x, y) {
                return Ok(PointRank::Known(Ordinal::nat(n as u64)));
            }
            cur = next;
        }
        Ok(self.closed_box_rank(x, y).map(PointRank::Known).unwrap_or(PointRank::Unknown))
    }

    /// Point rank for unions of closed boxes, where the derivative of the
    /// union is the union of the derivatives and product ranks add naturally.
    pub fn closed_box_rank(&self, x: &Ordinal, y: &Ordinal) -> Option<Ordinal> {
        if !self.pieces.iter().all(Piece::is_closed_box) {
            return None;
        }
        self.pieces
            .iter()
            .filter(|p| p.contains(x, y))
            .map(|p| p.s.point_rank(x).expect("member").natural_sum(&p.t.point_rank(y).expect("member")))
            .max()
    }

    /// `{ x : (x, y) ∈ r }`.
    pub fn row(&self, y: &Ordinal) -> StrataSet {
        let a = &self.ambient.0;
        let mut out = StrataSet::empty(a);
        for p in &self.pieces {
            if !p.t.contains(y) {
                continue;
            }
            if p.rel.has(Rel::LT) {
                out = out.u(&p.s.below(y));
            }
            if p.rel.has(Rel::EQ) && p.s.contains(y) {
                out = out.u(&StrataSet::singleton(a, y));
            }
            if p.rel.has(Rel::GT) {
                out = out.u(&p.s.above(y));
            }
        }
        out
    }

    /// `{ y : (x, y) ∈ r }`.
    pub fn column(&self, x: &Ordinal) -> StrataSet {
        self.transpose().row(x)
    }

    /// `{ x : ∃ y, (x, y) ∈ r }`.
    pub fn project_x(&self) -> StrataSet {
        let a = &self.ambient.0;
        let mut out = StrataSet::empty(a);
        for p in &self.pieces {
            let Some(min_t) = p.t.min() else { continue };
            if p.rel.has(Rel::LT) {
                out = out.u(&p.s.below(&p.t.sup()));
            }
            if p.rel.has(Rel::EQ) {
                out = out.u(&meet_sides(&p.s, &p.t).with_top(a));
            }
            if p.rel.has(Rel::GT) {
                out = out.u(&p.s.above(&min_t));
            }
        }
        out
    }

    /// `{ y : ∃ x, (x, y) ∈ r }`.
    pub fn project_y(&self) -> StrataSet {
        self.transpose().project_x()
    }

    /// `r ∩ (s × t)`.
    pub fn restrict(&self, s: &StrataSet, t: &StrataSet) -> Region {
        self.intersect(&Region::product(&s.with_top(&self.ambient.0), &t.with_top(&self.ambient.1))).expect("same ambient")
    }

    pub fn is_closed(&self) -> bool {
        self.acc().is_subset(self)
    }

    /// True when every side of every piece is a finite set.
    pub fn is_finite(&self) -> bool {
        self.pieces.iter().all(|p| p.s.order_type().is_finite() && p.t.order_type().is_finite())
    }

    /// All points, for finite regions.
    pub fn finite_points(&self) -> Option<Vec<(Ordinal, Ordinal)>> {
        let mut out = BTreeSet::new();
        for p in &self.pieces {
            let (xs, ys) = (p.s.finite_points()?, p.t.finite_points()?);
            for x in &xs {
                for y in &ys {
                    if p.rel.holds(x, y) {
                        out.insert((x.clone(), y.clone()));
                    }
                }
            }
        }
        Some(out.into_iter().collect())
    }

    /// Smallest meet- and join-closed set containing `pts`, as singleton pieces.
    pub fn lattice_closure(pts: &[(Ordinal, Ordinal)]) -> Region {
        let closed = lattice_closure_points(pts);
        let a = closed.iter().map(|p| p.0.clone()).max().unwrap_or_default();
        let b = closed.iter().map(|p| p.1.clone()).max().unwrap_or_default();
        Region::points(&a, &b, &closed)
    }

    /// Whether the region is closed under coordinatewise min and max.
    ///
    /// A pair of points whose meet is new must cross: `x₁ < x₂` and
    /// `y₁ > y₂`. Their meet `(x₁, y₂)` has a point of the region straight
    /// above it and one straight to its right, so the region is meet-closed
    /// iff `Up(r) ∩ Right(r) ⊆ r`, and dually for joins. The images are
    /// computed piecewise; shapes whose image is not a finite union of
    /// pieces are reported as unsupported.
    pub fn is_sublattice(&self) -> Result<bool> {
        if let Some(pts) = self.finite_points() {
            return Ok(lattice_closure_points(&pts).len() == pts.len());
        }
        let up = self.up()?;
        let right = self.transpose().up()?.transpose();
        if !up.intersect(&right)?.is_subset(self) {
            return Ok(false);
        }
        let down = self.down()?;
        let left = self.transpose().down()?.transpose();
        Ok(down.intersect(&left)?.is_subset(self))
    }

    /// `{ (x, y) : ∃ y' > y, (x, y') ∈ r }`.
    fn up(&self) -> Result<Region> {
        let (a, b) = (&self.ambient.0, &self.ambient.1);
        let full_b = StrataSet::full(b);
        let mut out = Vec::new();
        for p in &self.pieces {
            let below_sup = StrataSet::half_open(b, &Ordinal::zero(), &p.t.sup());
            if p.rel.has(Rel::LT) {
                let xs = if p.rel == Rel::ALL { p.s.clone() } else { p.s.below(&p.t.sup().min(a.succ())) };
                out.push(Piece::new(xs, below_sup.clone(), Rel::ALL));
            }
            if p.rel.has(Rel::EQ) {
                out.push(Piece::new(meet_sides(&p.s, &p.t).with_top(a), full_b.clone(), Rel::GT));
            }
            if p.rel.has(Rel::GT) && p.rel != Rel::ALL {
                let covered = p.rel.has(Rel::EQ) && p.s.with_top(b).is_subset(&p.t);
                if !covered {
                    return Err(Error::unsupported(format!("upward image of piece {} x {} ({})", p.s, p.t, p.rel.name())));
                }
            }
        }
        Ok(Region::from_pieces(a, b, out))
    }

    /// `{ (x, y) : ∃ y' < y, (x, y') ∈ r }`.
    fn down(&self) -> Result<Region> {
        let (a, b) = (&self.ambient.0, &self.ambient.1);
        let full_b = StrataSet::full(b);
        let mut out = Vec::new();
        for p in &self.pieces {
            let Some(min_t) = p.t.min() else { continue };
            let above_min = full_b.above(&min_t);
            if p.rel.has(Rel::GT) {
                let xs = if p.rel == Rel::ALL { p.s.clone() } else { p.s.above(&min_t.min(a.clone())) };
                out.push(Piece::new(xs, above_min.clone(), Rel::ALL));
            }
            if p.rel.has(Rel::EQ) {
                out.push(Piece::new(meet_sides(&p.s, &p.t).with_top(a), full_b.clone(), Rel::LT));
            }
            if p.rel.has(Rel::LT) && p.rel != Rel::ALL {
                let covered = p.rel.has(Rel::EQ) && p.s.with_top(b).is_subset(&p.t);
                if !covered {
                    return Err(Error::unsupported(format!("downward image of piece {} x {} ({})", p.s, p.t, p.rel.name())));
                }
            }
        }
        Ok(Region::from_pieces(a, b, out))
    }

    /// Parses the region file format: an `ambient <ord> <ord>` header, then
    /// `box <set> x <set>`, `tri <set> x <set>` or `piece <rel> <set> x <set>`
    /// lines; `#` starts a comment.
    pub fn parse(src: &str, opts: &ParseOptions) -> Result<Region> {
        let mut ambient: Option<(Ordinal, Ordinal)> = None;
        let mut pieces = Vec::new();
        let mut offset = 0;
        for line in src.lines() {
            let line_start = offset;
            offset += line.len() + 1;
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let at = |e: Error| match e {
                Error::Parse { pos, msg } => Error::Parse { pos: line_start + pos, msg },
                e => e,
            };
            let (kw, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
            let lead = line.len() - line.trim_start().len() + kw.len() + 1;
            let shift = |e: Error| match at(e) {
                Error::Parse { pos, msg } => Error::Parse { pos: pos + lead, msg },
                e => e,
            };
            match kw {
                "ambient" => {
                    let (x, y) = split_pair(rest).ok_or_else(|| Error::Parse { pos: line_start, msg: "expected `ambient <ord> <ord>`".into() })?;
                    let a = Ordinal::parse_with(x, opts).map_err(shift)?;
                    let b = Ordinal::parse_with(y, opts).map_err(shift)?;
                    ambient = Some((a, b));
                }
                "box" | "tri" | "piece" => {
                    let Some((a, b)) = &ambient else {
                        return Err(Error::Parse { pos: line_start, msg: "`ambient` header must come first".into() });
                    };
                    let (rel, sets) = match kw {
                        "box" => (Rel::ALL, rest),
                        "tri" => (Rel::LE, rest),
                        _ => {
                            let (name, sets) = rest.trim().split_once(char::is_whitespace).unwrap_or((rest, ""));
                            let rel = Rel::from_name(name)
                                .ok_or_else(|| Error::Parse { pos: line_start, msg: format!("unknown relation `{name}`") })?;
                            (rel, sets)
                        }
                    };
                    let (ls, rs) = split_times(sets).ok_or_else(|| Error::Parse { pos: line_start, msg: "expected `<set> x <set>`".into() })?;
                    let s = StrataSet::parse(ls, Some(a), opts).map_err(at)?;
                    let t = StrataSet::parse(rs, Some(b), opts).map_err(at)?;
                    pieces.push(Piece::new(s, t, rel));
                }
                other => return Err(Error::Parse { pos: line_start, msg: format!("unknown directive `{other}`") }),
            }
        }
        let (a, b) = ambient.ok_or_else(|| Error::Parse { pos: 0, msg: "missing `ambient` header".into() })?;
        Ok(Region::from_pieces(&a, &b, pieces))
    }
}

fn split_pair(s: &str) -> Option<(&str, &str)> {
    let s = s.trim();
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c.is_whitespace() && depth == 0 => {
                let (l, r) = (&s[..i], s[i..].trim());
                if !r.is_empty() && !r.starts_with('+') && !l.ends_with('+') {
                    return Some((l, r));
                }
            }
            _ => {}
        }
    }
    None
}

/// Splits `<set> x <set>` at a standalone `x` outside brackets.
fn split_times(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    let bytes = s.as_bytes();
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            'x' if depth == 0 => {
                let before = i == 0 || bytes[i - 1].is_ascii_whitespace();
                let after = i + 1 >= bytes.len() || bytes[i + 1].is_ascii_whitespace();
                if before && after {
                    return Some((&s[..i], &s[i + 1..]));
                }
            }
            _ => {}
        }
    }
    None
}

/// Brute-force closure of a finite point set under coordinatewise min and max.
pub fn lattice_closure_points(pts: &[(Ordinal, Ordinal)]) -> Vec<(Ordinal, Ordinal)> {
    let mut set: BTreeSet<(Ordinal, Ordinal)> = pts.iter().cloned().collect();
    loop {
        let cur: Vec<_> = set.iter().cloned().collect();
        let mut added = false;
        for p in &cur {
            for q in &cur {
                let meet = (p.0.clone().min(q.0.clone()), p.1.clone().min(q.1.clone()));
                let join = (p.0.clone().max(q.0.clone()), p.1.clone().max(q.1.clone()));
                added |= set.insert(meet);
                added |= set.insert(join);
            }
        }
        if !added {
            return set.into_iter().collect();
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ambient {} {}", self.ambient.0, self.ambient.1)?;
        for p in &self.pieces {
            match p.rel {
                Rel::ALL => writeln!(f, "box {} x {}", p.s, p.t)?,
                Rel::LE => writeln!(f, "tri {} x {}", p.s, p.t)?,
                r => writeln!(f, "piece {} {} x {}", r.name(), p.s, p.t)?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Region {{ {} }}", self.to_string().trim_end().replace('\n', "; "))
    }
}

impl Serialize for Region {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::ord;

    fn region(src: &str) -> Region {
        Region::parse(src, &ParseOptions { normalize: true, ..Default::default() }).unwrap()
    }

    #[test]
    fn square_of_omega_plus_one() {
        let r = region("ambient w w\nbox [0,w] x [0,w]");
        let d1 = r.derivative();
        let expect = region("ambient w w\nbox {w} x [0,w]\nbox [0,w] x {w}");
        assert!(d1.set_eq(&expect), "{d1}");
        let d2 = d1.derivative();
        assert!(d2.set_eq(&region("ambient w w\nbox {w} x {w}")));
        assert_eq!(r.cb_rank_finite(DEFAULT_BOUND), CbOutcome::Rank(2));
    }

    #[test]
    fn triangle_derivatives() {
        let r = region("ambient w w\ntri [0,w] x [0,w]");
        let d1 = r.derivative();
        assert!(d1.set_eq(&region("ambient w w\nbox [0,w] x {w}")), "{d1}");
        assert!(d1.derivative().set_eq(&region("ambient w w\nbox {w} x {w}")));
    }

    #[test]
    fn plank_ranks() {
        let r = region("ambient w^2 w\nbox [0,w^2] x [0,w]");
        assert_eq!(r.cb_rank_finite(DEFAULT_BOUND), CbOutcome::Rank(3));
        assert_eq!(r.point_rank(&ord("w*3"), &ord("w"), DEFAULT_BOUND).unwrap(), PointRank::Known(ord("2")));
        assert_eq!(r.point_rank(&ord("5"), &ord("2"), DEFAULT_BOUND).unwrap(), PointRank::Known(ord("0")));
        assert!(r.point_rank(&ord("w^2 + 1"), &ord("0"), DEFAULT_BOUND).is_err());
        let single = region("ambient w w\nbox {3} x {w}");
        assert_eq!(single.cb_rank_finite(DEFAULT_BOUND), CbOutcome::Rank(0));
    }

    #[test]
    fn transfinite_rank_is_unknown_under_iteration() {
        let r = region("ambient w^w w\nbox [0,w^w] x [0,w]");
        assert!(matches!(r.cb_rank_finite(8), CbOutcome::Unknown { .. }));
        assert_eq!(r.point_rank(&ord("w^w"), &ord("w"), 8).unwrap(), PointRank::Known(ord("w + 1")));
    }

    #[test]
    fn set_operations() {
        let b = region("ambient w^2 w^2\nbox [0,w^2] x [0,w^2]");
        let t = region("ambient w^2 w^2\ntri [w,w^2] x [0,w^2]");
        let i = b.intersect(&t).unwrap();
        assert!(i.set_eq(&t));
        assert!(b.difference(&b).unwrap().is_empty());
        let e = Region::empty(&ord("w^2"), &ord("w^2"));
        assert!(b.union(&e).unwrap().set_eq(&b));
        assert!(b.union(&region("ambient w w\nbox [0,w] x [0,w]")).is_err());
    }

    #[test]
    fn lattice_closure_of_antichain() {
        let pts = [(ord("0"), ord("3")), (ord("3"), ord("0"))];
        let r = Region::lattice_closure(&pts);
        let got = r.finite_points().unwrap();
        assert_eq!(got.len(), 4);
        assert!(r.is_sublattice().unwrap());
    }

    #[test]
    fn sublattice_checks() {
        assert!(region("ambient w^2 w\nbox [0,w^2] x [0,w]").is_sublattice().unwrap());
        assert!(region("ambient w^2 w^2\ntri [0,w^2] x [0,w^2]").is_sublattice().unwrap());
        let l = region("ambient w w\nbox [0,w] x {w}\nbox {w} x [0,w]");
        assert!(!l.is_sublattice().unwrap());
        let chain = region("ambient w w\nbox [0,w] x {0}\nbox {w} x [0,w]");
        assert!(chain.is_sublattice().unwrap());
        let cross = region("ambient w w\nbox [0,w] x {w}\nbox {5} x [0,w]");
        assert!(!cross.is_sublattice().unwrap());
        let two = region("ambient w w\nbox {0} x {3}\nbox {3} x {0}");
        assert!(!two.is_sublattice().unwrap());
    }

    #[test]
    fn rows_and_columns() {
        let t = region("ambient w^2 w^2\ntri [0,w^2] x [0,w^2]");
        assert!(t.row(&ord("w")).set_eq(&StrataSet::interval(&ord("w^2"), &ord("0"), &ord("w"))));
        assert!(t.column(&ord("w")).set_eq(&StrataSet::interval(&ord("w^2"), &ord("w"), &ord("w^2"))));
    }

    #[test]
    fn file_round_trip() {
        let src = "ambient w^2 w\n# comment\nbox [0,w^2] x [0,w]\npiece gt [0,w] x [0,w]\n";
        let r = region(src);
        assert!(region(&r.to_string()).set_eq(&r));
    }
}
