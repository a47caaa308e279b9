//! Symbolic terms for scattered spaces built from ordinal intervals, with a
//! rank / unitarity / end-point calculus and instantiation to regions.
//!
//! Rules used by [`SpaceTerm::rank`]:
//! - `[0, γ]` has rank equal to the leading exponent of `γ`;
//! - products add ranks with the natural sum;
//! - a vector sum of `ρ` copies (ρ indecomposable) of spaces of rank `θ`
//!   has rank `θ + ln ρ`;
//! - two copies of `[0, θ]` glued at the top have the rank of `[0, θ]`;
//! - `X(C)` is a union of the closed row `[0, Λ] × {ν}` and the closed
//!   product `Ĉ × [0, ν]`, so its rank is the larger of the two ranks.

use crate::construct;
use crate::error::{Error, Result};
use crate::ordinal::{parse_expr, Ordinal, ParseOptions};
use crate::parse::Cursor;
use crate::region::{CbOutcome, Piece, Region, Rel};
use crate::strata::{parse_set_at, StrataSet};
use num_bigint::BigUint;
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpaceTerm {
    /// `[0, γ]`.
    Ord(Ordinal),
    Prod(Box<SpaceTerm>, Box<SpaceTerm>),
    /// The listed summands, cycled `ρ` times and glued end to start.
    VecSum(Ordinal, Vec<SpaceTerm>),
    Disj(Box<SpaceTerm>, Box<SpaceTerm>),
    /// Two copies of `[0, θ]` glued at the top.
    T(Ordinal),
    /// `[0, θ]²`.
    K(Ordinal),
    Plank(Ordinal, Ordinal),
    /// `{ (x, y) ∈ [0, α]² : x ≤ y }`.
    Tri(Ordinal),
    /// `([0, Λ] × {ν}) ∪ (Ĉ × [0, ν])` with `Λ = sup C` and `Ĉ = C ∪ {Λ}`.
    XC(StrataSet, Ordinal),
}

/// The shape of a derivative at a designated level.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Shape {
    /// A finite set of points.
    Points { count: u64 },
    /// An end point with a row of `row` distinct rank levels to its left and
    /// a column of `col` levels below it: a chain when `col = 0`, the shape
    /// `row + 1 + col*` in general.
    Spine { row: Ordinal, col: Ordinal },
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Points { count: 1 } => write!(f, "point"),
            Shape::Points { count } => write!(f, "{count} points"),
            Shape::Spine { row, col } if col.is_zero() => write!(f, "chain({})", row.succ()),
            Shape::Spine { row, col } if row == col => write!(f, "T({row})"),
            Shape::Spine { row, col } => write!(f, "{} + 1 + ({col})*", row),
        }
    }
}

/// Shape of `∂^level` of a space.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TopShape {
    pub level: Ordinal,
    pub shape: Shape,
}

impl fmt::Display for TopShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at level {}", self.shape, self.level)
    }
}

/// Invariants of a term. Slots that could not be computed are `None`, and
/// two vectors are only compared on slots known for both.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct InvariantVector {
    pub rank: Option<Ordinal>,
    pub unitary: Option<bool>,
    pub top: Option<TopShape>,
    /// Invariants of the summands of a vector sum.
    pub summands: Option<BTreeSet<InvariantVector>>,
}

impl InvariantVector {
    /// True when some slot known on both sides differs, which rules out an
    /// almost homeomorphism.
    pub fn separates(&self, other: &InvariantVector) -> bool {
        fn differ<T: PartialEq>(a: &Option<T>, b: &Option<T>) -> bool {
            matches!((a, b), (Some(x), Some(y)) if x != y)
        }
        differ(&self.rank, &other.rank)
            || differ(&self.unitary, &other.unitary)
            || differ(&self.top, &other.top)
            || differ(&self.summands, &other.summands)
    }
}

impl fmt::Display for InvariantVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |o: Option<String>| o.unwrap_or_else(|| "?".into());
        write!(
            f,
            "(rank {}, unitary {}, top {}",
            opt(self.rank.as_ref().map(|r| r.to_string())),
            opt(self.unitary.map(|u| u.to_string())),
            opt(self.top.as_ref().map(|t| t.to_string()))
        )?;
        if let Some(s) = &self.summands {
            let parts: Vec<String> = s.iter().map(|v| v.to_string()).collect();
            write!(f, ", summands {{{}}}", parts.join("; "))?;
        }
        write!(f, ")")
    }
}

/// Where the end point sits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EndPoint {
    /// Coordinates in the instantiated region.
    At { x: Ordinal, y: Ordinal },
    /// The top element of a vector sum with no planar realization.
    Top,
}

impl fmt::Display for EndPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EndPoint::At { x, y } => write!(f, "({x}, {y})"),
            EndPoint::Top => write!(f, "1_Y"),
        }
    }
}

/// Rank of the end point of `[0, γ]` and that point, when `[0, γ]` is unitary.
fn line_end(g: &Ordinal) -> Option<Ordinal> {
    if g.is_zero() {
        return Some(Ordinal::zero());
    }
    let e = g.leading_exponent();
    (!e.is_zero() && g.leading_coefficient() == BigUint::from(1u32)).then(|| Ordinal::omega_pow(&e))
}

/// Number of points of the last nonempty derivative of `[0, γ]`.
fn line_top_count(g: &Ordinal) -> Option<u64> {
    if g.is_finite() {
        return g.as_u64().map(|n| n + 1);
    }
    u64::try_from(g.leading_coefficient()).ok()
}

/// Least `r` with `r ⊕ b ≥ a`.
pub fn natural_gap(a: &Ordinal, b: &Ordinal) -> Ordinal {
    if b >= a {
        return Ordinal::zero();
    }
    let (ca, cb) = (a.cnf(), b.cnf());
    let coeff = |c: &[(Ordinal, BigUint)], e: &Ordinal| c.iter().find(|(x, _)| x == e).map(|(_, k)| k.clone()).unwrap_or_default();
    let mut exps: Vec<Ordinal> = ca.iter().chain(cb.iter()).map(|(e, _)| e.clone()).collect();
    exps.sort();
    exps.dedup();
    exps.reverse();
    let mut out = Vec::new();
    for e in &exps {
        let (x, y) = (coeff(&ca, e), coeff(&cb, e));
        if x == y {
            continue;
        }
        // First difference from the top; b < a forces x > y here.
        out.push((e.clone(), x - y));
        let rest_a = Ordinal::from_cnf(ca.iter().filter(|(f, _)| f < e).cloned());
        let rest_b = Ordinal::from_cnf(cb.iter().filter(|(f, _)| f < e).cloned());
        let tail = natural_gap(&rest_a, &rest_b);
        return Ordinal::from_cnf(out).natural_sum(&tail);
    }
    Ordinal::zero()
}

impl SpaceTerm {
    fn line(&self) -> Option<Ordinal> {
        match self {
            SpaceTerm::Ord(g) => Some(g.clone()),
            SpaceTerm::VecSum(rho, body) => {
                let mut sum = Ordinal::zero();
                for t in body {
                    sum = sum.add(&t.line()?);
                }
                Some(sum.mul(rho))
            }
            _ => None,
        }
    }

    fn is_point(&self) -> bool {
        match self {
            SpaceTerm::Ord(g) | SpaceTerm::T(g) | SpaceTerm::K(g) | SpaceTerm::Tri(g) => g.is_zero(),
            SpaceTerm::Plank(a, b) => a.is_zero() && b.is_zero(),
            SpaceTerm::Prod(s, t) => s.is_point() && t.is_point(),
            SpaceTerm::VecSum(_, body) => body.iter().all(SpaceTerm::is_point),
            SpaceTerm::Disj(..) | SpaceTerm::XC(..) => false,
        }
    }

    /// For a vector sum: the common summand rank and `ln ρ`.
    fn vecsum_parts(rho: &Ordinal, body: &[SpaceTerm]) -> Result<(Ordinal, Ordinal)> {
        if body.is_empty() {
            return Err(Error::domain("vector sum with no summands"));
        }
        if rho.is_zero() || !rho.is_power() || (body.len() > 1 && rho.is_finite()) {
            return Err(Error::unsupported(format!(
                "vector sum needs an indecomposable repeat length, got {} copies of a {}-term list",
                rho,
                body.len()
            )));
        }
        if rho > &Ordinal::one() && body.iter().all(SpaceTerm::is_point) {
            return Err(Error::unsupported("vector sum of one-point spaces collapses to a point"));
        }
        let ranks = body.iter().map(SpaceTerm::rank).collect::<Result<Vec<_>>>()?;
        if ranks.iter().any(|r| r != &ranks[0]) {
            let shown: Vec<String> = ranks.iter().map(|r| r.to_string()).collect();
            return Err(Error::unsupported(format!("vector sum of summands with different ranks {}", shown.join(", "))));
        }
        Ok((ranks[0].clone(), rho.ln()?))
    }

    fn xc_parts(club: &StrataSet, nu: &Ordinal) -> Result<(StrataSet, Ordinal)> {
        let hat = construct::close_club(club)?;
        construct::check_nu(nu)?;
        let lambda = hat.top().clone();
        Ok((hat, lambda))
    }

    pub fn rank(&self) -> Result<Ordinal> {
        Ok(match self {
            SpaceTerm::Ord(g) | SpaceTerm::T(g) => g.rank_of_ordinal_space(),
            SpaceTerm::Prod(s, t) => s.rank()?.natural_sum(&t.rank()?),
            SpaceTerm::K(g) | SpaceTerm::Tri(g) => {
                let e = g.rank_of_ordinal_space();
                e.natural_sum(&e)
            }
            SpaceTerm::Plank(a, b) => a.rank_of_ordinal_space().natural_sum(&b.rank_of_ordinal_space()),
            SpaceTerm::VecSum(rho, body) => {
                let (theta, ln) = SpaceTerm::vecsum_parts(rho, body)?;
                theta.add(&ln)
            }
            SpaceTerm::Disj(s, t) => s.rank()?.max(t.rank()?),
            SpaceTerm::XC(club, nu) => {
                let (hat, lambda) = SpaceTerm::xc_parts(club, nu)?;
                let column = hat.cb_rank()?.natural_sum(&nu.rank_of_ordinal_space());
                lambda.rank_of_ordinal_space().max(column)
            }
        })
    }

    /// Whether the last nonempty derivative is a single point.
    pub fn is_unitary(&self) -> Result<bool> {
        Ok(self.end_point()?.is_some())
    }

    /// The end point, or `None` when the space is not unitary.
    pub fn end_point(&self) -> Result<Option<EndPoint>> {
        self.rank()?;
        let at = |x: Ordinal, y: Ordinal| Some(EndPoint::At { x, y });
        Ok(match self {
            SpaceTerm::Ord(g) => line_end(g).and_then(|x| at(x, Ordinal::zero())),
            SpaceTerm::T(g) => (g.is_zero() || (g.is_power() && !g.is_finite())).then(|| EndPoint::At { x: g.clone(), y: g.clone() }),
            SpaceTerm::K(g) | SpaceTerm::Tri(g) => line_end(g).and_then(|x| at(x.clone(), x)),
            SpaceTerm::Plank(a, b) => match (line_end(a), line_end(b)) {
                (Some(x), Some(y)) => at(x, y),
                _ => None,
            },
            SpaceTerm::Prod(s, t) => match (s.end_point()?, t.end_point()?) {
                (Some(EndPoint::At { x, .. }), Some(EndPoint::At { x: y, .. })) if s.line().is_some() && t.line().is_some() => at(x, y),
                (Some(_), Some(_)) => Some(EndPoint::Top),
                _ => None,
            },
            SpaceTerm::VecSum(rho, body) => match self.line() {
                Some(g) => line_end(&g).and_then(|x| at(x, Ordinal::zero())),
                None if rho.is_finite() => body[0].end_point()?,
                None => Some(EndPoint::Top),
            },
            SpaceTerm::Disj(s, t) => {
                let (rs, rt) = (s.rank()?, t.rank()?);
                if rs == rt {
                    None
                } else if rs > rt {
                    s.end_point()?
                } else {
                    match t.end_point()? {
                        Some(EndPoint::At { x, y }) => {
                            let c = disj_offset(s)?;
                            at(c.add(&x), c.add(&y))
                        }
                        other => other,
                    }
                }
            }
            SpaceTerm::XC(..) => match self.xc_top()? {
                Some(pts) if pts.len() == 1 => {
                    let (x, y) = pts.into_iter().next().expect("one point");
                    at(x, y)
                }
                _ => None,
            },
        })
    }

    /// Points of `∂^rank X(C)`, when `ν` is a power so that the column
    /// below `ν` cannot reach the top level.
    fn xc_top(&self) -> Result<Option<Vec<(Ordinal, Ordinal)>>> {
        let SpaceTerm::XC(club, nu) = self else { return Ok(None) };
        if !nu.is_power() {
            return Ok(None);
        }
        let (hat, lambda) = SpaceTerm::xc_parts(club, nu)?;
        let r = self.rank()?;
        let e_nu = nu.rank_of_ordinal_space();
        let mut row = StrataSet::empty(&lambda);
        if lambda.rank_of_ordinal_space() == r {
            row = row.u(&StrataSet::full(&lambda).derivative_alpha(&r));
        }
        if hat.cb_rank()?.natural_sum(&e_nu) == r {
            let Some(top) = hat.top_derivative() else { return Ok(None) };
            row = row.u(&top);
        }
        Ok(row.finite_points().map(|xs| xs.into_iter().map(|x| (x, nu.clone())).collect()))
    }

    /// Shape of the derivative at the level used to tell spaces apart.
    ///
    /// Products and triangles are described at the level of their factors,
    /// where the square `[0, θ]²` shows the glued shape `T(θ)` and the
    /// triangle shows a chain; everything else at its own rank.
    pub fn top_derivative_type(&self) -> Result<Option<TopShape>> {
        let r = self.rank()?;
        let points = |n: Option<u64>| n.map(|count| TopShape { level: r.clone(), shape: Shape::Points { count } });
        Ok(match self {
            SpaceTerm::Ord(g) => points(line_top_count(g)),
            SpaceTerm::T(g) => {
                if g.is_finite() {
                    points(g.as_u64().map(|n| 2 * n + 1))
                } else {
                    let c = u64::try_from(g.leading_coefficient()).ok();
                    points(c.map(|c| if g.term_count() == 1 { 2 * c - 1 } else { 2 * c }))
                }
            }
            SpaceTerm::K(g) => spine(g, g),
            SpaceTerm::Plank(a, b) => spine(a, b),
            SpaceTerm::Prod(s, t) => match (s.line(), t.line()) {
                (Some(a), Some(b)) => spine(&a, &b),
                _ => None,
            },
            SpaceTerm::Tri(g) => line_end(g).map(|_| {
                let e = g.rank_of_ordinal_space();
                TopShape { level: e.clone(), shape: Shape::Spine { row: e, col: Ordinal::zero() } }
            }),
            SpaceTerm::VecSum(..) => match self.line() {
                Some(g) => points(line_top_count(&g)),
                None => self.end_point()?.map(|_| TopShape { level: r.clone(), shape: Shape::Points { count: 1 } }),
            },
            SpaceTerm::Disj(s, t) => {
                let (ts, tt) = (s.top_derivative_type()?, t.top_derivative_type()?);
                let count = |x: &Option<TopShape>, rank: &Ordinal| match x {
                    Some(TopShape { level, shape: Shape::Points { count } }) if level == rank => Some(*count),
                    _ => None,
                };
                let (rs, rt) = (s.rank()?, t.rank()?);
                let (a, b) = (count(&ts, &rs), count(&tt, &rt));
                if rs > rt {
                    points(a)
                } else if rt > rs {
                    points(b)
                } else {
                    points(a.zip(b).map(|(a, b)| a + b))
                }
            }
            SpaceTerm::XC(..) => points(self.xc_top()?.map(|p| p.len() as u64)),
        })
    }

    pub fn invariant_vector(&self) -> InvariantVector {
        let summands = match self {
            SpaceTerm::VecSum(_, body) => Some(body.iter().map(SpaceTerm::invariant_vector).collect()),
            _ => None,
        };
        InvariantVector {
            rank: self.rank().ok(),
            unitary: self.is_unitary().ok(),
            top: self.top_derivative_type().ok().flatten(),
            summands,
        }
    }

    /// The ambient `(Λ₁, Λ₂)` of the instantiated region.
    fn ambient(&self) -> Result<(Ordinal, Ordinal)> {
        Ok(match self {
            SpaceTerm::Ord(_) | SpaceTerm::VecSum(..) => (self.line().ok_or_else(|| no_realization(self))?, Ordinal::zero()),
            SpaceTerm::T(g) | SpaceTerm::K(g) | SpaceTerm::Tri(g) => (g.clone(), g.clone()),
            SpaceTerm::Plank(a, b) => (a.clone(), b.clone()),
            SpaceTerm::Prod(s, t) => match (s.line(), t.line()) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(no_realization(self)),
            },
            SpaceTerm::XC(club, nu) => (SpaceTerm::xc_parts(club, nu)?.1, nu.clone()),
            SpaceTerm::Disj(s, t) => {
                let c = disj_offset(s)?;
                let (a, b) = t.ambient()?;
                (c.add(&a), c.add(&b))
            }
        })
    }

    /// The term as a subset of a product of two ordinal intervals. Lines sit
    /// on the bottom row; disjoint sums are translated along the diagonal.
    pub fn instantiate(&self) -> Result<Region> {
        let (a, b) = self.ambient()?;
        let full = |g: &Ordinal| StrataSet::full(g);
        Ok(match self {
            SpaceTerm::Ord(_) | SpaceTerm::VecSum(..) => Region::product(&full(&a), &full(&b)),
            SpaceTerm::K(_) | SpaceTerm::Plank(..) | SpaceTerm::Prod(..) => Region::product(&full(&a), &full(&b)),
            SpaceTerm::Tri(_) => Region::triangle(&full(&a), &full(&b)),
            SpaceTerm::T(g) => Region::from_pieces(
                g,
                g,
                [
                    Piece::new(full(g), StrataSet::singleton(g, g), Rel::ALL),
                    Piece::new(StrataSet::singleton(g, g), full(g), Rel::ALL),
                ],
            ),
            SpaceTerm::XC(club, nu) => construct::build_xc(club, nu)?,
            SpaceTerm::Disj(s, t) => {
                let c = disj_offset(s)?;
                let rs = s.instantiate()?;
                let rt = t.instantiate()?;
                let mut pieces: Vec<Piece> = rs.pieces().to_vec();
                for p in rt.pieces() {
                    pieces.push(Piece::new(p.s.shift(&c, &a), p.t.shift(&c, &b), p.rel));
                }
                Region::from_pieces(&a, &b, pieces)
            }
        })
    }

    pub fn parse(src: &str, opts: &ParseOptions) -> Result<SpaceTerm> {
        let mut cur = Cursor::new(src);
        let t = parse_term(&mut cur, opts)?;
        cur.expect_end()?;
        Ok(t)
    }
}

fn no_realization(t: &SpaceTerm) -> Error {
    Error::unsupported(format!("`{t}` has no realization in a product of two ordinal intervals"))
}

/// Translation separating the two parts of a disjoint sum: one more than
/// the larger side of the first part.
fn disj_offset(s: &SpaceTerm) -> Result<Ordinal> {
    let (a, b) = s.ambient()?;
    Ok(a.max(b).succ())
}

fn spine(a: &Ordinal, b: &Ordinal) -> Option<TopShape> {
    line_end(a)?;
    line_end(b)?;
    let (ra, rb) = (a.rank_of_ordinal_space(), b.rank_of_ordinal_space());
    let level = ra.clone().max(rb.clone());
    // Along the top row the ranks are `r ⊕ rb` for `r < ra`; keep those ≥ level.
    let count = |mine: &Ordinal, other: &Ordinal| {
        let from = natural_gap(&level, other);
        if &from >= mine {
            Ordinal::zero()
        } else {
            from.left_sub(mine).expect("from < mine")
        }
    };
    Some(TopShape { level: level.clone(), shape: Shape::Spine { row: count(&ra, &rb), col: count(&rb, &ra) } })
}

impl fmt::Display for SpaceTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceTerm::Ord(g) => write!(f, "ord({g})"),
            SpaceTerm::Prod(s, t) => write!(f, "prod({s}, {t})"),
            SpaceTerm::VecSum(rho, body) if body.len() == 1 => write!(f, "vecsum({rho}, {})", body[0]),
            SpaceTerm::VecSum(rho, body) => {
                let parts: Vec<String> = body.iter().map(|t| t.to_string()).collect();
                write!(f, "vecsum({rho}, [{}])", parts.join(", "))
            }
            SpaceTerm::Disj(s, t) => write!(f, "disj({s}, {t})"),
            SpaceTerm::T(g) => write!(f, "T({g})"),
            SpaceTerm::K(g) => write!(f, "K({g})"),
            SpaceTerm::Plank(a, b) => write!(f, "plank({a}, {b})"),
            SpaceTerm::Tri(g) => write!(f, "tri({g})"),
            SpaceTerm::XC(c, nu) => write!(f, "XC({c}, {nu})"),
        }
    }
}

impl Serialize for SpaceTerm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn parse_term(cur: &mut Cursor<'_>, opts: &ParseOptions) -> Result<SpaceTerm> {
    let start = cur.pos();
    let name = cur.ident().ok_or_else(|| cur.error("expected a term name"))?.to_ascii_lowercase();
    cur.expect('(')?;
    let ordinal = |cur: &mut Cursor<'_>| parse_expr(cur, opts);
    let term = match name.as_str() {
        "ord" => SpaceTerm::Ord(ordinal(cur)?),
        "t" => SpaceTerm::T(ordinal(cur)?),
        "k" => SpaceTerm::K(ordinal(cur)?),
        "tri" => SpaceTerm::Tri(ordinal(cur)?),
        "plank" => {
            let a = ordinal(cur)?;
            cur.expect(',')?;
            SpaceTerm::Plank(a, ordinal(cur)?)
        }
        "prod" | "disj" => {
            let s = parse_term(cur, opts)?;
            cur.expect(',')?;
            let t = parse_term(cur, opts)?;
            if name == "prod" {
                SpaceTerm::Prod(Box::new(s), Box::new(t))
            } else {
                SpaceTerm::Disj(Box::new(s), Box::new(t))
            }
        }
        "vecsum" => {
            let rho = ordinal(cur)?;
            cur.expect(',')?;
            let body = if cur.eat('[') {
                let mut v = vec![parse_term(cur, opts)?];
                while cur.eat(',') {
                    v.push(parse_term(cur, opts)?);
                }
                cur.expect(']')?;
                v
            } else {
                vec![parse_term(cur, opts)?]
            };
            SpaceTerm::VecSum(rho, body)
        }
        "xc" => {
            let club = parse_set_at(cur, None, opts)?;
            cur.expect(',')?;
            SpaceTerm::XC(club, ordinal(cur)?)
        }
        other => return Err(Error::Parse { pos: start, msg: format!("unknown term `{other}`") }),
    };
    cur.expect(')')?;
    Ok(term)
}

/// Measurements of a region by derivative iteration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Measured {
    pub rank: Option<usize>,
    pub unitary: Option<bool>,
    pub end_point: Option<(Ordinal, Ordinal)>,
    pub top: Option<TopShape>,
}

/// Measures rank, unitarity and the shape predicted by `predicted` on the
/// region itself. Only finite levels are measured.
pub fn measure(region: &Region, predicted: Option<&TopShape>, bound: usize) -> Measured {
    let ds = region.derivatives(bound + 1);
    let rank = match region.cb_rank_finite(bound) {
        CbOutcome::Rank(n) => Some(n),
        _ => None,
    };
    let last = rank.and_then(|n| ds[n].finite_points());
    let unitary = rank.map(|_| last.as_ref().map(|p| p.len() == 1).unwrap_or(false));
    let end_point = last.as_ref().filter(|p| p.len() == 1).map(|p| p[0].clone());
    let top = predicted.and_then(|want| {
        let level = want.level.as_u64()? as usize;
        let n = rank?;
        if level > n {
            return None;
        }
        let shape = match &want.shape {
            Shape::Points { .. } => Shape::Points { count: ds[level].finite_points()?.len() as u64 },
            Shape::Spine { .. } => {
                let (x, y) = end_point.clone()?;
                let levels = |fiber: &dyn Fn(&Region) -> StrataSet, skip: &Ordinal| {
                    (level..n)
                        .filter(|&k| {
                            let here = fiber(&ds[k]).d(&fiber(&ds[k + 1]));
                            let here = here.d(&StrataSet::singleton(here.top(), skip));
                            !here.is_empty()
                        })
                        .count() as u64
                };
                Shape::Spine {
                    row: Ordinal::nat(levels(&|r: &Region| r.row(&y), &x)),
                    col: Ordinal::nat(levels(&|r: &Region| r.column(&x), &y)),
                }
            }
        };
        Some(TopShape { level: want.level.clone(), shape })
    });
    Measured { rank, unitary, end_point, top }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::ord;
    use crate::region::DEFAULT_BOUND;

    fn term(s: &str) -> SpaceTerm {
        SpaceTerm::parse(s, &ParseOptions { normalize: true, ..Default::default() }).unwrap()
    }

    #[test]
    fn ranks() {
        assert_eq!(term("vecsum(w^3, ord(w^2))").rank().unwrap(), ord("5"));
        assert_eq!(term("K(e0)").rank().unwrap(), ord("e0*2"));
        assert_eq!(term("prod(ord(w), ord(w))").rank().unwrap(), ord("2"));
        assert_eq!(term("T(e1)").rank().unwrap(), ord("e1"));
        assert!(matches!(term("vecsum(w*2, ord(w))").rank(), Err(Error::Unsupported(_))));
        assert!(matches!(term("vecsum(w, [ord(w), ord(w^2)])").rank(), Err(Error::Unsupported(_))));
        assert!(matches!(term("vecsum(w, ord(0))").rank(), Err(Error::Unsupported(_))));
        assert_eq!(term("vecsum(1, ord(0))").rank().unwrap(), ord("0"));
    }

    #[test]
    fn unitarity() {
        assert!(term("T(e0)").is_unitary().unwrap());
        assert!(!term("ord(w^2*3)").is_unitary().unwrap());
        assert_eq!(term("K(e0)").end_point().unwrap(), Some(EndPoint::At { x: ord("e0"), y: ord("e0") }));
        assert_eq!(term("vecsum(w, K(w))").end_point().unwrap(), Some(EndPoint::Top));
    }

    #[test]
    fn top_shapes() {
        let k = term("K(e0)").top_derivative_type().unwrap().unwrap();
        assert_eq!(k.shape.to_string(), "T(e0)");
        let t = term("tri(w^2)").top_derivative_type().unwrap().unwrap();
        let b = term("plank(w^2, w^2)").top_derivative_type().unwrap().unwrap();
        assert_eq!(t.shape.to_string(), "chain(3)");
        assert_eq!(b.shape.to_string(), "T(2)");
        assert_eq!(term("ord(w^w)").top_derivative_type().unwrap().unwrap().shape, Shape::Points { count: 1 });
    }

    #[test]
    fn oracle_agrees_on_small_terms() {
        for s in ["K(w)", "tri(w^2)", "plank(w^2, w)", "T(w^2)", "vecsum(w, ord(w))", "disj(K(w), ord(w^2))", "ord(w*3)", "T(w + 1)"] {
            let t = term(s);
            let r = t.instantiate().unwrap();
            let predicted = t.top_derivative_type().unwrap();
            let m = measure(&r, predicted.as_ref(), DEFAULT_BOUND);
            assert_eq!(Some(t.rank().unwrap()), m.rank.map(|n| Ordinal::nat(n as u64)), "{s}");
            assert_eq!(Some(t.is_unitary().unwrap()), m.unitary, "{s}");
            assert_eq!(predicted, m.top, "{s}");
            if let Some(EndPoint::At { x, y }) = t.end_point().unwrap() {
                assert_eq!(m.end_point, Some((x, y)), "{s}");
            }
        }
    }

    #[test]
    fn separation() {
        let a = term("K(e0)").invariant_vector();
        let b = term("K(e1)").invariant_vector();
        assert!(a.separates(&b));
        assert!(!a.separates(&a.clone()));
        let p = term("plank(w, w)").invariant_vector();
        let t = term("tri(w)").invariant_vector();
        assert_eq!(p.rank, t.rank);
        assert!(p.separates(&t));
    }

    #[test]
    fn natural_gaps() {
        assert_eq!(natural_gap(&ord("5"), &ord("2")), ord("3"));
        assert_eq!(natural_gap(&ord("w*2 + 1"), &ord("w + 3")), ord("w"));
        assert_eq!(natural_gap(&ord("2"), &ord("w")), ord("0"));
    }

    #[test]
    fn display_round_trip() {
        for s in ["vecsum(w, [K(w), tri(w)])", "disj(ord(3), T(w^2))", "XC(strata(w, w^2, 1, 2) | {w^2}, w)"] {
            let t = term(s);
            assert_eq!(term(&t.to_string()), t);
        }
    }
}
