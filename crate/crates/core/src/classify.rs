//! Closed sublattices of `[0, Ω]²`: the rectangle identity, the bounded-side
//! decomposition and the case analysis into labelled spaces.
//!
//! At this scale every region is countable, so "uncountable" is read as
//! "cofinal in Ω" throughout. Every report carries [`MINIATURE_NOTE`].

use crate::error::{Error, Result};
use crate::ordinal::Ordinal;
use crate::region::{CbOutcome, Region, Rel};
use crate::spaceterm::{measure, InvariantVector, Measured, SpaceTerm};
use crate::strata::StrataSet;
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;

pub const MINIATURE_NOTE: &str = "uncountable is read as cofinal in the designated top";

/// Labels of the case analysis. `long` is the normalized type `σ` of the long
/// side, with `[0, σ]` homeomorphic to it; it equals the top when the long side
/// is a full tail.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum ClassLabel {
    /// Bounded in both coordinates, homeomorphic to `[0, sigma]`.
    Countable { sigma: Ordinal },
    /// `[0, long] × [0, gamma]`.
    Plank { long: Ordinal, gamma: Ordinal },
    FullSquare { long: Ordinal },
    Triangle { long: Ordinal },
    OrdinalSpace { long: Ordinal },
}

impl ClassLabel {
    /// The term whose invariants the label predicts.
    pub fn predicted_term(&self) -> SpaceTerm {
        match self {
            ClassLabel::Countable { sigma } => SpaceTerm::Ord(sigma.clone()),
            ClassLabel::Plank { long, gamma } => SpaceTerm::Plank(long.clone(), gamma.clone()),
            ClassLabel::FullSquare { long } => SpaceTerm::K(long.clone()),
            ClassLabel::Triangle { long } => SpaceTerm::Tri(long.clone()),
            ClassLabel::OrdinalSpace { long } => SpaceTerm::Ord(long.clone()),
        }
    }

    pub fn long_side(&self) -> Option<&Ordinal> {
        match self {
            ClassLabel::Countable { .. } => None,
            ClassLabel::Plank { long, .. }
            | ClassLabel::FullSquare { long }
            | ClassLabel::Triangle { long }
            | ClassLabel::OrdinalSpace { long } => Some(long),
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassLabel::Countable { sigma } => write!(f, "Countable({sigma})"),
            ClassLabel::Plank { gamma, .. } => write!(f, "Plank({gamma})"),
            ClassLabel::FullSquare { .. } => write!(f, "FullSquare"),
            ClassLabel::Triangle { .. } => write!(f, "Triangle"),
            ClassLabel::OrdinalSpace { .. } => write!(f, "OrdinalSpace"),
        }
    }
}

/// Name of the Boolean algebra dual to the labelled space.
pub fn algebra_label(c: &ClassLabel) -> String {
    match c {
        ClassLabel::Countable { sigma } => format!("F({sigma})"),
        ClassLabel::OrdinalSpace { .. } => "F(ω₁)".into(),
        ClassLabel::FullSquare { .. } => "F(ω₁⊎ω₁)".into(),
        ClassLabel::Plank { gamma, .. } => format!("F(ω₁⊎{})", gamma.to_string().replace('w', "ω")),
        ClassLabel::Triangle { .. } => "F(ω₁×2)".into(),
    }
}

/// `[0, ω^rank · count]`, or `count` points when `rank = 0`.
fn line_type(rank: &Ordinal, count: u64) -> Ordinal {
    if rank.is_zero() {
        Ordinal::nat(count.saturating_sub(1))
    } else {
        Ordinal::omega_pow(rank).mul_nat(&BigUint::from(count))
    }
}

/// Cantor-Bendixson rank and top count of `[0, g]`.
fn rank_count(g: &Ordinal) -> (Ordinal, u64) {
    if g.is_finite() {
        (Ordinal::zero(), g.as_u64().expect("finite") + 1)
    } else {
        (g.leading_exponent(), u64::try_from(g.leading_coefficient()).expect("small coefficient"))
    }
}

/// Normal form of `[0, g]` up to homeomorphism.
pub fn space_type(g: &Ordinal) -> Ordinal {
    let (r, c) = rank_count(g);
    line_type(&r, c)
}

/// Type of the topological sum of the spaces `[0, g]`.
fn sum_type<'a>(gs: impl IntoIterator<Item = &'a Ordinal>) -> Ordinal {
    let mut best: Option<(Ordinal, u64)> = None;
    for g in gs {
        let (r, c) = rank_count(g);
        best = match best {
            None => Some((r, c)),
            Some((br, bc)) if br == r => Some((r, bc + c)),
            Some((br, bc)) if br > r => Some((br, bc)),
            Some(_) => Some((r, c)),
        };
    }
    best.map(|(r, c)| line_type(&r, c)).unwrap_or_default()
}

/// Whether `[0, small] ⊕ [0, big] ≅ [0, big]`.
fn absorbed(small: &Ordinal, big: &Ordinal) -> bool {
    sum_type([small, big]) == space_type(big)
}

/// Type of a closed, nonempty set of ordinals.
fn set_type(a: &StrataSet) -> Result<Ordinal> {
    if !a.is_closed() {
        return Err(Error::domain(format!("{a} is not closed")));
    }
    let info = a.rank_info().ok_or_else(|| Error::domain("empty side"))?;
    let top = a
        .top_derivative()
        .filter(|_| info.attained)
        .ok_or_else(|| Error::unsupported(format!("{a} has no last derivative")))?;
    let count = top.order_type().as_u64().ok_or_else(|| Error::unsupported("infinite top derivative"))?;
    Ok(line_type(&info.rank, count))
}

/// Type of a compact region of finite rank, by derivative iteration.
fn region_type(k: &Region, bound: usize) -> Result<Ordinal> {
    match k.cb_rank_finite(bound) {
        CbOutcome::Empty => Err(Error::domain("empty region")),
        CbOutcome::Rank(n) => {
            let last = k.derivatives(n).pop().expect("nonempty");
            let count = last.finite_points().ok_or_else(|| Error::unsupported("infinite top derivative"))?.len();
            Ok(line_type(&Ordinal::nat(n as u64), count as u64))
        }
        CbOutcome::Unknown { .. } => Err(Error::unsupported(format!("rank exceeds the iteration bound {bound}"))),
    }
}

/// Whether `s ∩ [0, Ω)` is unbounded in `Ω`.
fn cofinal(s: &StrataSet, omega: &Ordinal) -> bool {
    matches!(s.below(omega).max_or_sup(), Some(Err(x)) if x == *omega)
}

fn check_sublattice(k: &Region) -> Result<()> {
    match k.is_sublattice()? {
        true => Ok(()),
        false => Err(Error::domain("region is not a sublattice")),
    }
}

/// For a sublattice `k` with `(α₀, β₁)` and `(α₁, β₀)` in `k`, returns
/// `A = { ξ ∈ [α₀, α₁] : (ξ, β₀) ∈ k }` and `B = { η ∈ [β₀, β₁] : (α₀, η) ∈ k }`
/// after checking `k ∩ ([α₀, α₁] × [β₀, β₁]) = A × B`.
pub fn rectangle_sides(
    k: &Region,
    a0: &Ordinal,
    a1: &Ordinal,
    b0: &Ordinal,
    b1: &Ordinal,
) -> Result<(StrataSet, StrataSet)> {
    if a0 > a1 || b0 > b1 {
        return Err(Error::domain("corners out of order"));
    }
    if !k.contains(a0, b1) || !k.contains(a1, b0) {
        return Err(Error::domain(format!("({a0}, {b1}) and ({a1}, {b0}) must lie in the region")));
    }
    let (ta, tb) = k.ambient();
    let xs = StrataSet::interval(ta, a0, a1);
    let ys = StrataSet::interval(tb, b0, b1);
    let a = k.row(b0).i(&xs);
    let b = k.column(a0).i(&ys);
    if !k.restrict(&xs, &ys).set_eq(&Region::product(&a, &b)) {
        return Err(Error::domain("rectangle identity fails; the region is not a sublattice"));
    }
    Ok((a, b))
}

/// Rows `η` whose slice is cofinal in the first top.
fn long_rows(k: &Region) -> StrataSet {
    let (omega, tb) = k.ambient();
    let mut out = StrataSet::empty(tb);
    for p in k.pieces() {
        if p.rel.has(Rel::GT) && cofinal(&p.s, omega) {
            out = out.u(&p.t.with_top(tb).below(omega));
        }
    }
    out
}

/// Label of a sublattice of `[0, Ω] × [0, θ]` with `θ < Ω`.
pub fn strip_decompose(k: &Region, theta: &Ordinal) -> Result<ClassLabel> {
    strip_with(k, theta, crate::region::DEFAULT_BOUND)
}

fn strip_with(k: &Region, theta: &Ordinal, bound: usize) -> Result<ClassLabel> {
    let (omega, tb) = k.ambient();
    let omega = omega.clone();
    if theta >= &omega {
        return Err(Error::domain(format!("the short side {theta} must lie below {omega}")));
    }
    let full = StrataSet::full(&omega);
    if !k.is_subset(&k.restrict(&full, &StrataSet::interval(tb, &Ordinal::zero(), theta))) {
        return Err(Error::domain(format!("region reaches above the short side {theta}")));
    }
    let long = long_rows(k);
    let (Some(b0), Some(b1)) = (long.min(), long.max()) else {
        return Ok(ClassLabel::Countable { sigma: region_type(k, bound)? });
    };
    let short = k.difference(&k.restrict(&full, &long))?;
    let short_x = short.project_x().below(&omega);
    if cofinal(&short_x, &omega) {
        return Err(Error::unsupported("bounded rows are not uniformly bounded"));
    }
    let rho = short_x.sup();
    let a0 = k
        .row(&b1)
        .below(&omega)
        .above(&rho)
        .min()
        .ok_or_else(|| Error::domain("top long row is not cofinal"))?;
    let (a, b) = rectangle_sides(k, &a0, &omega, &b0, &b1)?;
    let mut parts = vec![ClassLabel::Plank { long: set_type(&a)?, gamma: set_type(&b)? }];
    let rest = k.difference(&Region::product(&a, &b))?;
    if !rest.is_empty() {
        if !rest.is_closed() {
            return Err(Error::unsupported("remainder of the rectangle is not clopen"));
        }
        parts.push(ClassLabel::Countable { sigma: region_type(&rest, bound)? });
    }
    combine(parts)
}

/// Label of the topological sum of labelled clopen parts.
fn combine(parts: Vec<ClassLabel>) -> Result<ClassLabel> {
    let mut small = Vec::new();
    let mut planks = Vec::new();
    let mut squares = Vec::new();
    for p in parts {
        match p {
            ClassLabel::Countable { sigma } => small.push(sigma),
            ClassLabel::OrdinalSpace { long } => planks.push((long, Ordinal::zero())),
            ClassLabel::Plank { long, gamma } => planks.push((long, gamma)),
            ClassLabel::FullSquare { long } => squares.push(long),
            ClassLabel::Triangle { .. } => return Err(Error::unsupported("triangle inside a sum")),
        }
    }
    let longs: BTreeSet<&Ordinal> = planks.iter().map(|p| &p.0).chain(squares.iter()).collect();
    let Some(&long) = longs.iter().next() else {
        return Ok(ClassLabel::Countable { sigma: sum_type(&small) });
    };
    if longs.len() > 1 {
        return Err(Error::unsupported("parts with long sides of different types"));
    }
    let long = long.clone();
    if let Some(s) = small.iter().find(|s| !absorbed(s, &long)) {
        return Err(Error::unsupported(format!("bounded part of type {s} is not absorbed by the long side")));
    }
    match squares.len() {
        0 => {
            let gamma = sum_type(planks.iter().map(|p| &p.1));
            Ok(if gamma.is_zero() { ClassLabel::OrdinalSpace { long } } else { ClassLabel::Plank { long, gamma } })
        }
        1 => match planks.iter().find(|p| !absorbed(&p.1, &long)) {
            None => Ok(ClassLabel::FullSquare { long }),
            Some(p) => Err(Error::unsupported(format!("plank of width {} beside a square", p.1))),
        },
        _ => Err(Error::unsupported("more than one square part")),
    }
}

/// Which branch of the case analysis fired.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Bounded in both coordinates.
    Bounded,
    /// Both the top row and the top column meet `[0, Ω)`.
    BothEdges,
    /// Neither does.
    NoEdge,
    /// Exactly one does, and the other coordinate stays bounded away from it.
    OneEdgeBounded,
    /// Exactly one does, and the other coordinate is cofinal.
    OneEdgeUnbounded,
}

/// A labelled part of the split used in the both-edges branch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Part {
    pub name: &'static str,
    pub region: String,
    pub label: Option<ClassLabel>,
    pub sublattice: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub top: Ordinal,
    pub branch: Branch,
    /// The measurements ran on the transpose.
    pub transposed: bool,
    pub label: ClassLabel,
    pub algebra: String,
    pub parts: Vec<Part>,
    pub predicted: InvariantVector,
    pub measured: Measured,
    pub matches: bool,
    pub note: &'static str,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "label: {}", self.label)?;
        writeln!(f, "algebra: {}", self.algebra)?;
        writeln!(f, "branch: {:?}{}", self.branch, if self.transposed { " (transposed)" } else { "" })?;
        if let Some(l) = self.label.long_side() {
            if l != &self.top {
                writeln!(f, "long side: [0, {l}] (top is {})", self.top)?;
            }
        }
        for p in &self.parts {
            let l = p.label.as_ref().map(|l| l.to_string()).unwrap_or_else(|| "empty".into());
            writeln!(f, "part {}: {} (sublattice: {})", p.name, l, p.sublattice)?;
        }
        writeln!(f, "predicted: {}", self.predicted)?;
        let m = &self.measured;
        let opt = |o: Option<String>| o.unwrap_or_else(|| "?".into());
        writeln!(
            f,
            "measured: (rank {}, unitary {}, top {})",
            opt(m.rank.map(|r| r.to_string())),
            opt(m.unitary.map(|u| u.to_string())),
            opt(m.top.as_ref().map(|t| t.to_string()))
        )?;
        writeln!(f, "match: {}", self.matches)?;
        write!(f, "note: {}", self.note)
    }
}

/// Runs the case analysis on a closed sublattice of `[0, Ω]²`.
pub fn classify(k: &Region, omega: &Ordinal) -> Result<Classification> {
    classify_with(k, omega, crate::region::DEFAULT_BOUND)
}

pub fn classify_with(k: &Region, omega: &Ordinal, bound: usize) -> Result<Classification> {
    if !omega.is_power() || omega.is_finite() {
        return Err(Error::domain(format!("top {omega} must be an infinite power of ω")));
    }
    if k.ambient() != (omega, omega) {
        let (a, b) = k.ambient();
        return Err(Error::Ambient(format!("region lives in [0,{a}]x[0,{b}], expected [0,{omega}]²")));
    }
    if k.is_empty() {
        return Err(Error::domain("empty region"));
    }
    if !k.is_closed() {
        return Err(Error::domain("region is not closed"));
    }
    check_sublattice(k)?;
    let mut parts = Vec::new();
    let (branch, label, edge_in_row) = case_analysis(k, omega, bound, &mut parts)?;
    let term = label.predicted_term();
    let predicted = term.invariant_vector();
    // Triangle terms carry their edge in the top row, plank terms their long
    // side along x; measure in the matching orientation.
    let transposed = edge_in_row != matches!(label, ClassLabel::Triangle { .. });
    let oriented = if transposed { k.transpose() } else { k.clone() };
    let measured = measure(&oriented, predicted.top.as_ref(), bound);
    let rank_ok = matches!((&predicted.rank, measured.rank), (Some(p), Some(m)) if *p == Ordinal::nat(m as u64));
    let unitary_ok = predicted.unitary.is_some() && predicted.unitary == measured.unitary;
    let top_ok = predicted.top.is_none() || predicted.top == measured.top;
    Ok(Classification {
        top: omega.clone(),
        branch,
        transposed,
        algebra: algebra_label(&label),
        label,
        parts,
        predicted,
        measured,
        matches: rank_ok && unitary_ok && top_ok,
        note: MINIATURE_NOTE,
    })
}

/// Returns the branch, the label and whether the single edge, if any, is the
/// top row rather than the top column.
fn case_analysis(k: &Region, omega: &Ordinal, bound: usize, parts: &mut Vec<Part>) -> Result<(Branch, ClassLabel, bool)> {
    if !cofinal(&k.project_x(), omega) && !cofinal(&k.project_y(), omega) {
        return Ok((Branch::Bounded, ClassLabel::Countable { sigma: region_type(k, bound)? }, false));
    }
    let t = k.row(omega).below(omega);
    let r = k.column(omega).below(omega);
    let full = StrataSet::full(omega);
    match (t.min(), r.min()) {
        (Some(alpha), Some(beta)) => {
            let delta = alpha.max(beta);
            let low = StrataSet::interval(omega, &Ordinal::zero(), &delta);
            let high = full.above(&delta);
            let u = k.restrict(&full, &low);
            let v = k.restrict(&low, &high);
            let w = k.restrict(&high, &high);
            let cover = u.union(&v)?.union(&w)?;
            let disjoint = [(&u, &v), (&u, &w), (&v, &w)].iter().all(|(a, b)| a.intersect(b).map(|x| x.is_empty()).unwrap_or(false));
            if !cover.set_eq(k) || !disjoint {
                return Err(Error::domain("the three-part split does not partition the region"));
            }
            let mut labels = Vec::new();
            for (name, part, label) in [
                ("U", &u, if u.is_empty() { None } else { Some(strip_with(&u, &delta, bound)?) }),
                ("V", &v, if v.is_empty() { None } else { Some(strip_with(&v.transpose(), &delta, bound)?) }),
                ("W", &w, if w.is_empty() { None } else { Some(square_part(&w, omega)?) }),
            ] {
                let sublattice = part.is_sublattice()?;
                if !sublattice {
                    return Err(Error::domain(format!("part {name} is not a sublattice")));
                }
                labels.extend(label.clone());
                parts.push(Part { name, region: part.to_string(), label, sublattice });
            }
            Ok((Branch::BothEdges, combine(labels)?, false))
        }
        (None, None) => Ok((Branch::NoEdge, ClassLabel::OrdinalSpace { long: region_type(k, bound)? }, false)),
        (Some(_), None) => one_edge(&k.transpose(), omega, bound).map(|(b, l)| (b, l, true)),
        (None, Some(_)) => one_edge(k, omega, bound).map(|(b, l)| (b, l, false)),
    }
}

/// The upper-right part `W = A' × B'`.
fn square_part(w: &Region, omega: &Ordinal) -> Result<ClassLabel> {
    let a0 = w.row(omega).min().ok_or_else(|| Error::domain("upper part misses the top row"))?;
    let b0 = w.column(omega).min().ok_or_else(|| Error::domain("upper part misses the top column"))?;
    let (a, b) = rectangle_sides(w, &a0, omega, &b0, omega)?;
    if !w.set_eq(&Region::product(&a, &b)) {
        return Err(Error::domain("upper part is not a rectangle"));
    }
    let (ta, tb) = (set_type(&a)?, set_type(&b)?);
    Ok(match (cofinal(&a, omega), cofinal(&b, omega)) {
        (true, true) if ta == tb => ClassLabel::FullSquare { long: ta },
        (true, true) => return Err(Error::unsupported("square part with sides of different types")),
        (true, false) => ClassLabel::Plank { long: ta, gamma: tb },
        (false, true) => ClassLabel::Plank { long: tb, gamma: ta },
        (false, false) => {
            let (ra, ca) = rank_count(&ta);
            let (rb, cb) = rank_count(&tb);
            ClassLabel::Countable { sigma: line_type(&ra.natural_sum(&rb), ca * cb) }
        }
    })
}

/// Branch where only the top column meets `[0, Ω)`.
fn one_edge(k: &Region, omega: &Ordinal, bound: usize) -> Result<(Branch, ClassLabel)> {
    let full = StrataSet::full(omega);
    let inner_y = k.restrict(&full.below(omega), &full).project_y();
    let column = k.column(omega);
    if cofinal(&inner_y, omega) {
        return Ok((Branch::OneEdgeUnbounded, ClassLabel::Triangle { long: set_type(&column)? }));
    }
    let delta = inner_y.sup();
    let u = k.restrict(&full, &StrataSet::interval(omega, &Ordinal::zero(), &delta));
    let mut labels = Vec::new();
    if !u.is_empty() {
        labels.push(strip_with(&u, &delta, bound)?);
    }
    let upper = column.above(&delta);
    if !upper.is_empty() {
        let ty = set_type(&upper)?;
        labels.push(if cofinal(&upper, omega) { ClassLabel::OrdinalSpace { long: ty } } else { ClassLabel::Countable { sigma: ty } });
    }
    Ok((Branch::OneEdgeBounded, combine(labels)?))
}

/// A named region of the shipped catalog with its expected label.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub top: Ordinal,
    pub region: Region,
    pub expected: String,
}

/// Regions covering every branch: planks, squares, triangles, club planks
/// `Ĉ × [0, ν]`, and shapes with bounded lobes removed.
pub fn catalog() -> Vec<CatalogEntry> {
    use crate::ordinal::ord;
    let mut out = Vec::new();
    let mut add = |name: &'static str, top: &str, src: &str, expected: &str| {
        let top = ord(top);
        let text = format!("ambient {top} {top}\n{src}");
        let region = Region::parse(&text, &Default::default()).unwrap_or_else(|e| panic!("{name}: {e}"));
        out.push(CatalogEntry { name, top, region, expected: expected.into() });
    };
    add("plank-w3-w", "w^3", "box [0,w^3] x [0,w]", "Plank(w)");
    add("plank-w3-w2", "w^3", "box [0,w^3] x [0,w^2]", "Plank(w^2)");
    add("plank-w2-w2", "w^2", "box [0,w^2] x [0,w*2]", "Plank(w*2)");
    add("plank-w2-5", "w^2", "box [0,w^2] x [0,5]", "Plank(5)");
    add("plank-w-3", "w", "box [0,w] x [0,3]", "Plank(3)");
    add("plank-transposed", "w^2", "box [0,w] x [0,w^2]", "Plank(w)");
    add("plank-lobe", "w^3", "box [0,w^3] x [0,w]\nbox [w+1,w^3] x [0,w^2]", "Plank(w^2)");
    add("plank-tail", "w^2", "box [w*3,w^2] x [0,w]", "Plank(w)");
    add("square-w", "w", "box [0,w] x [0,w]", "FullSquare");
    add("square-w2", "w^2", "box [0,w^2] x [0,w^2]", "FullSquare");
    add("square-lobe", "w^3", "box [0,w^3] x [0,w]\nbox [w+1,w^3] x [0,w^3]", "FullSquare");
    add("square-lobe-transposed", "w^3", "box [0,w] x [0,w^3]\nbox [0,w^3] x [w+1,w^3]", "FullSquare");
    add("triangle-w", "w", "tri [0,w] x [0,w]", "Triangle");
    add("triangle-w2", "w^2", "tri [0,w^2] x [0,w^2]", "Triangle");
    add("triangle-w3", "w^3", "tri [0,w^3] x [0,w^3]", "Triangle");
    add("triangle-upper", "w^2", "piece ge [0,w^2] x [0,w^2]", "Triangle");
    add("triangle-lobe", "w^2", "tri [0,w] x [0,w]\ntri [w+1,w^2] x [w+1,w^2]", "Triangle");
    add("triangle-with-box", "w^2", "tri [0,w^2] x [0,w^2]\nbox [0,w] x [0,w]", "Triangle");
    add("diagonal", "w^2", "piece eq [0,w^2] x [0,w^2]", "OrdinalSpace");
    add("bottom-row", "w^3", "box [0,w^3] x {0}", "OrdinalSpace");
    add("left-column", "w^2", "box {0} x [0,w^2]", "OrdinalSpace");
    add("bounded-box", "w^2", "box [0,w] x [0,w]", "Countable(w^2)");
    add("bounded-points", "w", "box {0,3} x {0,3}", "Countable(3)");
    let mut club = |name: &'static str, gens: &[&str], nu: Option<&str>, expected: &str| {
        let spec = crate::construct::ClubSpec::new(gens.iter().map(|g| ord(g)).collect(), None).expect("valid club");
        let hat = crate::construct::close_club(&crate::construct::club_of_partial_sums(&spec)).expect("closed club");
        let top = hat.top().clone();
        let side = match nu {
            Some(nu) => StrataSet::full(&ord(nu)).with_top(&top),
            None => hat.clone(),
        };
        out.push(CatalogEntry { name, region: Region::product(&hat, &side), top, expected: expected.into() });
    };
    club("club-plank", &["w", "w^2"], Some("w"), "Plank(w)");
    club("club-plank-wide", &["w", "w^2"], Some("w^2"), "Plank(w^2)");
    club("club-plank-far", &["w", "w^3"], Some("w"), "Plank(w)");
    club("club-square", &["w", "w^2"], None, "FullSquare");
    out
}

/// Outcome of the random rectangle-identity regression.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelftestReport {
    pub lattices: usize,
    pub rectangles: usize,
    pub region_checks: usize,
    pub failures: Vec<String>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

type Pt = (u8, u8);

fn closure_small(seed: &[Pt]) -> BTreeSet<Pt> {
    let mut set: BTreeSet<Pt> = seed.iter().copied().collect();
    loop {
        let pts: Vec<Pt> = set.iter().copied().collect();
        let before = set.len();
        for p in &pts {
            for q in &pts {
                set.insert((p.0.min(q.0), p.1.min(q.1)));
                set.insert((p.0.max(q.0), p.1.max(q.1)));
            }
        }
        if set.len() == before {
            return set;
        }
    }
}

/// Closes random point sets in `[0, side]²` under meet and join and checks
/// the rectangle identity at every admissible pair of corners by brute force.
/// The first admissible rectangle of each lattice is also checked through
/// [`rectangle_sides`].
pub fn rectangle_selftest(seed: u64, count: usize, side: u8) -> SelftestReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SelftestReport { lattices: 0, rectangles: 0, region_checks: 0, failures: Vec::new() };
    let n = |v: u8| Ordinal::nat(v as u64);
    for _ in 0..count {
        let size = rng.gen_range(1..=5);
        let seed_pts: Vec<Pt> = (0..size).map(|_| (rng.gen_range(0..=side), rng.gen_range(0..=side))).collect();
        let k = closure_small(&seed_pts);
        report.lattices += 1;
        let mut checked_region = false;
        for &(a0, b1) in &k {
            for &(a1, b0) in &k {
                if a0 > a1 || b0 > b1 {
                    continue;
                }
                report.rectangles += 1;
                let a: Vec<u8> = (a0..=a1).filter(|x| k.contains(&(*x, b0))).collect();
                let b: Vec<u8> = (b0..=b1).filter(|y| k.contains(&(a0, *y))).collect();
                let inside: BTreeSet<Pt> = k.iter().copied().filter(|p| (a0..=a1).contains(&p.0) && (b0..=b1).contains(&p.1)).collect();
                let product: BTreeSet<Pt> = a.iter().flat_map(|x| b.iter().map(move |y| (*x, *y))).collect();
                if inside != product {
                    report.failures.push(format!("{k:?} at [{a0},{a1}]x[{b0},{b1}]"));
                }
                if !checked_region {
                    checked_region = true;
                    report.region_checks += 1;
                    let pts: Vec<(Ordinal, Ordinal)> = k.iter().map(|p| (n(p.0), n(p.1))).collect();
                    let region = Region::points(&n(side), &n(side), &pts);
                    match rectangle_sides(&region, &n(a0), &n(a1), &n(b0), &n(b1)) {
                        Ok((ra, rb)) => {
                            let want_a = StrataSet::finite(&n(side), &a.iter().map(|x| n(*x)).collect::<Vec<_>>());
                            let want_b = StrataSet::finite(&n(side), &b.iter().map(|y| n(*y)).collect::<Vec<_>>());
                            if !ra.set_eq(&want_a) || !rb.set_eq(&want_b) {
                                report.failures.push(format!("{k:?}: region sides {ra} x {rb}"));
                            }
                        }
                        Err(e) => report.failures.push(format!("{k:?}: {e}")),
                    }
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::ord;

    #[test]
    fn rectangle_of_a_small_closure() {
        let k = Region::lattice_closure(&[(ord("0"), ord("3")), (ord("3"), ord("0"))]);
        let (a, b) = rectangle_sides(&k, &ord("0"), &ord("3"), &ord("0"), &ord("3")).unwrap();
        assert_eq!(a.finite_points().unwrap(), vec![ord("0"), ord("3")]);
        assert_eq!(b.finite_points().unwrap(), vec![ord("0"), ord("3")]);
        let bad = Region::points(&ord("3"), &ord("3"), &[(ord("0"), ord("3")), (ord("3"), ord("0"))]);
        assert!(rectangle_sides(&bad, &ord("0"), &ord("3"), &ord("0"), &ord("3")).is_err());
    }

    #[test]
    fn reference_labels() {
        let top = ord("w^3");
        let plank = Region::product(&StrataSet::full(&top), &StrataSet::full(&ord("w")).with_top(&top));
        let c = classify(&plank, &top).unwrap();
        assert_eq!(c.label.to_string(), "Plank(w)");
        assert_eq!(c.branch, Branch::OneEdgeBounded);
        assert!(c.matches, "{c}");
        let tri = Region::triangle(&StrataSet::full(&top), &StrataSet::full(&top));
        assert_eq!(classify(&tri, &top).unwrap().label.to_string(), "Triangle");
        let sq = Region::full_box(&top, &top);
        let c = classify(&sq, &top).unwrap();
        assert_eq!(c.label, ClassLabel::FullSquare { long: top.clone() });
        assert_eq!(c.parts.len(), 3);
    }

    #[test]
    fn bounded_short_side() {
        let top = ord("w^3");
        let k = Region::parse("ambient w^3 w^3\nbox [0,w^3] x [0,w]\nbox [w+1,w^3] x [0,w^2]", &Default::default()).unwrap();
        assert_eq!(strip_decompose(&k, &ord("w^2")).unwrap(), ClassLabel::Plank { long: top, gamma: ord("w^2") });
        let small = Region::parse("ambient w^3 w^3\nbox [0,w] x [0,w]", &Default::default()).unwrap();
        assert_eq!(strip_decompose(&small, &ord("w")).unwrap(), ClassLabel::Countable { sigma: ord("w^2") });
    }

    #[test]
    fn algebra_names() {
        assert_eq!(algebra_label(&ClassLabel::Triangle { long: ord("w") }), "F(ω₁×2)");
        assert_eq!(algebra_label(&ClassLabel::Plank { long: ord("w^2"), gamma: ord("w") }), "F(ω₁⊎ω)");
        assert_eq!(algebra_label(&ClassLabel::FullSquare { long: ord("w") }), "F(ω₁⊎ω₁)");
        assert_eq!(algebra_label(&ClassLabel::OrdinalSpace { long: ord("w") }), "F(ω₁)");
    }

    #[test]
    fn catalog_is_classified() {
        for e in catalog() {
            let c = classify(&e.region, &e.top).unwrap_or_else(|err| panic!("{}: {err}", e.name));
            assert_eq!(c.label.to_string(), e.expected, "{}", e.name);
            assert!(c.matches, "{}:\n{c}", e.name);
        }
    }

    #[test]
    fn small_selftest() {
        let r = rectangle_selftest(7, 50, 8);
        assert!(r.passed(), "{:?}", r.failures);
        assert_eq!(r.lattices, 50);
    }
}
