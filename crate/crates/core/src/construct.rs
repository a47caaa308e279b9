//! Clubs of partial sums, the spaces `X(C)`, their rank spectra, and the
//! vector-sum family generator.
//!
//! A club is built from a generator set `A` of indecomposable ordinals and
//! an index `ω·m`: block `j` adds `ω` copies of `A[j mod |A|]`, so
//! `λ` runs through `s_j + γ_j·n` inside block `j` and the block ends at
//! `s_{j+1} = s_j + ω^{ln γ_j + 1}`. Each block is a single strata atom.
//! Interleaving the generators one by one over an infinite index would
//! produce infinitely many atoms, which a strata set cannot hold.

use crate::error::{Error, Result};
use crate::ordinal::Ordinal;
use crate::region::{PointRank, Region, Rel, Piece};
use crate::spaceterm::SpaceTerm;
use crate::strata::{Bound, StrataSet};
use serde::Serialize;
use std::collections::BTreeSet;

/// Generators and index of a club of partial sums.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClubSpec {
    pub generators: Vec<Ordinal>,
    /// Index ordinal `ω·m`.
    pub index: Ordinal,
}

impl ClubSpec {
    /// Validates the generators; the index defaults to `ω·|A|`.
    pub fn new(generators: Vec<Ordinal>, index: Option<Ordinal>) -> Result<ClubSpec> {
        if generators.len() < 2 {
            return Err(Error::domain(format!("need at least two generators, got {}", generators.len())));
        }
        for g in &generators {
            if !g.is_power() || g.is_zero() {
                return Err(Error::domain(format!("generator {g} is not indecomposable")));
            }
            if g.is_finite() {
                return Err(Error::domain(format!("generator {g} has ln 0, which cannot be told apart from edge ranks")));
            }
        }
        let distinct: BTreeSet<&Ordinal> = generators.iter().collect();
        if distinct.len() != generators.len() {
            return Err(Error::domain("generators must be distinct"));
        }
        let index = index.unwrap_or_else(|| Ordinal::omega().mul_nat(&(generators.len() as u64).into()));
        let spec = ClubSpec { generators, index };
        let m = spec.blocks()?;
        if m < spec.generators.len() {
            return Err(Error::domain(format!(
                "index {} has {m} blocks, too few to use all {} generators",
                spec.index,
                spec.generators.len()
            )));
        }
        Ok(spec)
    }

    /// Number of blocks `m` in the index `ω·m`.
    fn blocks(&self) -> Result<usize> {
        let cnf = self.index.cnf();
        match cnf.as_slice() {
            [(e, m)] if *e == Ordinal::one() => usize::try_from(m.clone()).map_err(|_| Error::TooLarge(format!("index {}", self.index))),
            _ => Err(Error::unsupported(format!(
                "index {} is not of the form w*m; only block schedules over w*m give a club with finitely many strata atoms",
                self.index
            ))),
        }
    }

    /// `(s_j, γ_j)` for each block, plus the final sum `Λ`.
    fn block_starts(&self) -> (Vec<(Ordinal, Ordinal)>, Ordinal) {
        let m = self.blocks().expect("validated");
        let mut s = Ordinal::zero();
        let mut out = Vec::with_capacity(m);
        for j in 0..m {
            let g = self.generators[j % self.generators.len()].clone();
            let next = s.add(&Ordinal::omega_pow(&g.ln().expect("nonzero").succ()));
            out.push((s, g));
            s = next;
        }
        (out, s)
    }

    /// `λ` at the first few successor indices of every block.
    pub fn successor_sums(&self, per_block: usize) -> Vec<Ordinal> {
        let (blocks, _) = self.block_starts();
        let mut out = Vec::new();
        for (s, g) in blocks {
            let mut x = s;
            for _ in 0..per_block {
                x = x.add(&g);
                out.push(x.clone());
            }
        }
        out
    }
}

/// The first `n` partial sums of the cyclic schedule `A[0], A[1], ...`.
pub fn cyclic_partial_sums(generators: &[Ordinal], n: usize) -> Vec<Ordinal> {
    let mut acc = Ordinal::zero();
    (0..n)
        .map(|i| {
            acc = acc.add(&generators[i % generators.len()]);
            acc.clone()
        })
        .collect()
}

/// The closed club `Â = { λ_β : 0 < β ≤ index }` inside `[0, Λ]`.
pub fn club_of_partial_sums(spec: &ClubSpec) -> StrataSet {
    let (blocks, lambda) = spec.block_starts();
    let mut atoms = Vec::new();
    for (j, (s, g)) in blocks.iter().enumerate() {
        let e = g.ln().expect("nonzero");
        let end = blocks.get(j + 1).map(|b| b.0.clone()).unwrap_or_else(|| lambda.clone());
        atoms.push((s.clone(), end.clone(), e.clone(), Bound::Fin(e.succ())));
        atoms.push((end.clone(), end.succ(), Ordinal::zero(), Bound::Inf));
    }
    StrataSet::from_atoms(&lambda, atoms)
}

/// `C ∪ {sup C}` in `[0, sup C]`, checking that `C` is closed below its
/// supremum and unbounded in it. A set whose maximum is a limit of its
/// other points is taken to contain its supremum already.
pub fn close_club(club: &StrataSet) -> Result<StrataSet> {
    if club.is_empty() {
        return Err(Error::domain("empty club"));
    }
    let lambda = match club.max_or_sup().expect("nonempty") {
        Ok(m) => {
            let rest = club.below(&m);
            if rest.is_empty() || rest.max().is_some() {
                return Err(Error::domain(format!("club is bounded below its largest point {m}")));
            }
            m
        }
        Err(s) => s,
    };
    let hat = club.with_top(&lambda).u(&StrataSet::singleton(&lambda, &lambda));
    if !hat.is_closed() {
        return Err(Error::domain(format!("club is not closed: missing limit points {}", hat.acc().d(&hat))));
    }
    Ok(hat)
}

pub(crate) fn check_nu(nu: &Ordinal) -> Result<()> {
    if nu.is_limit() {
        Ok(())
    } else {
        Err(Error::domain(format!("second factor {nu} is not a limit ordinal")))
    }
}

/// `([0, Λ] × {ν}) ∪ (Ĉ × [0, ν])`.
pub fn build_xc(club: &StrataSet, nu: &Ordinal) -> Result<Region> {
    let hat = close_club(club)?;
    check_nu(nu)?;
    let lambda = hat.top().clone();
    Ok(Region::from_pieces(
        &lambda,
        nu,
        [
            Piece::new(StrataSet::full(&lambda), StrataSet::singleton(nu, nu), Rel::ALL),
            Piece::new(hat, StrataSet::full(nu), Rel::ALL),
        ],
    ))
}

/// A closed box with two infinite sides inside the region, if some piece is one.
pub fn plank_witness(region: &Region) -> Option<(StrataSet, StrataSet)> {
    region
        .pieces()
        .iter()
        .find(|p| {
            p.rel == Rel::ALL && p.s.is_closed() && p.t.is_closed() && !p.s.order_type().is_finite() && !p.t.order_type().is_finite()
        })
        .map(|p| (p.s.clone(), p.t.clone()))
}

/// Ranks at the isolated club points of `X(C)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectrumReport {
    pub club: StrataSet,
    pub lambda: Ordinal,
    pub nu: Ordinal,
    /// One probe per class of isolated club points: the point and its rank
    /// measured by derivative iteration on the region.
    pub probes: Vec<(Ordinal, PointRank)>,
    /// The spectrum measured on the region.
    pub oracle: BTreeSet<Ordinal>,
    /// `max(le λ, rank [0, ν])` over partial sums at successor indices.
    pub symbolic: BTreeSet<Ordinal>,
}

impl SpectrumReport {
    pub fn agrees(&self) -> bool {
        self.oracle == self.symbolic && self.probes.iter().all(|(_, r)| matches!(r, PointRank::Known(_)))
    }
}

/// Isolated points of `Ĉ`, one per value of `le`, with every atom required
/// to span finitely many exponents.
fn isolated_probes(hat: &StrataSet) -> Result<Vec<Ordinal>> {
    let iso = hat.isolated_points();
    let mut out = BTreeSet::new();
    for a in iso.atoms() {
        let Bound::Fin(hi) = &a.hi else {
            return Err(Error::unsupported("isolated club points with unbounded exponents"));
        };
        let span = a.lo.left_sub(hi).ok_or_else(|| Error::domain("empty exponent range"))?;
        let n = span.as_u64().ok_or_else(|| Error::unsupported("isolated club points over infinitely many exponents"))?;
        let mut e = a.lo.clone();
        for _ in 0..n {
            let layer = StrataSet::from_atoms(hat.top(), [(a.start.clone(), a.end.clone(), e.clone(), Bound::Fin(e.succ()))]);
            if let Some(x) = iso.i(&layer).min() {
                out.insert(x);
            }
            e = e.succ();
        }
    }
    Ok(out.into_iter().collect())
}

/// Rank spectrum of `X(Â)` for a club spec, by both paths.
pub fn rank_spectrum(spec: &ClubSpec, nu: &Ordinal, bound: usize) -> Result<SpectrumReport> {
    let club = club_of_partial_sums(spec);
    let floor = nu.rank_of_ordinal_space();
    let symbolic = spec.successor_sums(2).iter().map(|l| l.le().max(floor.clone())).collect();
    spectrum_of_club(&club, nu, symbolic, bound)
}

/// Rank spectrum of `X(C)` for an arbitrary club; the symbolic path reads
/// `le` off the probe points.
pub fn rank_spectrum_of_club(club: &StrataSet, nu: &Ordinal, bound: usize) -> Result<SpectrumReport> {
    let hat = close_club(club)?;
    let floor = nu.rank_of_ordinal_space();
    let symbolic = isolated_probes(&hat)?.iter().map(|c| c.le().max(floor.clone())).collect();
    spectrum_of_club(club, nu, symbolic, bound)
}

fn spectrum_of_club(club: &StrataSet, nu: &Ordinal, symbolic: BTreeSet<Ordinal>, bound: usize) -> Result<SpectrumReport> {
    let region = build_xc(club, nu)?;
    let hat = close_club(club)?;
    let mut probes = Vec::new();
    let mut oracle = BTreeSet::new();
    for c in isolated_probes(&hat)? {
        let r = region.point_rank(&c, nu, bound)?;
        if let PointRank::Known(k) = &r {
            oracle.insert(k.clone());
        }
        probes.push((c, r));
    }
    Ok(SpectrumReport { lambda: hat.top().clone(), club: hat, nu: nu.clone(), probes, oracle, symbolic })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Separation {
    pub separated: bool,
    pub a: SpectrumReport,
    pub b: SpectrumReport,
}

/// Separates `X(Â)` from `X(B̂)` when their measured spectra differ.
pub fn separate(a: &ClubSpec, b: &ClubSpec, nu: &Ordinal, bound: usize) -> Result<Separation> {
    let ra = rank_spectrum(a, nu, bound)?;
    let rb = rank_spectrum(b, nu, bound)?;
    Ok(Separation { separated: ra.oracle != rb.oracle, a: ra, b: rb })
}

/// One vector sum per subset, cycling through the chosen `Ys` `ρ` times.
pub fn family_generator(ys: &[SpaceTerm], subsets: &[Vec<usize>], rho: &Ordinal) -> Result<Vec<SpaceTerm>> {
    for s in subsets {
        if s.len() < 2 {
            return Err(Error::domain(format!("subset {s:?} has fewer than two elements")));
        }
        if let Some(i) = s.iter().find(|&&i| i >= ys.len()) {
            return Err(Error::domain(format!("subset index {i} out of range")));
        }
    }
    let ranks = ys.iter().map(SpaceTerm::rank).collect::<Result<Vec<_>>>()?;
    if let Some(r) = ranks.iter().find(|r| *r != &ranks[0]) {
        return Err(Error::domain(format!("summands must share one rank, found {} and {}", ranks[0], r)));
    }
    subsets
        .iter()
        .map(|s| {
            let t = SpaceTerm::VecSum(rho.clone(), s.iter().map(|&i| ys[i].clone()).collect());
            t.rank()?;
            Ok(t)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::ord;
    use crate::region::DEFAULT_BOUND;

    fn spec(gens: &[&str]) -> ClubSpec {
        ClubSpec::new(gens.iter().map(|g| ord(g)).collect(), None).unwrap()
    }

    #[test]
    fn cyclic_prefix() {
        let got = cyclic_partial_sums(&[ord("w"), ord("w^2")], 4);
        assert_eq!(got, vec![ord("w"), ord("w^2"), ord("w^2 + w"), ord("w^2*2")]);
    }

    #[test]
    fn block_club() {
        let s = spec(&["w", "w^2"]);
        let c = club_of_partial_sums(&s);
        assert_eq!(c.top(), &ord("w^3"));
        assert!(c.is_closed());
        for x in ["w", "w*5", "w^2", "w^2*2", "w^2*7", "w^3"] {
            assert!(c.contains(&ord(x)), "{x}");
        }
        for x in ["0", "w + 1", "w^2 + w", "w^2*2 + w"] {
            assert!(!c.contains(&ord(x)), "{x}");
        }
        assert!(ClubSpec::new(vec![ord("1"), ord("w")], None).is_err());
        assert!(ClubSpec::new(vec![ord("w")], None).is_err());
        assert!(ClubSpec::new(vec![ord("w"), ord("w*2")], None).is_err());
        assert!(matches!(ClubSpec::new(vec![ord("w"), ord("w^2")], Some(ord("w"))), Err(Error::Domain(_))));
        assert!(matches!(ClubSpec::new(vec![ord("w"), ord("w^2")], Some(ord("7"))), Err(Error::Unsupported(_))));
    }

    #[test]
    fn xc_rank() {
        let s = spec(&["w", "w^2"]);
        let club = club_of_partial_sums(&s);
        let x = build_xc(&club, &ord("w")).unwrap();
        assert_eq!(x.ambient(), (&ord("w^3"), &ord("w")));
        assert_eq!(x.cb_rank_finite(DEFAULT_BOUND), crate::region::CbOutcome::Rank(3));
        let t = SpaceTerm::XC(club, ord("w"));
        assert_eq!(t.rank().unwrap(), ord("3"));
        assert!(plank_witness(&x).is_some());
        assert!(build_xc(&StrataSet::empty(&ord("w")), &ord("w")).is_err());
    }

    #[test]
    fn spectra() {
        let r = rank_spectrum(&spec(&["w", "w^2"]), &ord("w"), DEFAULT_BOUND).unwrap();
        assert_eq!(r.oracle, [ord("1"), ord("2")].into_iter().collect());
        assert!(r.agrees());
        let r = rank_spectrum(&spec(&["w^2", "w^3"]), &ord("w"), DEFAULT_BOUND).unwrap();
        assert_eq!(r.symbolic, [ord("2"), ord("3")].into_iter().collect());
        assert!(r.agrees());
        let sep = separate(&spec(&["w", "w^2"]), &spec(&["w", "w^3"]), &ord("w"), DEFAULT_BOUND).unwrap();
        assert!(sep.separated);
        let same = separate(&spec(&["w", "w^2"]), &spec(&["w", "w^2"]), &ord("w"), DEFAULT_BOUND).unwrap();
        assert!(!same.separated);
    }

    #[test]
    fn families() {
        let ys = vec![SpaceTerm::K(ord("e0")), SpaceTerm::K(ord("e1"))];
        assert!(family_generator(&ys, &[vec![0, 1], vec![0]], &ord("w")).is_err());
        let ys = vec![SpaceTerm::Ord(ord("w^4")), SpaceTerm::K(ord("w^2")), SpaceTerm::Tri(ord("w^2"))];
        let fam = family_generator(&ys, &[vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 1, 2]], &ord("w")).unwrap();
        let vs: Vec<_> = fam.iter().map(SpaceTerm::invariant_vector).collect();
        for i in 0..vs.len() {
            for j in 0..vs.len() {
                assert_eq!(vs[i].separates(&vs[j]), i != j);
            }
        }
    }
}
