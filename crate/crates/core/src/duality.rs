//! Finite posets, their lattices of final segments, and the free Boolean
//! algebra over a poset.
//!
//! Final segments are ordered by reversed inclusion throughout: the join of
//! two final segments is their intersection, `0` is the whole poset and `1`
//! is the empty set.

use crate::error::{Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

/// A finite strict partial order with labelled elements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FinPoset {
    labels: Vec<String>,
    /// `lt[i][j]` iff `i < j`; transitively closed.
    lt: Vec<Vec<bool>>,
}

impl FinPoset {
    /// Builds a poset from a relation, taking its transitive closure.
    pub fn new(labels: Vec<String>, pairs: &[(usize, usize)]) -> Result<FinPoset> {
        let n = labels.len();
        let mut lt = vec![vec![false; n]; n];
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(Error::domain(format!("element index out of range in {a} < {b}")));
            }
            lt[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if lt[i][k] {
                    for j in 0..n {
                        if lt[k][j] {
                            lt[i][j] = true;
                        }
                    }
                }
            }
        }
        if let Some(i) = (0..n).find(|&i| lt[i][i]) {
            return Err(Error::domain(format!("relation has a cycle through `{}`", labels[i])));
        }
        Ok(FinPoset { labels, lt })
    }

    fn numbered(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    pub fn antichain(n: usize) -> FinPoset {
        FinPoset::new(FinPoset::numbered(n), &[]).expect("antichain")
    }

    pub fn chain(n: usize) -> FinPoset {
        let pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        FinPoset::new(FinPoset::numbered(n), &pairs).expect("chain")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        self.lt[a][b]
    }

    pub fn le(&self, a: usize, b: usize) -> bool {
        a == b || self.lt[a][b]
    }

    /// Cover pairs of the Hasse diagram.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if self.lt[a][b] && !(0..n).any(|c| self.lt[a][c] && self.lt[c][b]) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Side-by-side union with no comparabilities across the parts.
    pub fn disjoint_sum(&self, other: &FinPoset) -> FinPoset {
        FinPoset::lex_sum_with(&[self.clone(), other.clone()], |_, _| false)
    }

    /// Lexicographic sum along a chain: every element of an earlier part is
    /// below every element of a later one.
    pub fn lex_sum(parts: &[FinPoset]) -> FinPoset {
        FinPoset::lex_sum_with(parts, |i, j| i < j)
    }

    fn lex_sum_with(parts: &[FinPoset], index_lt: impl Fn(usize, usize) -> bool) -> FinPoset {
        let mut labels = Vec::new();
        let mut owner = Vec::new();
        for (k, p) in parts.iter().enumerate() {
            for (i, l) in p.labels.iter().enumerate() {
                labels.push(if parts.len() > 1 { format!("{k}.{l}") } else { l.clone() });
                owner.push((k, i));
            }
        }
        let n = labels.len();
        let mut lt = vec![vec![false; n]; n];
        for a in 0..n {
            for b in 0..n {
                let ((ka, ia), (kb, ib)) = (owner[a], owner[b]);
                lt[a][b] = if ka == kb { parts[ka].lt[ia][ib] } else { index_lt(ka, kb) };
            }
        }
        FinPoset { labels, lt }
    }

    /// The order-dual poset.
    pub fn dual(&self) -> FinPoset {
        let n = self.len();
        let lt = (0..n).map(|a| (0..n).map(|b| self.lt[b][a]).collect()).collect();
        FinPoset { labels: self.labels.clone(), lt }
    }

    /// Isomorphism of the underlying orders, ignoring labels.
    pub fn is_isomorphic(&self, other: &FinPoset) -> bool {
        self.isomorphism(other).is_some()
    }

    /// An order isomorphism `self → other`, found by backtracking with
    /// up/down degrees as pruning.
    pub fn isomorphism(&self, other: &FinPoset) -> Option<Vec<usize>> {
        let n = self.len();
        if n != other.len() {
            return None;
        }
        let sig = |p: &FinPoset, a: usize| {
            let up = (0..n).filter(|&b| p.lt[a][b]).count();
            let down = (0..n).filter(|&b| p.lt[b][a]).count();
            (up, down)
        };
        let sa: Vec<_> = (0..n).map(|a| sig(self, a)).collect();
        let sb: Vec<_> = (0..n).map(|a| sig(other, a)).collect();
        let mut ca = sa.clone();
        let mut cb = sb.clone();
        ca.sort();
        cb.sort();
        if ca != cb {
            return None;
        }
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        fn go(a: usize, p: &FinPoset, q: &FinPoset, sa: &[(usize, usize)], sb: &[(usize, usize)], map: &mut [usize], used: &mut [bool]) -> bool {
            let n = map.len();
            if a == n {
                return true;
            }
            for b in 0..n {
                if used[b] || sa[a] != sb[b] {
                    continue;
                }
                if (0..a).any(|c| p.lt[a][c] != q.lt[b][map[c]] || p.lt[c][a] != q.lt[map[c]][b]) {
                    continue;
                }
                map[a] = b;
                used[b] = true;
                if go(a + 1, p, q, sa, sb, map, used) {
                    return true;
                }
                used[b] = false;
            }
            false
        }
        go(0, self, other, &sa, &sb, &mut map, &mut used).then_some(map)
    }

    /// Up-closed subsets, as bitmasks over the elements.
    pub fn final_segment_masks(&self) -> Vec<u64> {
        let n = self.len();
        assert!(n <= 20, "poset too large for final-segment enumeration");
        (0u64..(1 << n))
            .filter(|&m| (0..n).all(|a| m >> a & 1 == 0 || (0..n).all(|b| !self.lt[a][b] || m >> b & 1 == 1)))
            .collect()
    }

    fn mask_label(&self, m: u64) -> String {
        let names: Vec<&str> = (0..self.len()).filter(|&a| m >> a & 1 == 1).map(|a| self.labels[a].as_str()).collect();
        format!("{{{}}}", names.join(","))
    }

    /// Parses `poset <n> [labels...]` followed by lines `a < b [< c ...]`.
    pub fn parse(src: &str) -> Result<FinPoset> {
        let mut labels: Option<Vec<String>> = None;
        let mut pairs = Vec::new();
        let mut offset = 0;
        for line in src.lines() {
            let start = offset;
            offset += line.len() + 1;
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { pos: start, msg };
            let mut words = body.split_whitespace();
            if labels.is_none() {
                if words.next() != Some("poset") {
                    return Err(err("expected header `poset <n>`".into()));
                }
                let n: usize = words
                    .next()
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| err("expected element count after `poset`".into()))?;
                let names: Vec<String> = words.map(str::to_string).collect();
                labels = Some(if names.is_empty() {
                    FinPoset::numbered(n)
                } else if names.len() == n {
                    names
                } else {
                    return Err(err(format!("header lists {} labels for {n} elements", names.len())));
                });
                continue;
            }
            let names = labels.as_ref().expect("header read");
            let index = |w: &str| names.iter().position(|l| l == w).ok_or_else(|| err(format!("unknown element `{w}`")));
            let parts: Vec<&str> = body.split('<').map(str::trim).collect();
            if parts.len() < 2 || parts.iter().any(|p| p.is_empty()) {
                return Err(err("expected `a < b`".into()));
            }
            for w in parts.windows(2) {
                pairs.push((index(w[0])?, index(w[1])?));
            }
        }
        let labels = labels.ok_or_else(|| Error::Parse { pos: 0, msg: "missing `poset <n>` header".into() })?;
        FinPoset::new(labels, &pairs)
    }
}

impl fmt::Display for FinPoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "poset {}", self.len())?;
        if self.labels != FinPoset::numbered(self.len()) {
            write!(f, " {}", self.labels.join(" "))?;
        }
        writeln!(f)?;
        for (a, b) in self.covers() {
            writeln!(f, "{} < {}", self.labels[a], self.labels[b])?;
        }
        Ok(())
    }
}

/// Every labelled poset on `{0, ..., n-1}`.
pub fn all_posets(n: usize) -> Vec<FinPoset> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let total = 3usize.pow(pairs.len() as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let mut lt = vec![vec![false; n]; n];
        for &(a, b) in &pairs {
            match c % 3 {
                1 => lt[a][b] = true,
                2 => lt[b][a] = true,
                _ => {}
            }
            c /= 3;
        }
        let transitive = (0..n).all(|a| (0..n).all(|b| !lt[a][b] || (0..n).all(|c| !lt[b][c] || lt[a][c])));
        if transitive {
            out.push(FinPoset { labels: FinPoset::numbered(n), lt });
        }
    }
    out
}

/// A finite distributive lattice given by its order, with meet and join
/// tables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FinDistLattice {
    labels: Vec<String>,
    leq: Vec<Vec<bool>>,
    meet: Vec<Vec<usize>>,
    join: Vec<Vec<usize>>,
    zero: usize,
    one: usize,
}

impl FinDistLattice {
    /// Builds the lattice of a partial order, checking that meets and joins
    /// exist and that they distribute.
    pub fn from_order(labels: Vec<String>, leq: Vec<Vec<bool>>) -> Result<FinDistLattice> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::domain("a lattice has at least one element"));
        }
        let bound = |a: usize, b: usize, lower: bool| -> Option<usize> {
            let ok = |c: usize| if lower { leq[c][a] && leq[c][b] } else { leq[a][c] && leq[b][c] };
            let cands: Vec<usize> = (0..n).filter(|&c| ok(c)).collect();
            cands.iter().copied().find(|&c| cands.iter().all(|&d| if lower { leq[d][c] } else { leq[c][d] }))
        };
        let mut meet = vec![vec![0; n]; n];
        let mut join = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                meet[a][b] = bound(a, b, true).ok_or_else(|| Error::domain(format!("no meet of `{}` and `{}`", labels[a], labels[b])))?;
                join[a][b] = bound(a, b, false).ok_or_else(|| Error::domain(format!("no join of `{}` and `{}`", labels[a], labels[b])))?;
            }
        }
        let zero = (0..n).find(|&a| (0..n).all(|b| leq[a][b])).expect("lattice has a bottom");
        let one = (0..n).find(|&a| (0..n).all(|b| leq[b][a])).expect("lattice has a top");
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if meet[a][join[b][c]] != join[meet[a][b]][meet[a][c]] {
                        return Err(Error::domain(format!(
                            "not distributive at `{}`, `{}`, `{}`",
                            labels[a], labels[b], labels[c]
                        )));
                    }
                }
            }
        }
        Ok(FinDistLattice { labels, leq, meet, join, zero, one })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a][b]
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a][b]
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn one(&self) -> usize {
        self.one
    }

    /// The underlying order as a poset.
    pub fn as_poset(&self) -> FinPoset {
        let n = self.len();
        let lt = (0..n).map(|a| (0..n).map(|b| a != b && self.leq[a][b]).collect()).collect();
        FinPoset { labels: self.labels.clone(), lt }
    }

    pub fn is_isomorphic(&self, other: &FinDistLattice) -> bool {
        self.as_poset().is_isomorphic(&other.as_poset())
    }

    pub fn product(&self, other: &FinDistLattice) -> FinDistLattice {
        let (n, m) = (self.len(), other.len());
        let labels = (0..n * m).map(|k| format!("({},{})", self.labels[k / m], other.labels[k % m])).collect();
        let leq = (0..n * m)
            .map(|x| (0..n * m).map(|y| self.leq[x / m][y / m] && other.leq[x % m][y % m]).collect())
            .collect();
        FinDistLattice::from_order(labels, leq).expect("product of distributive lattices")
    }

    /// Stacks the lattices in order, identifying the top of each with the
    /// bottom of the next.
    pub fn vector_sum(parts: &[FinDistLattice]) -> Result<FinDistLattice> {
        if parts.is_empty() {
            return Err(Error::domain("vector sum of no lattices"));
        }
        let mut labels = Vec::new();
        let mut level = Vec::new();
        let mut idx: Vec<Vec<usize>> = Vec::new();
        for (k, p) in parts.iter().enumerate() {
            let mut map = vec![usize::MAX; p.len()];
            for i in 0..p.len() {
                if k > 0 && i == p.zero {
                    map[i] = idx[k - 1][parts[k - 1].one];
                    continue;
                }
                map[i] = labels.len();
                labels.push(if parts.len() > 1 { format!("{k}.{}", p.labels[i]) } else { p.labels[i].clone() });
                level.push((k, i));
            }
            idx.push(map);
        }
        let n = labels.len();
        let leq = (0..n)
            .map(|x| {
                (0..n)
                    .map(|y| {
                        let ((kx, ix), (ky, iy)) = (level[x], level[y]);
                        match kx.cmp(&ky) {
                            std::cmp::Ordering::Less => true,
                            std::cmp::Ordering::Greater => false,
                            std::cmp::Ordering::Equal => parts[kx].leq[ix][iy],
                        }
                    })
                    .collect()
            })
            .collect();
        FinDistLattice::from_order(labels, leq)
    }

    /// Join-prime elements: `a ≠ 0` with `a ≤ b ∨ c ⇒ a ≤ b or a ≤ c`.
    pub fn join_primes(&self) -> Vec<usize> {
        let n = self.len();
        (0..n)
            .filter(|&a| a != self.zero)
            .filter(|&a| (0..n).all(|b| (0..n).all(|c| !self.leq[a][self.join[b][c]] || self.leq[a][b] || self.leq[a][c])))
            .collect()
    }
}

impl fmt::Display for FinDistLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.len();
        writeln!(f, "lattice {n} (0 = {}, 1 = {})", self.labels[self.zero], self.labels[self.one])?;
        let w = self.labels.iter().map(String::len).max().unwrap_or(1);
        for (name, table) in [("join", &self.join), ("meet", &self.meet)] {
            writeln!(f, "```{name}")?;
            write!(f, "{:w$} |", "")?;
            for l in &self.labels {
                write!(f, " {l:w$}")?;
            }
            writeln!(f)?;
            for a in 0..n {
                write!(f, "{:w$} |", self.labels[a])?;
                for b in 0..n {
                    write!(f, " {:w$}", self.labels[table[a][b]])?;
                }
                writeln!(f)?;
            }
            writeln!(f, "```")?;
        }
        Ok(())
    }
}

/// Final segments of `p` under reversed inclusion: join is intersection,
/// `0 = P` and `1 = ∅`.
pub fn final_segments(p: &FinPoset) -> FinDistLattice {
    let masks = final_segment_masks_sorted(p);
    let labels = masks.iter().map(|&m| p.mask_label(m)).collect();
    let leq = masks.iter().map(|&a| masks.iter().map(|&b| a & b == b).collect()).collect();
    FinDistLattice::from_order(labels, leq).expect("final segments form a distributive lattice")
}

fn final_segment_masks_sorted(p: &FinPoset) -> Vec<u64> {
    let mut masks = p.final_segment_masks();
    masks.sort_by_key(|m| (std::cmp::Reverse(m.count_ones()), *m));
    masks
}

/// The prime filters of `l`, ordered by reverse inclusion.
///
/// Every filter of a finite lattice is principal, so prime filters are the
/// `↑a` with `a` join-prime, and `↑a ⊇ ↑b` iff `a ≤ b`. For `l = fs(P)`
/// the filter `{ F : x ∉ F }` corresponds to `x`, and reverse inclusion
/// gives back the order of `P`.
pub fn prime_filters(l: &FinDistLattice) -> FinPoset {
    let primes = l.join_primes();
    let labels = primes
        .iter()
        .map(|&a| {
            let members: Vec<&str> = (0..l.len()).filter(|&b| l.leq(a, b)).map(|b| l.labels[b].as_str()).collect();
            format!("<{}>", members.join(" "))
        })
        .collect();
    let lt = primes.iter().map(|&a| primes.iter().map(|&b| a != b && l.leq(a, b)).collect()).collect();
    FinPoset { labels, lt }
}

/// The free Boolean algebra over a poset: all sets of final segments, with
/// `x ↦ { F : x ∈ F }` as the embedding.
#[derive(Clone, Debug, Serialize)]
pub struct FreeBoolean {
    /// Final segments of the poset, as bitmasks over its elements.
    pub segments: Vec<u64>,
    /// For each poset element, the indices of the final segments containing it.
    pub embedding: Vec<Vec<usize>>,
}

impl FreeBoolean {
    /// Number of elements, `2^|fs(P)|`.
    pub fn size(&self) -> num_bigint::BigUint {
        num_bigint::BigUint::from(1u32) << self.segments.len()
    }

    pub fn atoms(&self) -> usize {
        self.segments.len()
    }
}

pub fn free_boolean_algebra(p: &FinPoset) -> FreeBoolean {
    let segments = final_segment_masks_sorted(p);
    let embedding = (0..p.len())
        .map(|x| segments.iter().enumerate().filter(|(_, &m)| m >> x & 1 == 1).map(|(i, _)| i).collect())
        .collect();
    FreeBoolean { segments, embedding }
}

/// Outcome of an exhaustive universal-property check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UniversalReport {
    pub monotone_maps: usize,
    pub homomorphisms: usize,
    /// Monotone maps without exactly one extension.
    pub failures: usize,
}

impl UniversalReport {
    pub fn holds(&self) -> bool {
        self.failures == 0
    }
}

/// Checks that every order-preserving `f : P → B` extends to exactly one
/// homomorphism `F(P) → B`, with `B` the powerset of `b_atoms` atoms.
///
/// A homomorphism between finite powerset algebras sends the atoms of the
/// source to pairwise disjoint sets covering the target, so it is the same
/// as assigning each atom `y` of `B` the one atom `g(y)` of `F(P)` whose
/// image contains it. Then `h(i(x)) = { y : x ∈ g(y) }`.
pub fn check_universal_property(p: &FinPoset, b_atoms: u32) -> Result<UniversalReport> {
    let fb = free_boolean_algebra(p);
    if fb.atoms() > 5 || b_atoms > 4 {
        return Err(Error::TooLarge(format!(
            "universal property check needs |fs(P)| <= 5 and |B| <= 16, got {} and {}",
            fb.atoms(),
            1u32 << b_atoms.min(31)
        )));
    }
    let n = p.len();
    let bsize = 1usize << b_atoms;
    let mut extensions: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let homs = fb.atoms().pow(b_atoms);
    for code in 0..homs {
        let mut c = code;
        let g: Vec<u64> = (0..b_atoms)
            .map(|_| {
                let i = c % fb.atoms();
                c /= fb.atoms();
                fb.segments[i]
            })
            .collect();
        let f: Vec<usize> = (0..n)
            .map(|x| (0..b_atoms as usize).filter(|&y| g[y] >> x & 1 == 1).fold(0, |acc, y| acc | 1 << y))
            .collect();
        *extensions.entry(f).or_default() += 1;
    }
    let mut monotone = 0;
    let mut failures = 0;
    let total = bsize.checked_pow(n as u32).ok_or_else(|| Error::TooLarge("too many maps".into()))?;
    for code in 0..total {
        let mut c = code;
        let f: Vec<usize> = (0..n)
            .map(|_| {
                let v = c % bsize;
                c /= bsize;
                v
            })
            .collect();
        let is_monotone = (0..n).all(|a| (0..n).all(|b| !p.lt(a, b) || f[a] & f[b] == f[a]));
        if !is_monotone {
            continue;
        }
        monotone += 1;
        if extensions.get(&f).copied().unwrap_or(0) != 1 {
            failures += 1;
        }
    }
    // A homomorphism image that is not monotone would also be a failure.
    failures += extensions
        .keys()
        .filter(|f| !(0..n).all(|a| (0..n).all(|b| !p.lt(a, b) || f[a] & f[b] == f[a])))
        .count();
    Ok(UniversalReport { monotone_maps: monotone, homomorphisms: homs, failures })
}

/// `U ↦ f⁻¹(U)` from `fs(Q)` to `fs(P)` for a map `f : P → Q`, as indices
/// into the two lattices built by [`final_segments`].
pub fn pullback(p: &FinPoset, q: &FinPoset, f: &[usize]) -> Result<Vec<usize>> {
    if f.len() != p.len() || f.iter().any(|&y| y >= q.len()) {
        return Err(Error::domain("map does not go from P to Q"));
    }
    if !(0..p.len()).all(|a| (0..p.len()).all(|b| !p.lt(a, b) || q.le(f[a], f[b]))) {
        return Err(Error::domain("map is not order-preserving"));
    }
    let mp = final_segment_masks_sorted(p);
    let mq = final_segment_masks_sorted(q);
    Ok(mq
        .iter()
        .map(|&u| {
            let pre = (0..p.len()).filter(|&x| u >> f[x] & 1 == 1).fold(0u64, |m, x| m | 1 << x);
            mp.iter().position(|&m| m == pre).expect("preimage of a final segment is one")
        })
        .collect())
}
