//! Acceptance criteria, one line per criterion. Runs without the test
//! harness so the lines always reach the output.

use plank_core::classify::{catalog, classify, rectangle_sides};
use plank_core::duality::all_posets;
use plank_core::suite::{self, SuiteConfig, SuiteOutcome};
use plank_core::{Ordinal, Region, SpaceTerm, StrataSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

struct Criterion {
    id: u8,
    /// Least number of cases the criterion must cover.
    min_cases: usize,
    limit: Duration,
    /// Extra checks against values computed here rather than in the library.
    extra: fn() -> Result<String, String>,
}

fn none() -> Result<String, String> {
    Ok(String::new())
}

/// rank(vecsum(ω^b, ord(ω^a))) against plain integer addition.
fn vecsum_table() -> Result<String, String> {
    for a in 0..=4u64 {
        for b in 0..=4u64 {
            let t = SpaceTerm::VecSum(
                Ordinal::omega_pow(&Ordinal::nat(b)),
                vec![SpaceTerm::Ord(Ordinal::omega_pow(&Ordinal::nat(a)))],
            );
            let got = t.rank().map_err(|e| e.to_string())?;
            if got.as_u64() != Some(a + b) {
                return Err(format!("a={a} b={b}: {got}"));
            }
        }
    }
    Ok("25/25 against integer sums".into())
}

/// Known counts of labelled posets on n points.
fn poset_counts() -> Result<String, String> {
    let want = [1usize, 1, 3, 19, 219, 4231];
    let got: Vec<usize> = (0..=5).map(|n| all_posets(n).len()).collect();
    if got == want {
        Ok(format!("labelled poset counts {got:?}"))
    } else {
        Err(format!("labelled poset counts {got:?}, expected {want:?}"))
    }
}

/// Spectra equal the exponents of the generators, read off the subset index.
fn spectra_by_index() -> Result<String, String> {
    let nu = Ordinal::omega();
    let mut checked = 0;
    for mask in 0u32..16 {
        if mask.count_ones() < 2 {
            continue;
        }
        let gens: Vec<Ordinal> = (0..4).filter(|i| mask >> i & 1 == 1).map(|i| Ordinal::omega_nat(i + 1)).collect();
        let want: BTreeSet<Ordinal> = (0..4u64).filter(|i| mask >> i & 1 == 1).map(|i| Ordinal::nat(i + 1)).collect();
        let spec = plank_core::construct::ClubSpec::new(gens, None).map_err(|e| e.to_string())?;
        let r = plank_core::construct::rank_spectrum(&spec, &nu, 32).map_err(|e| e.to_string())?;
        if r.oracle != want || r.symbolic != want {
            return Err(format!("mask {mask:04b}: oracle {:?}, symbolic {:?}", r.oracle, r.symbolic));
        }
        checked += 1;
    }
    Ok(format!("{checked} spectra against subset exponents"))
}

/// Independent random lattices, one region-level rectangle check each.
fn rectangles_as_regions() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let n = |v: u8| Ordinal::nat(v as u64);
    let side = n(8);
    for _ in 0..1000 {
        let mut k: BTreeSet<(u8, u8)> = (0..rng.gen_range(1..=6)).map(|_| (rng.gen_range(0..=8), rng.gen_range(0..=8))).collect();
        loop {
            let pts: Vec<_> = k.iter().copied().collect();
            let before = k.len();
            for p in &pts {
                for q in &pts {
                    k.insert((p.0.min(q.0), p.1.min(q.1)));
                    k.insert((p.0.max(q.0), p.1.max(q.1)));
                }
            }
            if k.len() == before {
                break;
            }
        }
        let pts: Vec<(u8, u8)> = k.iter().copied().collect();
        let corners: Vec<((u8, u8), (u8, u8))> = pts
            .iter()
            .flat_map(|p| pts.iter().map(move |q| (*p, *q)))
            .filter(|((a0, b1), (a1, b0))| a0 <= a1 && b0 <= b1)
            .collect();
        let ((a0, b1), (a1, b0)) = corners[rng.gen_range(0..corners.len())];
        let region = Region::points(&side, &side, &pts.iter().map(|p| (n(p.0), n(p.1))).collect::<Vec<_>>());
        let (a, b) = rectangle_sides(&region, &n(a0), &n(a1), &n(b0), &n(b1)).map_err(|e| format!("{pts:?}: {e}"))?;
        let want_a: Vec<Ordinal> = (a0..=a1).filter(|x| k.contains(&(*x, b0))).map(n).collect();
        let want_b: Vec<Ordinal> = (b0..=b1).filter(|y| k.contains(&(a0, *y))).map(n).collect();
        if a.finite_points() != Some(want_a) || b.finite_points() != Some(want_b) {
            return Err(format!("{pts:?} at [{a0},{a1}]x[{b0},{b1}]: {a} x {b}"));
        }
    }
    Ok("1000 region-level rectangles".into())
}

/// The three labelled examples, rebuilt here from scratch.
fn labelled_examples() -> Result<String, String> {
    let top = Ordinal::omega_nat(3);
    let full = StrataSet::full(&top);
    let cases = [
        (Region::product(&full, &StrataSet::full(&Ordinal::omega()).with_top(&top)), "Plank(w)"),
        (Region::triangle(&full, &full), "Triangle"),
        (Region::product(&full, &full), "FullSquare"),
    ];
    for (k, want) in cases {
        let c = classify(&k, &top).map_err(|e| e.to_string())?;
        if c.label.to_string() != want || !c.matches {
            return Err(format!("expected {want}, got\n{c}"));
        }
    }
    let n = catalog().len();
    if n < 20 {
        return Err(format!("catalog has only {n} regions"));
    }
    Ok(format!("{n} catalog regions; three hand-built examples"))
}

fn report(c: &Criterion, o: &SuiteOutcome, elapsed: Duration, extra: &Result<String, String>) -> bool {
    let enough = o.cases >= c.min_cases;
    let fast = elapsed <= c.limit;
    let ok = o.passed() && enough && fast && extra.is_ok();
    let extra_text = match extra {
        Ok(s) if s.is_empty() => String::new(),
        Ok(s) => format!("; {s}"),
        Err(e) => format!("; independent check FAILED: {e}"),
    };
    println!(
        "criterion {} {:<20} {}  cases={} (min {}) failures={} tolerance=exact runtime={:.1}s (limit {}s){}",
        c.id,
        o.name,
        if ok { "PASS" } else { "FAIL" },
        o.cases,
        c.min_cases,
        o.failures,
        elapsed.as_secs_f64(),
        c.limit.as_secs(),
        extra_text
    );
    for e in &o.examples {
        println!("    {e}");
    }
    ok
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion { id: 1, min_cases: 10_000, limit: secs(60), extra: none },
        Criterion { id: 2, min_cases: 200, limit: secs(300), extra: none },
        Criterion { id: 3, min_cases: 25, limit: secs(60), extra: vecsum_table },
        Criterion { id: 4, min_cases: 15, limit: secs(60), extra: none },
        Criterion { id: 5, min_cases: 4231, limit: secs(600), extra: poset_counts },
        Criterion { id: 6, min_cases: 55, limit: secs(60), extra: spectra_by_index },
        Criterion { id: 7, min_cases: 1000, limit: secs(120), extra: rectangles_as_regions },
        Criterion { id: 8, min_cases: 20, limit: secs(120), extra: labelled_examples },
    ];
    let cfg = SuiteConfig::default();
    let mut passed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = suite::run(c.id, &cfg).expect("suite exists");
        let elapsed = start.elapsed();
        let extra = (c.extra)();
        if report(c, &outcome, elapsed, &extra) {
            passed += 1;
        }
    }
    println!("acceptance: {passed}/{} criteria passed", criteria.len());
    if passed == criteria.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
