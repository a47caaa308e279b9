use clap::{Args, Parser, Subcommand, ValueEnum};
use plank_core::classify::{algebra_label, catalog, classify_with, rectangle_selftest};
use plank_core::construct::{self, ClubSpec};
use plank_core::duality::{check_universal_property, final_segments, free_boolean_algebra, prime_filters, FinPoset};
use plank_core::ordinal::ParseOptions;
use plank_core::region::{CbOutcome, PointRank};
use plank_core::spaceterm::measure;
use plank_core::suite::{self, SuiteConfig};
use plank_core::{Error, Ordinal, Region, SpaceTerm, StrataSet};
use serde_json::{json, Value};
use std::io::Write;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "plank", version, about = "Exact ordinals, scattered-space ranks and finite lattice duality")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Cap on derivative iterations.
    #[arg(long, global = true, default_value_t = plank_core::region::DEFAULT_BOUND)]
    bound: usize,
    /// Number of ε-atoms accepted by the ordinal grammar.
    #[arg(long, global = true, default_value_t = plank_core::ordinal::DEFAULT_EPS_ATOMS)]
    eps: u32,
    /// Seed for randomized regressions.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Ordinal arithmetic.
    #[command(subcommand)]
    Ord(OrdCmd),
    /// Sets of ordinals.
    #[command(subcommand)]
    Set(SetCmd),
    /// Regions in a product of two ordinal intervals, read from a file.
    #[command(subcommand)]
    Region(RegionCmd),
    /// Finite posets and their final-segment lattices, read from a file.
    #[command(subcommand)]
    Dual(DualCmd),
    /// Space terms.
    #[command(subcommand)]
    Term(TermCmd),
    /// Clubs of partial sums and the spaces built from them.
    #[command(subcommand)]
    Construct(ConstructCmd),
    /// Closed sublattices of a square.
    #[command(subcommand)]
    Classify(ClassifyCmd),
    /// Property suites.
    #[command(subcommand)]
    Suite(SuiteCmd),
}

#[derive(Subcommand)]
enum OrdCmd {
    /// Evaluates an expression to Cantor normal form.
    Eval {
        expr: String,
        /// Reject input that is not already in normal form.
        #[arg(long)]
        strict: bool,
    },
    /// Compares two ordinals.
    Cmp { a: String, b: String },
}

#[derive(Subcommand)]
enum SetCmd {
    /// Normal form of a set expression.
    Eval(SetArg),
    /// Derivative, iterated `--times` times or `--alpha` times.
    Derive {
        #[command(flatten)]
        set: SetArg,
        #[arg(long, default_value_t = 1)]
        times: u64,
        #[arg(long)]
        alpha: Option<String>,
    },
    /// Cantor-Bendixson rank, or the rank of `--point`.
    Rank {
        #[command(flatten)]
        set: SetArg,
        #[arg(long)]
        point: Option<String>,
    },
    /// Order type.
    Ot(SetArg),
}

#[derive(Args)]
struct SetArg {
    set: String,
    /// Ambient top; defaults to the largest ordinal mentioned.
    #[arg(long)]
    top: Option<String>,
}

#[derive(Subcommand)]
enum RegionCmd {
    /// Derivatives of the region.
    Derive {
        file: String,
        #[arg(long, default_value_t = 1)]
        times: usize,
    },
    /// Rank by derivative iteration.
    Rank { file: String },
    /// Rank of one point.
    Pointrank { file: String, x: String, y: String },
}

#[derive(Subcommand)]
enum DualCmd {
    /// Final-segment lattice.
    Fs { file: String },
    /// Prime filters of the final-segment lattice.
    Primes { file: String },
    /// Free Boolean algebra and its universal property for `|B| <= 2^atoms`.
    Freeba {
        file: String,
        #[arg(long, default_value_t = 2)]
        atoms: u32,
    },
    /// Checks that the prime filters of fs(P) give back P.
    Roundtrip { file: String },
}

#[derive(Subcommand)]
enum TermCmd {
    /// Rank by the symbolic rules and by the region oracle.
    Rank { term: String },
    /// Invariant vector, with oracle measurements when instantiable.
    Invariants { term: String },
    /// The term as a region file.
    Instantiate { term: String },
}

#[derive(Subcommand)]
enum ConstructCmd {
    /// Builds the space over the club of partial sums of the generators.
    Xc {
        #[arg(long = "A")]
        a: String,
        #[arg(long, default_value = "w")]
        nu: String,
        #[arg(long)]
        index: Option<String>,
    },
    /// Compares the rank spectra of two constructions.
    Separate {
        #[arg(long = "A")]
        a: String,
        #[arg(long = "B")]
        b: String,
        #[arg(long, default_value = "w")]
        nu: String,
    },
    /// One vector sum per subset of the given terms.
    Family {
        /// Terms separated by `;`.
        #[arg(long)]
        ys: String,
        /// Index lists separated by `;`, such as `0,1;1,2`.
        #[arg(long)]
        subsets: String,
        #[arg(long, default_value = "w")]
        rho: String,
    },
}

#[derive(Subcommand)]
enum ClassifyCmd {
    /// Classifies the region in a file.
    Run {
        #[arg(long)]
        region: String,
        #[arg(long)]
        top: String,
    },
    /// Random regression of the rectangle identity.
    Selftest {
        #[arg(long, default_value_t = 1000)]
        count: usize,
    },
    /// Classifies every region of the shipped catalog.
    Catalog,
}

#[derive(Subcommand)]
enum SuiteCmd {
    /// Runs every suite.
    All,
    /// Runs one suite by number.
    Run { id: u8 },
}

/// What a command prints, and its exit status.
struct Output {
    text: String,
    json: Value,
    failed: bool,
}

impl Output {
    fn ok(text: impl Into<String>, json: Value) -> Output {
        Output { text: text.into(), json, failed: false }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = cli.global.clone();
    match run(cli.cmd, &g) {
        Ok(out) => {
            let body = match g.format {
                Format::Text => out.text,
                Format::Json => serde_json::to_string_pretty(&out.json).expect("json"),
            };
            // A closed pipe is not an error worth a panic.
            let _ = writeln!(std::io::stdout().lock(), "{body}");
            if out.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            match g.format {
                Format::Text => eprintln!("error: {e}"),
                Format::Json => println!("{}", json!({ "error": e.to_string() })),
            }
            ExitCode::from(if e.is_parse() { 2 } else { 3 })
        }
    }
}

fn opts(g: &Global) -> ParseOptions {
    ParseOptions { normalize: true, eps_atoms: g.eps }
}

fn ordinal(s: &str, g: &Global) -> plank_core::Result<Ordinal> {
    Ordinal::parse_with(s, &opts(g))
}

fn read(path: &str) -> plank_core::Result<String> {
    let r = if path == "-" { std::io::read_to_string(std::io::stdin()) } else { std::fs::read_to_string(path) };
    r.map_err(|e| Error::domain(format!("cannot read {path}: {e}")))
}

fn set_of(arg: &SetArg, g: &Global) -> plank_core::Result<StrataSet> {
    let top = arg.top.as_deref().map(|t| ordinal(t, g)).transpose()?;
    StrataSet::parse(&arg.set, top.as_ref(), &opts(g))
}

fn region_of(path: &str, g: &Global) -> plank_core::Result<Region> {
    Region::parse(&read(path)?, &opts(g))
}

fn poset_of(path: &str) -> plank_core::Result<FinPoset> {
    FinPoset::parse(&read(path)?)
}

fn term_of(s: &str, g: &Global) -> plank_core::Result<SpaceTerm> {
    SpaceTerm::parse(s, &opts(g))
}

fn ordinal_list(s: &str, g: &Global) -> plank_core::Result<Vec<Ordinal>> {
    s.split(',').map(|x| ordinal(x.trim(), g)).collect()
}

fn braces<T: std::fmt::Display>(xs: impl IntoIterator<Item = T>) -> String {
    let v: Vec<String> = xs.into_iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", v.join(","))
}

fn run(cmd: Cmd, g: &Global) -> plank_core::Result<Output> {
    match cmd {
        Cmd::Ord(c) => ord_cmd(c, g),
        Cmd::Set(c) => set_cmd(c, g),
        Cmd::Region(c) => region_cmd(c, g),
        Cmd::Dual(c) => dual_cmd(c),
        Cmd::Term(c) => term_cmd(c, g),
        Cmd::Construct(c) => construct_cmd(c, g),
        Cmd::Classify(c) => classify_cmd(c, g),
        Cmd::Suite(c) => suite_cmd(c, g),
    }
}

fn ord_cmd(c: OrdCmd, g: &Global) -> plank_core::Result<Output> {
    match c {
        OrdCmd::Eval { expr, strict } => {
            let v = Ordinal::parse_with(&expr, &ParseOptions { normalize: !strict, eps_atoms: g.eps })?;
            Ok(Output::ok(v.to_string(), json!({ "value": v })))
        }
        OrdCmd::Cmp { a, b } => {
            let (x, y) = (ordinal(&a, g)?, ordinal(&b, g)?);
            let rel = match x.cmp(&y) {
                std::cmp::Ordering::Less => "<",
                std::cmp::Ordering::Equal => "=",
                std::cmp::Ordering::Greater => ">",
            };
            Ok(Output::ok(format!("{x} {rel} {y}"), json!({ "a": x, "b": y, "relation": rel })))
        }
    }
}

fn set_cmd(c: SetCmd, g: &Global) -> plank_core::Result<Output> {
    match c {
        SetCmd::Eval(arg) => {
            let s = set_of(&arg, g)?;
            Ok(Output::ok(s.to_string(), json!({ "set": s, "top": s.top() })))
        }
        SetCmd::Derive { set, times, alpha } => {
            let s = set_of(&set, g)?;
            let alpha = match alpha {
                Some(a) => ordinal(&a, g)?,
                None => Ordinal::nat(times),
            };
            let d = s.derivative_alpha(&alpha);
            Ok(Output::ok(d.to_string(), json!({ "alpha": alpha, "derivative": d })))
        }
        SetCmd::Rank { set, point } => {
            let s = set_of(&set, g)?;
            match point {
                Some(p) => {
                    let x = ordinal(&p, g)?;
                    let r = s.point_rank(&x)?;
                    Ok(Output::ok(r.to_string(), json!({ "point": x, "rank": r })))
                }
                None => {
                    let info = s.rank_info().ok_or_else(|| Error::domain("rank of the empty set"))?;
                    let text = if info.attained { info.rank.to_string() } else { format!("{} (supremum, not attained)", info.rank) };
                    Ok(Output::ok(text, json!({ "rank": info.rank, "attained": info.attained })))
                }
            }
        }
        SetCmd::Ot(arg) => {
            let s = set_of(&arg, g)?;
            let ot = s.order_type();
            Ok(Output::ok(ot.to_string(), json!({ "order_type": ot })))
        }
    }
}

fn region_cmd(c: RegionCmd, g: &Global) -> plank_core::Result<Output> {
    match c {
        RegionCmd::Derive { file, times } => {
            let r = region_of(&file, g)?;
            let ds = r.derivatives(times);
            let text = ds.iter().enumerate().skip(1).map(|(i, d)| format!("# derivative {i}\n{d}")).collect::<Vec<_>>().join("\n");
            Ok(Output::ok(text, json!({ "derivatives": ds[1..].to_vec() })))
        }
        RegionCmd::Rank { file } => {
            let r = region_of(&file, g)?;
            match r.cb_rank_finite(g.bound) {
                CbOutcome::Empty => Err(Error::domain("rank of the empty region")),
                CbOutcome::Rank(n) => Ok(Output::ok(n.to_string(), json!({ "rank": n }))),
                CbOutcome::Unknown { .. } => Ok(Output::ok(
                    format!("unknown (no empty derivative within {} steps)", g.bound),
                    json!({ "rank": null, "bound": g.bound }),
                )),
            }
        }
        RegionCmd::Pointrank { file, x, y } => {
            let r = region_of(&file, g)?;
            let (x, y) = (ordinal(&x, g)?, ordinal(&y, g)?);
            let pr = r.point_rank(&x, &y, g.bound)?;
            let text = match &pr {
                PointRank::Known(k) => k.to_string(),
                PointRank::Unknown => "unknown".into(),
            };
            Ok(Output::ok(text, json!({ "x": x, "y": y, "rank": pr })))
        }
    }
}

fn dual_cmd(c: DualCmd) -> plank_core::Result<Output> {
    match c {
        DualCmd::Fs { file } => {
            let l = final_segments(&poset_of(&file)?);
            Ok(Output::ok(l.to_string(), serde_json::to_value(&l).expect("json")))
        }
        DualCmd::Primes { file } => {
            let q = prime_filters(&final_segments(&poset_of(&file)?));
            Ok(Output::ok(q.to_string(), serde_json::to_value(&q).expect("json")))
        }
        DualCmd::Freeba { file, atoms } => {
            let p = poset_of(&file)?;
            let fb = free_boolean_algebra(&p);
            let report = check_universal_property(&p, atoms)?;
            let text = format!(
                "atoms: {}\nsize: {}\nmonotone maps into 2^{atoms}: {}\nhomomorphisms: {}\nunique extensions: {}",
                fb.atoms(),
                fb.size(),
                report.monotone_maps,
                report.homomorphisms,
                if report.holds() { "yes" } else { "NO" }
            );
            Ok(Output { text, json: json!({ "algebra": fb, "universal": report }), failed: !report.holds() })
        }
        DualCmd::Roundtrip { file } => {
            let p = poset_of(&file)?;
            let q = prime_filters(&final_segments(&p));
            let ok = q.is_isomorphic(&p);
            let text = format!("{}\n{q}", if ok { "round trip: isomorphic" } else { "round trip: NOT ISOMORPHIC" });
            Ok(Output { text, json: json!({ "isomorphic": ok, "primes": q }), failed: !ok })
        }
    }
}

/// How the symbolic rank of a term is assembled.
fn rank_derivation(t: &SpaceTerm) -> Option<String> {
    match t {
        SpaceTerm::VecSum(rho, body) => Some(format!("{} + {}", body.first()?.rank().ok()?, rho.ln().ok()?)),
        SpaceTerm::Prod(a, b) => Some(format!("{} ⊕ {}", a.rank().ok()?, b.rank().ok()?)),
        SpaceTerm::Plank(a, b) => Some(format!("{} ⊕ {}", a.rank_of_ordinal_space(), b.rank_of_ordinal_space())),
        SpaceTerm::K(a) | SpaceTerm::Tri(a) => {
            let e = a.rank_of_ordinal_space();
            Some(format!("{e} ⊕ {e}"))
        }
        _ => None,
    }
}

fn term_cmd(c: TermCmd, g: &Global) -> plank_core::Result<Output> {
    match c {
        TermCmd::Rank { term } => {
            let t = term_of(&term, g)?;
            let symbolic = t.rank()?;
            let oracle = t.instantiate().ok().and_then(|r| match r.cb_rank_finite(g.bound) {
                CbOutcome::Rank(n) => Some(Ordinal::nat(n as u64)),
                _ => None,
            });
            let how = rank_derivation(&t).map(|d| format!("symbolic: {d}")).unwrap_or_else(|| "symbolic".into());
            let oracle_text = oracle.as_ref().map(|o| o.to_string()).unwrap_or_else(|| "n/a".into());
            let mismatch = oracle.as_ref().is_some_and(|o| o != &symbolic);
            let mut text = format!("{symbolic} ({how}; oracle: {oracle_text})");
            if mismatch {
                text.push_str("\nMISMATCH between symbolic and oracle ranks");
            }
            Ok(Output { text, json: json!({ "term": t, "symbolic": symbolic, "oracle": oracle }), failed: mismatch })
        }
        TermCmd::Invariants { term } => {
            let t = term_of(&term, g)?;
            let v = t.invariant_vector();
            let measured = t.instantiate().ok().map(|r| measure(&r, v.top.as_ref(), g.bound));
            let mut text = format!("symbolic: {v}");
            let mut failed = false;
            if let Some(m) = &measured {
                let rank_ok = m.rank.is_none() || v.rank == m.rank.map(|n| Ordinal::nat(n as u64));
                let unit_ok = m.unitary.is_none() || v.unitary == m.unitary;
                let top_ok = v.top.is_none() || m.top.is_none() || v.top == m.top;
                failed = !(rank_ok && unit_ok && top_ok);
                let opt = |o: Option<String>| o.unwrap_or_else(|| "?".into());
                text.push_str(&format!(
                    "\noracle: (rank {}, unitary {}, top {})",
                    opt(m.rank.map(|r| r.to_string())),
                    opt(m.unitary.map(|u| u.to_string())),
                    opt(m.top.as_ref().map(|t| t.to_string()))
                ));
                if failed {
                    text.push_str("\nMISMATCH between symbolic and oracle invariants");
                }
            }
            Ok(Output { text, json: json!({ "term": t, "symbolic": v, "oracle": measured }), failed })
        }
        TermCmd::Instantiate { term } => {
            let r = term_of(&term, g)?.instantiate()?;
            Ok(Output::ok(r.to_string(), json!({ "region": r })))
        }
    }
}

fn construct_cmd(c: ConstructCmd, g: &Global) -> plank_core::Result<Output> {
    match c {
        ConstructCmd::Xc { a, nu, index } => {
            let index = index.map(|i| ordinal(&i, g)).transpose()?;
            let spec = ClubSpec::new(ordinal_list(&a, g)?, index)?;
            let nu = ordinal(&nu, g)?;
            let club = construct::club_of_partial_sums(&spec);
            let t = SpaceTerm::XC(club.clone(), nu.clone());
            let region = t.instantiate()?;
            let rank = t.rank()?;
            let spectrum = construct::rank_spectrum(&spec, &nu, g.bound)?;
            let text = format!(
                "club: {club}\nregion:\n{region}\nrank: {rank}\nspectrum: {} (symbolic), {} (oracle)",
                braces(&spectrum.symbolic),
                braces(&spectrum.oracle)
            );
            Ok(Output {
                text,
                json: json!({ "club": club, "region": region, "rank": rank, "spectrum": spectrum }),
                failed: !spectrum.agrees(),
            })
        }
        ConstructCmd::Separate { a, b, nu } => {
            let sa = ClubSpec::new(ordinal_list(&a, g)?, None)?;
            let sb = ClubSpec::new(ordinal_list(&b, g)?, None)?;
            let s = construct::separate(&sa, &sb, &ordinal(&nu, g)?, g.bound)?;
            let agree = s.a.agrees() && s.b.agrees();
            let mut text = format!(
                "{}: spectra {} vs {}",
                if s.separated { "separated" } else { "not separated" },
                braces(&s.a.oracle),
                braces(&s.b.oracle)
            );
            if !agree {
                text.push_str(&format!(
                    "\nMISMATCH: symbolic spectra {} vs {}",
                    braces(&s.a.symbolic),
                    braces(&s.b.symbolic)
                ));
            }
            Ok(Output { text, json: serde_json::to_value(&s).expect("json"), failed: !agree })
        }
        ConstructCmd::Family { ys, subsets, rho } => {
            let ys = ys.split(';').map(|t| term_of(t.trim(), g)).collect::<plank_core::Result<Vec<_>>>()?;
            let subsets = subsets
                .split(';')
                .map(|s| {
                    s.split(',')
                        .map(|i| i.trim().parse::<usize>().map_err(|e| Error::Parse { pos: 0, msg: format!("subset index `{i}`: {e}") }))
                        .collect()
                })
                .collect::<plank_core::Result<Vec<Vec<usize>>>>()?;
            let family = construct::family_generator(&ys, &subsets, &ordinal(&rho, g)?)?;
            let vectors: Vec<_> = family.iter().map(SpaceTerm::invariant_vector).collect();
            let mut lines = Vec::new();
            for (t, v) in family.iter().zip(&vectors) {
                lines.push(format!("{t}: {v}"));
            }
            let mut unseparated = Vec::new();
            for i in 0..vectors.len() {
                for j in i + 1..vectors.len() {
                    if !vectors[i].separates(&vectors[j]) {
                        unseparated.push((i, j));
                    }
                }
            }
            lines.push(if unseparated.is_empty() {
                "all pairs separated by invariants".into()
            } else {
                format!("pairs not separated by invariants: {unseparated:?}")
            });
            Ok(Output::ok(lines.join("\n"), json!({ "family": family, "invariants": vectors, "unseparated": unseparated })))
        }
    }
}

fn classify_cmd(c: ClassifyCmd, g: &Global) -> plank_core::Result<Output> {
    match c {
        ClassifyCmd::Run { region, top } => {
            let k = region_of(&region, g)?;
            let c = classify_with(&k, &ordinal(&top, g)?, g.bound)?;
            Ok(Output { text: c.to_string(), json: serde_json::to_value(&c).expect("json"), failed: !c.matches })
        }
        ClassifyCmd::Selftest { count } => {
            let r = rectangle_selftest(g.seed, count, 8);
            let mut text = format!(
                "rectangle identity: {} lattices, {} rectangles, {} checked as regions, {} failures",
                r.lattices,
                r.rectangles,
                r.region_checks,
                r.failures.len()
            );
            for f in r.failures.iter().take(8) {
                text.push_str(&format!("\n  {f}"));
            }
            Ok(Output { text, json: serde_json::to_value(&r).expect("json"), failed: !r.passed() })
        }
        ClassifyCmd::Catalog => {
            let mut lines = Vec::new();
            let mut rows = Vec::new();
            let mut failed = false;
            for e in catalog() {
                match classify_with(&e.region, &e.top, g.bound) {
                    Ok(c) => {
                        let ok = c.matches && c.label.to_string() == e.expected;
                        failed |= !ok;
                        lines.push(format!(
                            "{:<24} {:<16} {:<12} {}",
                            e.name,
                            c.label.to_string(),
                            algebra_label(&c.label),
                            if ok { "ok" } else { "MISMATCH" }
                        ));
                        rows.push(json!({ "name": e.name, "expected": e.expected, "result": c }));
                    }
                    Err(err) => {
                        failed = true;
                        lines.push(format!("{:<24} error: {err}", e.name));
                        rows.push(json!({ "name": e.name, "expected": e.expected, "error": err.to_string() }));
                    }
                }
            }
            lines.push(format!("note: {}", plank_core::classify::MINIATURE_NOTE));
            Ok(Output { text: lines.join("\n"), json: json!({ "catalog": rows }), failed })
        }
    }
}

fn suite_cmd(c: SuiteCmd, g: &Global) -> plank_core::Result<Output> {
    let cfg = SuiteConfig { bound: g.bound, seed: g.seed, ..Default::default() };
    let outcomes = match c {
        SuiteCmd::All => suite::run_all(&cfg),
        SuiteCmd::Run { id } => vec![suite::run(id, &cfg).ok_or_else(|| Error::domain(format!("no suite {id}; suites are 1 to 8")))?],
    };
    let passed = outcomes.iter().filter(|o| o.passed()).count();
    let mut lines: Vec<String> = outcomes.iter().map(|o| o.to_string()).collect();
    lines.push(format!("{passed}/{} suites passed", outcomes.len()));
    Ok(Output {
        text: lines.join("\n"),
        json: json!({ "suites": outcomes, "passed": passed }),
        failed: passed != outcomes.len(),
    })
}
