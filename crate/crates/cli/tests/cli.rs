use std::path::PathBuf;
use std::process::Command;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn plank(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_plank")).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn stdout_ok(args: &[&str]) -> String {
    let (code, out, err) = plank(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    out
}

#[test]
fn ord_eval_absorbs() {
    assert_eq!(stdout_ok(&["ord", "eval", "w^2 + w + w^2"]).trim(), "w^2*2");
    assert_eq!(stdout_ok(&["ord", "eval", "1 + w"]).trim(), "w");
    assert_eq!(stdout_ok(&["ord", "eval", "w^(1+w) + w^w"]).trim(), "w^w*2");
}

#[test]
fn ord_cmp() {
    assert_eq!(stdout_ok(&["ord", "cmp", "w+1", "1+w"]).trim(), "w + 1 > w");
}

#[test]
fn strict_mode_rejects_noncanonical() {
    let (code, _, err) = plank(&["ord", "eval", "--strict", "w+w^2"]);
    assert_eq!(code, 2);
    assert!(err.contains("w^2"));
}

#[test]
fn parse_errors_exit_2() {
    assert_eq!(plank(&["ord", "eval", "w^"]).0, 2);
    assert_eq!(plank(&["set", "eval", "[0,w"]).0, 2);
}

#[test]
fn missing_file_exits_3() {
    assert_eq!(plank(&["region", "rank", "/nonexistent/region"]).0, 3);
}

#[test]
fn json_output() {
    let out = stdout_ok(&["--format", "json", "ord", "eval", "w*2+3"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["value"], "w*2 + 3");
}

#[test]
fn set_commands() {
    assert_eq!(stdout_ok(&["set", "rank", "[0,w^2]"]).trim(), "2");
    assert_eq!(stdout_ok(&["set", "ot", "[0,w^2]"]).trim(), "w^2 + 1");
}

#[test]
fn region_rank_of_square() {
    let f = data("box.region");
    assert_eq!(stdout_ok(&["region", "rank", &f]).trim(), "4");
    assert_eq!(stdout_ok(&["region", "pointrank", &f, "w^2", "w^2"]).trim(), "4");
}

#[test]
fn term_rank_two_paths() {
    let out = stdout_ok(&["term", "rank", "vecsum(w^3, ord(w^2))"]);
    assert!(out.starts_with("5 "), "{out}");
    assert!(out.contains("oracle: 5"), "{out}");
}

#[test]
fn dual_round_trip() {
    let f = data("vee.poset");
    assert!(stdout_ok(&["dual", "roundtrip", &f]).starts_with("round trip: isomorphic"));
    assert!(stdout_ok(&["dual", "fs", &f]).starts_with("lattice 5"));
}

#[test]
fn separation() {
    let out = stdout_ok(&["construct", "separate", "--A", "w,w^2", "--B", "w,w^3"]);
    assert!(out.contains("separated"), "{out}");
    assert!(out.contains("{1,2}") && out.contains("{1,3}"), "{out}");
}

#[test]
fn classify_plank_file() {
    let out = stdout_ok(&["classify", "run", "--region", &data("plank.region"), "--top", "w^3"]);
    assert!(out.contains("label: Plank(w)"), "{out}");
    assert!(out.contains("match: true"), "{out}");
}

#[test]
fn classify_catalog_all_match() {
    let (code, out, _) = plank(&["--format", "json", "classify", "catalog"]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn small_suite_runs() {
    let out = stdout_ok(&["suite", "run", "3"]);
    assert!(out.starts_with("[PASS] 3"), "{out}");
}
