use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;

use compos_core::dsl::parse_component;
use compos_core::{components_isomorphic, fixtures};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures/hunting")
        .join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn compos(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_compos"))
        .args(args)
        .env("COMPOS_COLOR", "0")
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exited normally"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

#[test]
fn check_accepts_the_fixtures() {
    for f in [
        "pilgrim.compos",
        "shotgun.compos",
        "turkey.compos",
        "hunting.compos",
        "hunting.diagram",
    ] {
        let r = compos(&["check", s(&fixture(f))]);
        assert_eq!(r.code, 0, "{f}: {}", r.stderr);
    }
}

#[test]
fn check_reports_overlapping_names() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("broken.compos");
    fs::write(
        &p,
        "component Broken\nvariables h : bool\nactions h\nevents\n*[ ]\n",
    )
    .unwrap();
    let r = compos(&["check", s(&p)]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("NameSetsOverlap"), "{}", r.stderr);
    assert!(r.stderr.contains("E011"));
}

#[test]
fn check_missing_file_is_an_io_error() {
    let r = compos(&["check", "definitely/missing.compos"]);
    assert_eq!(r.code, 2);
}

#[test]
fn syntax_errors_show_the_position() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.compos");
    fs::write(
        &p,
        "component Bad\nvariables h : int\nactions\nevents\n*[ ]\n",
    )
    .unwrap();
    let r = compos(&["check", s(&p)]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("2:15"), "{}", r.stderr);
    assert!(
        r.stderr
            .contains("2 | variables h : int\n  |               ^"),
        "{}",
        r.stderr
    );
}

#[test]
fn compose_writes_hunting_and_legs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("hunting.compos");
    let r = compos(&["compose", s(&fixture("hunting.diagram")), "-o", s(&out)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let composed = Arc::new(parse_component(&fs::read_to_string(&out).unwrap()).unwrap());
    let expected = Arc::new(parse_component(fixtures::HUNTING_SRC).unwrap());
    assert!(components_isomorphic(&composed, &expected).is_some());
    let legs = fs::read_to_string(dir.path().join("hunting.legs")).unwrap();
    assert!(
        legs.contains("leg Turkey -> Hunting\n  var t -> t\n  action dt -> dt\n  event e4 -> e4\n"),
        "{legs}"
    );
}

#[test]
fn compose_single_node_copies_it() {
    let dir = tempfile::tempdir().unwrap();
    fs::copy(fixture("turkey.compos"), dir.path().join("turkey.compos")).unwrap();
    let d = dir.path().join("one.diagram");
    fs::write(&d, "system Turkey\ncomponent Turkey turkey.compos\n").unwrap();
    let r = compos(&["compose", s(&d)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(parse_component(&r.stdout).unwrap(), fixtures::turkey());
}

#[test]
fn compose_names_an_invalid_edge() {
    let dir = tempfile::tempdir().unwrap();
    for f in ["pilgrim.compos", "shotgun.compos"] {
        fs::copy(fixture(f), dir.path().join(f)).unwrap();
    }
    let d = dir.path().join("bad.diagram");
    fs::write(
        &d,
        "component Pilgrim pilgrim.compos\ncomponent Shotgun shotgun.compos\n\
         morphism wrong : Shotgun -> Pilgrim\n  var l -> l\n  action ld -> am\n  action st -> st\n  event e2 -> e3\n  event e4 -> e4\n",
    )
    .unwrap();
    let r = compos(&["compose", s(&d)]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("edge `wrong`"), "{}", r.stderr);
}

#[test]
fn mediate_prints_the_inclusion() {
    let r = compos(&["mediate", s(&fixture("hunting.diagram")), "Environment"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r
        .stdout
        .starts_with("morphism mediator : Hunting -> Environment\n"));
    assert!(r.stdout.contains("  var t -> t\n"));
    assert!(!r.stdout.contains("var w"));
}

#[test]
fn mediate_reports_the_broken_commutation() {
    let r = compos(&[
        "mediate",
        s(&fixture("hunting_perturbed.diagram")),
        "Environment",
    ]);
    assert_eq!(r.code, 1);
    assert!(
        r.stderr
            .contains("CommutationFailure: edge `g1_shotgun`, action `ld`"),
        "{}",
        r.stderr
    );
}

#[test]
fn mediate_unknown_environment_is_a_usage_error() {
    let r = compos(&["mediate", s(&fixture("hunting.diagram")), "Elsewhere"]);
    assert_eq!(r.code, 2);
}

const NARRATIVE: &str = "init: a=0 h=0 l=0 t=1
e1: a=0 h=1 l=0 t=1
e2: a=0 h=1 l=1 t=1
e3: a=1 h=1 l=1 t=1
e4: a=0 h=1 l=0 t=0
";

#[test]
fn simulate_runs_a_schedule() {
    let h = fixture("hunting.compos");
    let r = compos(&[
        "simulate",
        s(&h),
        "--init",
        "¬h,¬l,¬a,t",
        "e1",
        "e2",
        "e3",
        "e4",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout, NARRATIVE);
    assert!(r.stdout.lines().last().unwrap().contains("t=0"));
}

#[test]
fn simulate_searches_for_a_witness() {
    let h = fixture("hunting.compos");
    let r = compos(&[
        "simulate",
        s(&h),
        "--init",
        "!h,!l,!a,t",
        "--reach",
        "¬t",
        "--bound",
        "4",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout, NARRATIVE);

    let r = compos(&[
        "simulate",
        s(&h),
        "--init",
        "!h,!l,!a,t",
        "--reach",
        "!t",
        "--bound",
        "3",
    ]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("no witness"));
}

#[test]
fn simulate_rejects_disabled_events() {
    let h = fixture("hunting.compos");
    let r = compos(&["simulate", s(&h), "--init", "!h,!l,!a,t", "e2"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("`e2` is not enabled"));
}

#[test]
fn simulate_rejects_non_literal_init() {
    let h = fixture("hunting.compos");
    let r = compos(&["simulate", s(&h), "--init", "h \\or l"]);
    assert_eq!(r.code, 2);
}

#[test]
fn laws_pass_and_catch_the_injected_fault() {
    let r = compos(&["laws", "--seed", "42", "--iters", "200"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let r = compos(&[
        "laws",
        "--seed",
        "42",
        "--iters",
        "200",
        "--inject-fault",
        "compose-skip-events",
    ]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("counterexample"));
    let r = compos(&["laws", "--iters", "0"]);
    assert_eq!(r.code, 0);
}

#[test]
fn laws_output_is_deterministic() {
    let a = compos(&[
        "laws",
        "--seed",
        "7",
        "--iters",
        "20",
        "--inject-fault",
        "compose-skip-events",
    ]);
    let b = compos(&[
        "laws",
        "--seed",
        "7",
        "--iters",
        "20",
        "--inject-fault",
        "compose-skip-events",
    ]);
    assert_eq!((a.code, a.stdout, a.stderr), (b.code, b.stdout, b.stderr));
}

#[test]
fn fmt_is_a_fixpoint() {
    let r = compos(&["fmt", s(&fixture("hunting.compos"))]);
    assert_eq!(r.code, 0);
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("h.compos");
    fs::write(&p, &r.stdout).unwrap();
    let again = compos(&["fmt", s(&p)]);
    assert_eq!(again.stdout, r.stdout);
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    assert_eq!(compos(&["frobnicate"]).code, 2);
    assert_eq!(compos(&["--help"]).code, 0);
}

#[test]
fn color_is_off_when_disabled() {
    let r = compos(&["check", "definitely/missing.compos"]);
    assert!(!r.stderr.contains('\x1b'));
    assert!(!compos_cli::color_enabled(Some("0"), true));
    assert!(compos_cli::color_enabled(None, true));
    assert!(!compos_cli::color_enabled(None, false));
}
