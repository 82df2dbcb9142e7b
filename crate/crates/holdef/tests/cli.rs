//! End-to-end runs of the binary over the fixture corpus.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("fixtures");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn holdef(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holdef"))
        .args(args)
        .output()
        .expect("the binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn check_accepts_every_wellformed_fixture() {
    for name in [
        "d_e_c.thy",
        "typedef_unit.thy",
        "overload.thy",
        "simultaneous.thy",
        "lex.thy",
        "declarations.thy",
        "eta_select.thy",
    ] {
        let out = holdef(&["check", &fixture(name)]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", stdout_of(&out));
        assert!(stdout_of(&out).starts_with("ok:"), "{name}: {}", stdout_of(&out));
    }
}

#[test]
fn check_rejects_the_cyclic_fixture_with_its_loop() {
    let out = holdef(&["check", &fixture("cyclic.thy")]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout_of(&out);
    assert!(text.starts_with("fail:"), "{text}");
    assert!(text.contains("c:bool -> c:(bool -> bool) -> c:bool"), "{text}");
}

#[test]
fn indep_reports_the_dependency_path_of_an_excluded_symbol() {
    let file = fixture("d_e_c.thy");
    let out = holdef(&["indep", &file, "--update", "3", "--symbol", "(const e (bool))"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout_of(&out);
    assert!(text.contains("outside fragment"), "{text}");
    assert!(text.contains("e:bool -> c:bool"), "{text}");

    let out = holdef(&["indep", &file, "--update", "3", "--symbol", "(const d (bool))"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).contains("in fragment"), "{}", stdout_of(&out));
}

#[test]
fn consist_separates_reflexivity_from_distinctness() {
    let out = holdef(&["consist", &fixture("d_e_c.thy"), "--depth", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout_of(&out));
    assert!(stdout_of(&out).starts_with("consistent:"), "{}", stdout_of(&out));
}

#[test]
fn conserve_keeps_every_decided_fragment_symbol() {
    let out = holdef(&["conserve", &fixture("d_e_c.thy")]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout_of(&out));
    assert!(stdout_of(&out).starts_with("conservative:"), "{}", stdout_of(&out));
}

#[test]
fn json_reports_are_byte_identical_across_runs() {
    let dir = std::env::temp_dir().join("holdef-cli-json");
    std::fs::create_dir_all(&dir).unwrap();
    let a = dir.join("a.json");
    let b = dir.join("b.json");
    for path in [&a, &b] {
        let out = holdef(&[
            "indep",
            &fixture("d_e_c.thy"),
            "--update",
            "3",
            "--symbol",
            "(const e (bool))",
            "--json",
            &path.to_string_lossy(),
        ]);
        assert_eq!(out.status.code(), Some(1));
    }
    let first = std::fs::read(&a).unwrap();
    let second = std::fs::read(&b).unwrap();
    assert_eq!(first, second);
    let text = String::from_utf8(first).unwrap();
    assert!(text.contains("\"schema\": 1"), "{text}");
    assert!(text.contains("\"verdict\": \"no\""), "{text}");
}

#[test]
fn deps_writes_a_dot_graph() {
    let dir = std::env::temp_dir().join("holdef-cli-dot");
    std::fs::create_dir_all(&dir).unwrap();
    let dot = dir.join("deps.dot");
    let out = holdef(&["deps", &fixture("d_e_c.thy"), "--dot", &dot.to_string_lossy()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("digraph deps {"), "{text}");
    assert!(text.contains("\"e:bool\" -> \"c:bool\""), "{text}");
}

#[test]
fn usage_problems_exit_sixtyfour() {
    let out = holdef(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(64));
    let out = holdef(&["check", "/nonexistent/nowhere.thy"]);
    assert_eq!(out.status.code(), Some(64));
    let out = holdef(&["indep", &fixture("d_e_c.thy"), "--symbol", "(malformed"]);
    assert_eq!(out.status.code(), Some(64));
    let out = holdef(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn parse_errors_carry_line_and_column() {
    let dir = std::env::temp_dir().join("holdef-cli-parse");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.thy");
    std::fs::write(&bad, "(prelude bool)\n(newconst c (bool)").unwrap();
    let out = holdef(&["check", &bad.to_string_lossy()]);
    assert_eq!(out.status.code(), Some(64));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("2:1"), "{err}");
}
