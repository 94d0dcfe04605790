use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lieobstruct"))
        .args(args)
        .current_dir(root())
        .output()
        .unwrap()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(
        PathBuf::from(env!("CARGO_MANIFEST_DIR"))
            .join("tests/golden")
            .join(name),
    )
    .unwrap()
}

fn error_kind(out: &Output) -> String {
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    v["error"]["kind"].as_str().unwrap().to_string()
}

#[test]
fn reports_match_golden_files() {
    for (args, file) in [
        (
            &["holonomy", "data/heis.json", "--lcs", "5"][..],
            "holonomy-heis.json",
        ),
        (
            &["hall", "--gens", "2", "--deg", "5", "--words"][..],
            "hall-2-5.json",
        ),
        (
            &["fixed", "data/wedge2.json", "data/swap.json"][..],
            "fixed-wedge2-swap.json",
        ),
    ] {
        let out = bin(args);
        assert!(out.status.success(), "{args:?}");
        assert_eq!(
            String::from_utf8(out.stdout).unwrap(),
            golden(file),
            "{args:?}"
        );
    }
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = bin(&[
        "--out",
        path.to_str().unwrap(),
        "holonomy",
        "data/heis.json",
        "--lcs",
        "5",
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(
        std::fs::read_to_string(&path).unwrap(),
        golden("holonomy-heis.json")
    );
}

#[test]
fn timings_are_opt_in() {
    let plain: Value =
        serde_json::from_slice(&bin(&["holonomy", "data/torus.json"]).stdout).unwrap();
    assert!(plain.get("timings_ms").is_none());
    let timed: Value =
        serde_json::from_slice(&bin(&["--timings", "holonomy", "data/torus.json"]).stdout).unwrap();
    assert!(timed["timings_ms"].is_object());
}

#[test]
fn exit_codes_follow_the_error_kind() {
    let missing = bin(&["holonomy", "data/no-such-file.json"]);
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(error_kind(&missing), "io");

    let usage = bin(&["classify", "data/heis.json", "--stage", "1"]);
    assert_eq!(usage.status.code(), Some(2));
    assert_eq!(error_kind(&usage), "usage");

    let no_args = bin(&["resonance"]);
    assert_eq!(no_args.status.code(), Some(2));

    let not_closed = bin(&["resonance", "data/noncarnot.json", "--omega", "0,0,0,1,0"]);
    assert_eq!(not_closed.status.code(), Some(1));

    let too_deep = bin(&["linearize", "data/cubic.json", "--deg", "2"]);
    assert_eq!(too_deep.status.code(), Some(1));
}

#[test]
fn malformed_relator_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"generators": ["x","y"], "relators": ["[x,,y]"]}"#,
    )
    .unwrap();
    let out = bin(&["h2scan", path.to_str().unwrap(), "--deg", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "parse");
}

#[test]
fn in_process_run_matches_the_binary() {
    let dir = root();
    let input = dir.join("data/heis.json");
    let (code, stdout, stderr) =
        lieobstruct::run(["lieobstruct", "holonomy", input.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stderr.is_empty());
    let v: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["results"]["relators"].as_array().unwrap().len(), 3);
}
