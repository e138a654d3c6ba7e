use std::path::PathBuf;
use std::process::{Command, Output};

use gst_core::surface::parse;
use gst_core::{Evaluator, Sampler};

fn corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/corpus/terms.gst")
}

fn gst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gst"))
        .args(args)
        .env_remove("GST_BUDGET")
        .output()
        .expect("gst runs")
}

fn with_corpus(args: &[&str]) -> Output {
    let path = corpus();
    let mut all = args.to_vec();
    all.push(path.to_str().unwrap());
    gst(&all)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("gst-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn check_prints_types() {
    let o = with_corpus(&["check"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("t43 : (N -> N) -> N"));
    assert!(out.contains("maxT : N -> N -> N"));
}

#[test]
fn extracted_modulus_reparses_and_is_zero() {
    let o = with_corpus(&["extract", "--property", "modulus", "--def", "t43"]);
    assert_eq!(o.status.code(), Some(0));
    let file = parse(&stdout(&o)).expect("emitted terms are valid source");
    let m = &file.get("t43-modulus").unwrap().body;
    let ev = Evaluator::default();
    let mv = ev.eval_closed(m).unwrap();
    let mut s = Sampler::new(1);
    for _ in 0..10 {
        assert_eq!(ev.apply_nat(&mv, &[s.seq().to_value()]).unwrap(), 0);
    }
}

#[test]
fn every_extraction_reparses() {
    for property in [
        "ucmodulus",
        "ucmodulus-bar",
        "majorant",
        "bar-triple",
        "kuroda-modulus",
    ] {
        let o = with_corpus(&["extract", "--property", property, "--def", "a0"]);
        assert_eq!(o.status.code(), Some(0), "{property}");
        let file = parse(&stdout(&o)).expect("emitted terms are valid source");
        assert!(!file.decls.is_empty());
    }
}

#[test]
fn translations_reparse() {
    for (style, nucleus) in [
        ("gentzen", "gen-cont"),
        ("kolmogorov", "gen-identity"),
        ("kuroda", "gen-cont"),
    ] {
        let o = with_corpus(&["translate", "--style", style, "--nucleus", nucleus]);
        assert_eq!(o.status.code(), Some(0), "{style} {nucleus}");
        let file = parse(&stdout(&o)).expect("emitted terms are valid source");
        assert!(file.decls.len() >= 15);
    }
}

#[test]
fn verify_reports_are_stable() {
    let path = scratch("report.json", "");
    let args = [
        "verify",
        "--property",
        "continuity",
        "--def",
        "t43",
        "--seed",
        "42",
        "--samples",
        "100",
        "--json",
        path.to_str().unwrap(),
    ];
    let first = with_corpus(&args);
    assert_eq!(first.status.code(), Some(0));
    let saved = std::fs::read_to_string(&path).unwrap();
    let report: serde_json::Value = serde_json::from_str(&saved).unwrap();
    assert_eq!(report["verdict"], "pass");
    assert_eq!(report["seed"], 42);
    assert_eq!(report["samples"], 100);
    let second = with_corpus(&args);
    assert_eq!(stdout(&first), stdout(&second));
    assert_eq!(saved, std::fs::read_to_string(&path).unwrap());
    std::fs::remove_file(path).ok();
}

#[test]
fn verify_other_properties() {
    for (property, def) in [
        ("uniform", "a1"),
        ("gbr", "a0"),
        ("secures", "t43"),
        ("majorant", "double"),
    ] {
        let o = with_corpus(&[
            "verify",
            "--property",
            property,
            "--def",
            def,
            "--samples",
            "20",
        ]);
        assert_eq!(o.status.code(), Some(0), "{property}: {}", stdout(&o));
    }
    let o = with_corpus(&[
        "verify",
        "--property",
        "logical-relation",
        "--nucleus",
        "major",
        "--def",
        "double",
        "--samples",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn eval_applies_arguments() {
    let path = corpus();
    let file = path.to_str().unwrap();
    let o = gst(&["eval", "--def", "maxT", file, "3", "7"]);
    assert_eq!(stdout(&o).trim(), "7");
    let o = gst(&["eval", "--def", "a0plus1", file, "4,5"]);
    assert_eq!(stdout(&o).trim(), "9");
}

#[test]
fn input_errors_exit_two() {
    let bad = scratch("bad.gst", "def x : N = suc;");
    let o = gst(&["check", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    std::fs::remove_file(bad).ok();
    assert_eq!(
        with_corpus(&["eval", "--def", "missing"]).status.code(),
        Some(2)
    );
    assert_eq!(
        with_corpus(&["translate", "--nucleus", "nope"])
            .status
            .code(),
        Some(2)
    );
    let o = with_corpus(&["extract", "--property", "modulus", "--def", "maxT"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn budget_comes_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_gst"))
        .args([
            "eval",
            "--def",
            "maxT",
            corpus().to_str().unwrap(),
            "30",
            "40",
        ])
        .env("GST_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
}
