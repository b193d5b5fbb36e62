use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn omc(args: &[&str]) -> Output {
    omc_env(args, &[])
}

fn omc_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_omc"));
    c.args(args).arg("--compact");
    for var in ["OMC_BUDGET_CELLS", "OMC_BUDGET_CYLINDERS", "OMC_BUDGET_NODES", "OMC_BUDGET_FUNCTORS"] {
        c.env_remove(var);
    }
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().expect("omc runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn path(name: &str) -> String {
    corpus(name).to_string_lossy().into_owned()
}

#[test]
fn corrupted_composition_table_fails_with_the_instance() {
    let o = omc(&["validate", &path("corrupted_cyclic3.json")]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert_eq!(v["verdict"], "fails");
    let laws: Vec<&str> = v["violations"].as_array().unwrap().iter().map(|x| x["law"].as_str().unwrap()).collect();
    assert!(laws.contains(&"associativity"), "{laws:?}");
    assert_eq!(code(&omc(&["validate", &path("cyclic3.json")])), 0);
}

#[test]
fn suite_none_is_empty() {
    let o = omc(&["suite", "--suite", "none"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["reports"], serde_json::json!([]));
}

#[test]
fn identical_seeds_give_identical_bytes() {
    let args = ["suite", "--suite", "cylinder-laws,transport,pushout-immersion", "--count", "8", "--pushouts", "4", "--seed", "99"];
    let (a, b) = (omc(&args), omc(&args));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let other = omc(&["suite", "--suite", "cylinder-laws", "--count", "8", "--seed", "100"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn usage_and_schema_errors_exit_3() {
    assert_eq!(code(&omc(&["no-such-command"])), 3);
    assert_eq!(code(&omc(&["globe"])), 3);
    assert_eq!(code(&omc(&["suite", "--suite", "bogus"])), 3);
    assert_eq!(code(&omc(&["validate", "/nonexistent.json"])), 3);
    let o = omc(&["is-weq", &path("walking_arrow.json")]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("/schema"));
    assert_eq!(code(&omc(&["--help"])), 0);
}

#[test]
fn verdict_exit_codes() {
    assert_eq!(code(&omc(&["is-weq", &path("point_a_interval.json")])), 0);
    assert_eq!(code(&omc(&["is-weq", &path("point_a_arrow.json")])), 1);
    assert_eq!(code(&omc(&["is-tfib", &path("interval_to_terminal.json")])), 0);
    assert_eq!(code(&omc(&["is-tfib", &path("arrow_to_terminal.json")])), 1);
    assert_eq!(code(&omc(&["charweq", &path("arrow_into_interval.json")])), 0);
    assert_eq!(code(&omc(&["eqv", &path("interval.json"), "--dim", "0", "--x", "a", "--y", "b"])), 0);
    assert_eq!(code(&omc(&["eqv", &path("walking_arrow.json"), "--dim", "0", "--x", "a", "--y", "a"])), 0);
}

#[test]
fn walking_arrow_negatives_are_refused() {
    let o = omc(&["is-immersion", &path("point_a_arrow.json")]);
    assert_eq!(code(&o), 1);
    let stuck = json(&o)["refusal"]["stuck"].clone();
    assert!(stuck.as_array().unwrap().iter().any(|x| x == "b"), "{stuck}");
    let o = omc(&["lift", &path("reversed_square.json")]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["refusal"]["stuck"], serde_json::json!(["c1"]));
    let o = omc(&["is-immersion", &path("point_a_interval.json")]);
    assert_eq!(code(&o), 0);
    assert!(json(&o)["certificate"]["k"].is_object());
}

#[test]
fn isomorphism_search() {
    let g2 = omc(&["globe", "2"]);
    let tmp = std::env::temp_dir().join(format!("omc-globe2-{}.json", std::process::id()));
    std::fs::write(&tmp, &g2.stdout).unwrap();
    assert_eq!(code(&omc(&["iso", &tmp.to_string_lossy(), &path("globe2.json")])), 0);
    std::fs::remove_file(&tmp).ok();
    assert_eq!(code(&omc(&["iso", &path("globe1.json"), &path("walking_arrow.json")])), 0);
    assert_eq!(code(&omc(&["iso", &path("cyclic3.json"), &path("interval.json")])), 1);
}

#[test]
fn budgets_from_environment() {
    let o = omc_env(&["gamma", &path("globe2.json")], &[("OMC_BUDGET_CYLINDERS", "2")]);
    assert_eq!(code(&o), 2);
    let o = omc_env(&["gamma", &path("globe2.json")], &[("OMC_BUDGET_CYLINDERS", "zero")]);
    assert_eq!(code(&o), 3);
    assert_eq!(code(&omc(&["free", &path("interval.poly.json")])), 2);
    assert_eq!(code(&omc(&["free", &path("interval.poly.json"), "--presented"])), 0);
}

#[test]
fn constructions_emit_valid_categories() {
    let dir = std::env::temp_dir().join(format!("omc-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cases: [(&str, Vec<String>); 6] = [
        ("gamma", vec!["gamma".into(), path("interval.json")]),
        ("glue", vec!["glue".into(), path("point_a_arrow.json")]),
        ("collapse", vec!["collapse".into(), path("globe2.json"), "--dim".into(), "1".into()]),
        ("truncate", vec!["truncate".into(), path("globe2.json"), "--dim".into(), "1".into()]),
        ("include", vec!["include".into(), path("walking_arrow.json"), "--cap".into(), "2".into()]),
        ("free", vec!["free".into(), path("globe2.poly.json")]),
    ];
    for (name, args) in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let o = omc(&args);
        assert_eq!(code(&o), 0, "{name}: {}", String::from_utf8_lossy(&o.stderr));
        let f = dir.join(format!("{name}.json"));
        std::fs::write(&f, &o.stdout).unwrap();
        assert_eq!(code(&omc(&["validate", &f.to_string_lossy()])), 0, "{name}");
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn polygraph_commands() {
    let o = omc(&["pushout-poly", &path("point_into_interval.poly.json"), &path("point_into_two.poly.json")]);
    assert_eq!(code(&o), 0);
    let gens = json(&o)["pushout"]["gens"].as_array().unwrap().len();
    assert_eq!(gens, 7);
    let o = omc(&["soa", &path("walking_arrow.json"), "--stages", "2", "--dim", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["unfilled"], serde_json::json!([]));
}

#[test]
fn every_corpus_file_validates() {
    for entry in std::fs::read_dir(corpus("")).unwrap() {
        let p = entry.unwrap().path();
        let name = p.file_name().unwrap().to_string_lossy().into_owned();
        let want = if name.starts_with("corrupted") { 1 } else { 0 };
        assert_eq!(code(&omc(&["validate", &p.to_string_lossy()])), want, "{name}");
    }
}
