use std::collections::BTreeSet;
use std::process::{Command, Output};

use serde_json::Value;

const TRITANGLE: &str = r#"[["2","5","3","6"],["4","|1","5","2"],["6","3","7|","4"]]"#;
const FOUR_CROSSING: &str = r#"[["3","10|","4","9"],["|1","8","2","|7"],["9","4","8","5"],["2","5","3","6|"]]"#;
const GAUSS: &str = "[[+1,-2,-3,+4,-5,+6,-7,+8,-4,+9],[+10,-11,+7,-12,+13,-8,+3],[-9,+5,-13,+12,-6],[-1,+2,+11,-10]] (o,o,o,c)";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tangleh")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn lines(o: &Output) -> Vec<String> {
    stdout(o).lines().map(str::to_string).collect()
}

#[test]
fn tritangle_classes() {
    let o = run(&["homology", "--pd", TRITANGLE]);
    assert!(o.status.success());
    assert_eq!(
        lines(&o),
        [
            "Detect a homology class of dimension 0 with quantum degree 1.",
            "Detect a homology class of dimension 2 with quantum degree 5.",
            "Detect a homology class of dimension 3 with quantum degree 7.",
        ]
    );
    assert!(stderr(&o).contains("warning"));
}

#[test]
fn legacy_grading_prints_decimals() {
    let o = run(&["homology", "--pd", TRITANGLE, "--signs", "+++", "--legacy-grading"]);
    assert!(o.status.success());
    let got = lines(&o);
    assert_eq!(got.len(), 3);
    for (line, q) in got.iter().zip(["1.0", "5.0", "7.0"]) {
        assert!(line.ends_with(&format!("quantum degree {q}.")), "{line}");
    }
    assert!(!stderr(&o).contains("warning"));
}

#[test]
fn free_circle() {
    let o = run(&["homology", "--pd", r#"{"pd":[],"free":{"circles":1}}"#]);
    assert!(o.status.success());
    assert_eq!(
        lines(&o),
        [
            "Detect a homology class of dimension 0 with quantum degree -1.",
            "Detect a homology class of dimension 0 with quantum degree 1.",
        ]
    );
}

#[test]
fn fields_and_checks() {
    for field in ["q", "gf2", "gfp:3", "GF2"] {
        let o = run(&["homology", "--pd", TRITANGLE, "--field", field, "--euler-check"]);
        assert!(o.status.success(), "{field}: {}", stderr(&o));
        assert!(stdout(&o).contains("Euler characteristic check passed: q + q^5 - q^7"));
    }
    let bad = run(&["homology", "--pd", TRITANGLE, "--field", "gfp:4"]);
    assert_eq!(bad.status.code(), Some(1));
    let min_zero = run(&["homology", "--pd", TRITANGLE, "--normalize", "min-zero"]);
    assert!(stdout(&min_zero).contains("dimension 0 with quantum degree 0."));
    assert!(stdout(&min_zero).contains("dimension 3 with quantum degree 6."));
}

#[test]
fn malformed_input_names_the_label() {
    let o = run(&["homology", "--pd", r#"[["1","1","1","2"]]"#]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("`1`"), "{}", stderr(&o));
    let syntax = run(&["homology", "--pd", "[[\"1\""]);
    assert_eq!(syntax.status.code(), Some(1));
    let signs = run(&["homology", "--pd", TRITANGLE, "--signs", "++"]);
    assert_eq!(signs.status.code(), Some(1));
    let capped = run(&["homology", "--pd", TRITANGLE, "--max-n", "2"]);
    assert_eq!(capped.status.code(), Some(1));
}

#[test]
fn exactly_one_input_source() {
    assert_eq!(run(&["homology"]).status.code(), Some(1));
    assert_eq!(run(&["homology", "--pd", TRITANGLE, "--file", "x.json"]).status.code(), Some(1));
    assert_eq!(run(&["homology", "--file", "/nonexistent/pd.json"]).status.code(), Some(1));
    assert_eq!(run(&["homology", "--gauss", GAUSS]).status.code(), Some(1));
}

#[test]
fn file_input() {
    let path = std::env::temp_dir().join(format!("tangleh-{}.json", std::process::id()));
    std::fs::write(&path, format!(r#"{{"pd": {TRITANGLE}, "signs": "-++"}}"#)).unwrap();
    let o = run(&["homology", "--file", path.to_str().unwrap()]);
    std::fs::remove_file(&path).unwrap();
    assert!(o.status.success());
    // one negative crossing moves every class by (-1, -3)
    assert_eq!(
        lines(&o),
        [
            "Detect a homology class of dimension -1 with quantum degree -2.",
            "Detect a homology class of dimension 1 with quantum degree 2.",
            "Detect a homology class of dimension 2 with quantum degree 4.",
        ]
    );
}

fn component_set(text: &str) -> BTreeSet<(String, BTreeSet<String>)> {
    text.lines()
        .skip(1)
        .map(|l| {
            let (labels, kind) = l.split_once(" (Type: ").unwrap();
            (kind.trim_end_matches(')').to_string(), labels.split('~').map(str::to_string).collect())
        })
        .collect()
}

fn set(entries: &[(&str, &[&str])]) -> BTreeSet<(String, BTreeSet<String>)> {
    entries.iter().map(|(k, ls)| (k.to_string(), ls.iter().map(|s| s.to_string()).collect())).collect()
}

#[test]
fn smoothing_listing() {
    let o = run(&["smooth", "--pd", FOUR_CROSSING, "--state", "0000"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("Smoothing State: 0000\n"));
    assert_eq!(
        component_set(&out),
        set(&[("arc", &["|1", "|7"]), ("arc", &["2", "4", "6|", "8", "10|"]), ("circle", &["3", "5", "9"])])
    );
    // the complementary state gives the arc/circle/arc listing with 4~9
    let o = run(&["smooth", "--pd", FOUR_CROSSING, "--state", "1110"]);
    assert_eq!(
        component_set(&stdout(&o)),
        set(&[("arc", &["10|", "3", "5", "8", "|1"]), ("circle", &["4", "9"]), ("arc", &["2", "6|", "|7"])])
    );
    assert_eq!(run(&["smooth", "--pd", FOUR_CROSSING, "--state", "00"]).status.code(), Some(1));
    assert_eq!(run(&["smooth", "--pd", FOUR_CROSSING, "--state", "0a00"]).status.code(), Some(1));
}

#[test]
fn local_maps() {
    let o = run(&["localmap", "--pd", FOUR_CROSSING, "--from", "0000", "--to", "0100"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("Transition Type: saddle\n"));
    assert!(out.contains("\nPre-State Elements:\n"));
    assert!(out.contains("\nPost-State Elements:\n"));
    let coefficients: Vec<&str> = out.lines().filter(|l| l.contains(": Coefficient = ")).collect();
    // two circles on each side: 2 × 2 basis pairs, all zero across arcs
    assert_eq!(coefficients.len(), 4);
    assert!(coefficients.iter().all(|l| l.ends_with("= 0")));
    let split = run(&["localmap", "--pd", FOUR_CROSSING, "--from", "0001", "--to", "0011"]);
    assert!(stdout(&split).starts_with("Transition Type: split_arc_circle\n"), "{}", stdout(&split));
    // w splits to w ⊗ v_- only
    let ones: Vec<String> =
        stdout(&split).lines().filter(|l| l.ends_with("Coefficient = 1")).map(str::to_string).collect();
    assert_eq!(ones.len(), 1);
    assert!(ones[0].contains("→ w(['|1','|7']) ⊗ v_-("), "{}", ones[0]);
    assert_eq!(run(&["localmap", "--pd", FOUR_CROSSING, "--from", "0000", "--to", "0011"]).status.code(), Some(1));
}

#[test]
fn euler_command() {
    let o = run(&["euler", "--pd", TRITANGLE]);
    assert_eq!(stdout(&o), "q + q^5 - q^7\n");
    let j: Value = serde_json::from_str(&stdout(&run(&["euler", "--pd", TRITANGLE, "--json"]))).unwrap();
    assert_eq!(j["euler"], "q + q^5 - q^7");
}

#[test]
fn fuzz_campaign() {
    let o = run(&["fuzz", "--seed", "11", "--max-n", "4", "--moves", "r1,r2", "--trials", "15"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("15 trials, no homology changes"));
    let r1_only = run(&["fuzz", "--seed", "5", "--max-n", "3", "--moves", "r1", "--trials", "5"]);
    assert!(r1_only.status.success());
    assert_eq!(run(&["fuzz", "--moves", "r3"]).status.code(), Some(1));
}

#[test]
fn validation() {
    let g = run(&["validate", "--gauss", GAUSS]);
    assert!(g.status.success());
    assert_eq!(stdout(&g), "valid Gauss code: 4 component(s), 13 crossing(s), topology (o,o,o,c)\n");
    let p = run(&["validate", "--pd", TRITANGLE, "--signs", "+-+"]);
    assert!(stdout(&p).contains("3 crossing(s), 2 boundary label(s), 5 internal label(s)"));
    assert!(stdout(&p).contains("signs +-+\n"));
    let bad = run(&["validate", "--pd", r#"[["1","2","3","4"]]"#]);
    assert_eq!(bad.status.code(), Some(1));
    let bad_gauss = run(&["validate", "--gauss", "[[+1,-1,+2]] (c)"]);
    assert_eq!(bad_gauss.status.code(), Some(1));
}

#[test]
fn json_is_deterministic() {
    let args = ["homology", "--pd", TRITANGLE, "--json"];
    let (a, b) = (run(&args), run(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let doc: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["n"], 3);
    assert_eq!(doc["field"], "Q");
    assert_eq!(doc["default_signs"], true);
    assert_eq!(doc["euler"], "q + q^5 - q^7");
    let classes: Vec<(i64, i64, u64)> = doc["homology"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| (e["k"].as_i64().unwrap(), e["q"].as_i64().unwrap(), e["dim"].as_u64().unwrap()))
        .collect();
    assert_eq!(classes, [(0, 1, 1), (2, 5, 1), (3, 7, 1)]);
    let top = &doc["homology"][2]["generators"][0][0];
    assert_eq!(top["factors"], serde_json::json!(["w", "v_+", "v_+"]));
    let heights: Vec<u64> = doc["by_height"].as_array().unwrap().iter().map(|h| h["dim"].as_u64().unwrap()).collect();
    assert_eq!(heights, [1, 0, 1, 1]);
}
