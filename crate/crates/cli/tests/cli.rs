use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_arrconn"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("arrconn-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn lauricella_file(name: &str, n: &str, a: &str) -> PathBuf {
    let out = run(&["lauricella", "--n", n, "--a", a]);
    assert_eq!(out.status.code(), Some(0));
    scratch(name, std::str::from_utf8(&out.stdout).unwrap())
}

#[test]
fn lattice_counts_and_errors() {
    let a2 = scratch("a2.json", r#"{"builtin": "A_n", "n": 2}"#);
    let out = run(&["lattice", "--arrangement", a2.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["flat_count"], 5);

    let empty = scratch("empty.json", r#"{"dimension": 2, "hyperplanes": []}"#);
    let out = run(&[
        "lattice",
        "--arrangement",
        empty.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(stdout_json(&out)["flat_count"], 1);

    let bad = scratch(
        "bad.json",
        r#"{"dimension": 1, "hyperplanes": [{"id": "x", "form": [["1/x", "0"]]}]}"#,
    );
    let out = run(&["lattice", "--arrangement", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("hyperplanes[0].form[0][0]"));

    let broken = scratch("broken.json", "{\n\"dimension\": 1,\n\"hyperplanes\": [\n");
    let out = run(&["lattice", "--arrangement", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
}

#[test]
fn lattice_cap_exits_with_three() {
    let a3 = scratch("a3cap.json", r#"{"builtin": "A_n", "n": 3}"#);
    let out = bin()
        .args(["lattice", "--arrangement", a3.to_str().unwrap()])
        .env("ARRCONN_CAP", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn lauricella_emits_the_explicit_a2_matrices() {
    let out = run(&["lauricella", "--n", "2", "--a", "1/10,2/10,0.3"]);
    let v = stdout_json(&out);
    let entry =
        |id: &str, i: usize, j: usize| v["residues"][id][i][j][0].as_str().unwrap().to_string();
    assert_eq!(entry("H_1_3", 0, 0), "2/5");
    assert_eq!(entry("H_1_3", 1, 0), "1/10");
    assert_eq!(entry("H_2_3", 0, 1), "1/5");
    assert_eq!(entry("H_2_3", 1, 1), "1/2");
    assert_eq!(entry("H_1_2", 0, 1), "-1/5");
    assert_eq!(entry("H_1_2", 1, 0), "-1/10");
}

#[test]
fn check_passes_and_fails_with_named_causes() {
    let good = lauricella_file("good.json", "3", "1/10,1/5,-3/7,2");
    let out = run(&["check", "--connection", good.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );

    // Residue of H_1_2 from other parameters: still torsion-free, no longer flat.
    let other = lauricella_file("other.json", "3", "1/2,1/5,-3/7,2");
    let other: Value = serde_json::from_str(&std::fs::read_to_string(&other).unwrap()).unwrap();
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&good).unwrap()).unwrap();
    v["residues"]["H_1_2"] = other["residues"]["H_1_2"].clone();
    let bad = scratch("perturbed.json", &v.to_string());
    let out = run(&["check", "--connection", bad.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let report = stdout_json(&out);
    assert!(report["first_failure"]
        .as_str()
        .unwrap()
        .contains("commutator"));

    let zero = scratch(
        "zero.json",
        r#"{"builtin": "A_n", "n": 1, "residues": {"H_1_2": [[["0", "0"]]]}}"#,
    );
    let out = run(&["check", "--connection", zero.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["nonzero_weights"]["pass"], false);
}

#[test]
fn recover_round_trips_the_emitted_file() {
    let file = lauricella_file("rt.json", "3", "1/10,-2/7,3/10,5/3");
    let out = run(&["recover", "--connection", file.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["a"], serde_json::json!(["1/10", "-2/7", "3/10", "5/3"]));

    let zero = scratch(
        "zero2.json",
        r#"{"builtin": "A_n", "n": 2, "residues": {"H_1_2": [[["0","0"],["0","0"]],[["0","0"],["0","0"]]], "H_1_3": [[["0","0"],["0","0"]],[["0","0"],["0","0"]]], "H_2_3": [[["0","0"],["0","0"]],[["0","0"],["0","0"]]]}}"#,
    );
    let out = run(&["recover", "--connection", zero.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn existence_signature_and_volume() {
    let yes = run(&["pk-exists", "--alpha", "0.9,0.9,0.9", "--json"]);
    assert_eq!(yes.status.code(), Some(0));
    assert_eq!(stdout_json(&yes)["report"]["exists"], true);
    let no = run(&["pk-exists", "--alpha", "0.6,0.6,0.6", "--json"]);
    assert_eq!(no.status.code(), Some(1));
    assert_eq!(
        stdout_json(&no)["report"]["failed"]["condition"],
        "signature"
    );

    let sig = stdout_json(&run(&["signature", "--a", "0.1,0.1,0.1", "--json"]));
    assert_eq!((sig["p"].as_u64(), sig["q"].as_u64()), (Some(0), Some(2)));

    let vol = stdout_json(&run(&["volume", "--alpha", "0.9,0.9,0.9", "--json"]));
    assert!((vol["vol_fs"].as_f64().unwrap() - 0.7 * std::f64::consts::PI).abs() < 1e-12);
    assert_eq!(
        run(&["pk-exists", "--alpha", "0.9,zz"]).status.code(),
        Some(2)
    );
}

#[test]
fn holonomy_report_is_deterministic() {
    let file = lauricella_file("hol.json", "2", "1/10,1/5,3/10");
    let args = [
        "holonomy",
        "--connection",
        file.to_str().unwrap(),
        "--json",
        "--seed",
        "4",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let v = stdout_json(&first);
    assert_eq!(v["meridians"].as_array().unwrap().len(), 3);
    assert_eq!(v["irreducibility"]["verdict"], "irreducible");
    assert_eq!(v["central_spectra"]["pass"], true);
}

#[test]
fn out_flag_writes_the_file() {
    let target = std::env::temp_dir().join(format!("arrconn-cli-out-{}.json", std::process::id()));
    let out = run(&[
        "lauricella",
        "--n",
        "1",
        "--a",
        "1/3,1/4",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&target).unwrap();
    assert!(text.contains("H_1_2"));
    std::fs::remove_file(target).unwrap();
}
