//! End-to-end checks of the `qrns` binary: output formats, the exit-code
//! contract, and reproducibility of seeded runs.

use std::process::{Command, Output};

fn qrns(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrns"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(out)).expect("stdout is valid JSON")
}

#[test]
fn estimate_proposed_design_mod17() {
    let out = qrns(&[
        "estimate", "--design", "mod2n+1", "--n", "4", "--format", "json",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["qubits"], 50);
    assert_eq!(v["toffoli_count"], 55);
    assert_eq!(v["toffoli_depth"], 54);
    assert_eq!(v["cnot_count"], 218);
    assert_eq!(v["cnot_depth"], 211);
}

#[test]
fn estimate_qcla_n6() {
    let out = qrns(&[
        "estimate",
        "--design",
        "munoz-qcla",
        "--n",
        "6",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["toffoli_count"], 191);
    assert_eq!(v["toffoli_depth"], 71);
}

#[test]
fn estimate_text_output_mentions_design() {
    let out = qrns(&["estimate", "--design", "mod2n", "--n", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("MOD_2N"));
    assert!(text.contains("toffoli depth  37"));
}

#[test]
fn estimate_rejects_invalid_width_with_exit_2() {
    let out = qrns(&["estimate", "--design", "mod2n+1", "--n", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn estimate_rejects_unknown_design_with_exit_2() {
    let out = qrns(&["estimate", "--design", "bogus", "--n", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tables_match_golden_files() {
    let cases = [
        ("costs", "csv", include_str!("golden/costs.csv")),
        ("costs", "json", include_str!("golden/costs.json")),
        ("costs", "markdown", include_str!("golden/costs.md")),
        ("comparison", "csv", include_str!("golden/comparison.csv")),
        ("comparison", "json", include_str!("golden/comparison.json")),
        (
            "comparison",
            "markdown",
            include_str!("golden/comparison.md"),
        ),
        (
            "improvements",
            "csv",
            include_str!("golden/improvements.csv"),
        ),
        (
            "improvements",
            "json",
            include_str!("golden/improvements.json"),
        ),
        (
            "improvements",
            "markdown",
            include_str!("golden/improvements.md"),
        ),
    ];
    for (which, format, golden) in cases {
        let out = qrns(&["tables", "--which", which, "--format", format]);
        assert!(out.status.success(), "{which}/{format}");
        assert_eq!(stdout(&out), golden, "{which}/{format} drifted");
    }
}

#[test]
fn tables_reject_unknown_choice_with_exit_2() {
    let out = qrns(&["tables", "--which", "everything"]);
    assert_eq!(out.status.code(), Some(2));
    let out = qrns(&["tables", "--format", "yaml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn synth_emits_parseable_gate_list() {
    let out = qrns(&["synth", "--family", "qdmm", "--k", "2"]);
    assert!(out.status.success());
    let circuit = qrns::circuit::parse_gatelist(&stdout(&out)).expect("parseable gate list");
    assert!(circuit.register("P").is_some());
    // The measured report lands on stderr when no --out is given.
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&out.stderr)).unwrap();
    assert_eq!(report["family"], "qdmm");
}

#[test]
fn synth_writes_file_and_reports_to_stdout() {
    let path = std::env::temp_dir().join(format!("qrns-synth-{}.gl", std::process::id()));
    let out = qrns(&[
        "synth",
        "--family",
        "mod2n",
        "--k",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let report = json(&out);
    assert_eq!(report["family"], "mod2n");
    assert!(report["measured"]["toffoli_count"].as_u64().unwrap() > 0);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(qrns::circuit::parse_gatelist(&text).is_ok());
    std::fs::remove_file(&path).ok();
}

#[test]
fn synth_toffoli_count_is_monotone_in_width() {
    let mut last = 0u64;
    for k in 2..=8u32 {
        let out = qrns(&["synth", "--family", "qdmm", "--k", &k.to_string()]);
        assert!(out.status.success());
        let report: serde_json::Value =
            serde_json::from_str(&String::from_utf8_lossy(&out.stderr)).unwrap();
        let count = report["measured"]["toffoli_count"].as_u64().unwrap();
        assert!(count >= last, "k={k}: {count} < {last}");
        last = count;
    }
}

#[test]
fn synth_rejects_unsupported_width_with_exit_2() {
    let out = qrns(&["synth", "--family", "qdmm", "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn multiply_on_paper_set() {
    let out = qrns(&["multiply", "7", "6", "--paper-set", "3"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["product"], 42);
    assert_eq!(v["matches"], true);
    let residues: Vec<u64> = v["channels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["residue_product"].as_u64().unwrap())
        .collect();
    assert_eq!(residues, vec![0, 2, 2]);
}

#[test]
fn multiply_zero_absorbs() {
    let out = qrns(&["multiply", "0", "13", "--paper-set", "4"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["product"], 0);
}

#[test]
fn multiply_peak_product_on_widest_set() {
    let out = qrns(&["multiply", "255", "255", "--paper-set", "8"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["product"], 65025);
}

#[test]
fn multiply_explicit_set_and_manifest() {
    let dir = std::env::temp_dir().join(format!("qrns-cli-manifest-{}", std::process::id()));
    let out = qrns(&[
        "multiply",
        "9",
        "5",
        "--set",
        "7,8,9",
        "--emit-manifest",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(json(&out)["product"], 45);
    let manifest = std::fs::read_to_string(dir.join("manifest.json")).unwrap();
    let m: serde_json::Value = serde_json::from_str(&manifest).unwrap();
    assert_eq!(m["channels"].as_array().unwrap().len(), 3);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn multiply_range_violation_exits_2() {
    let out = qrns(&["multiply", "59", "59", "--paper-set", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn multiply_requires_exactly_one_set_flag() {
    let out = qrns(&["multiply", "3", "4"]);
    assert_eq!(out.status.code(), Some(2));
    let out = qrns(&["multiply", "3", "4", "--set", "3,4,5", "--paper-set", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_qdmm_exhaustive() {
    let out = qrns(&["verify", "qdmm", "--k", "3"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["total"], 81);
    assert_eq!(v["passed"], 81);
    assert_eq!(v["failed"], 0);
}

#[test]
fn verify_end_to_end_exhaustive_n4() {
    let out = qrns(&["verify", "end-to-end", "--n", "4"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["total"], 256);
    assert_eq!(v["failed"], 0);
}

#[test]
fn verify_companions_via_k_flag() {
    let out = qrns(&["verify", "mod2n", "--k", "3"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["total"], 64);
    let out = qrns(&["verify", "mod2n-1", "--k", "3"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["passed"], 64);
}

#[test]
fn verify_seeded_run_is_bit_reproducible() {
    let args = [
        "verify",
        "end-to-end",
        "--n",
        "6",
        "--samples",
        "64",
        "--seed",
        "99",
    ];
    let first = qrns(&args);
    let second = qrns(&args);
    assert!(first.status.success());
    assert_eq!(
        first.stdout, second.stdout,
        "seeded runs must match bit for bit"
    );
}

#[test]
fn parallelism_env_var_is_accepted() {
    let out = Command::new(env!("CARGO_BIN_EXE_qrns"))
        .args(["multiply", "7", "6", "--paper-set", "3"])
        .env("QRNS_PARALLELISM", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["product"], 42);
}
