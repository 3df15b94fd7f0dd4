//! End-to-end tests through the compiled binary: document shape, format
//! switches, exit codes, determinism, and output-file routing.

use std::path::PathBuf;
use std::process::Command;

use primehit::{render_decimal, RoundMode};
use rug::ops::Pow;
use rug::{Integer, Rational};
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    run_with(args, &[])
}

fn run_with(args: &[&str], envs: &[(&str, &str)]) -> (i32, String, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_primehit"));
    cmd.args(args).env_remove("PRIMEHIT_OUT_DIR");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("spawn primehit");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).expect("utf-8 stdout"),
        String::from_utf8(out.stderr).expect("utf-8 stderr"),
    )
}

fn json(stdout: &str) -> Value {
    serde_json::from_str(stdout).expect("stdout is a json document")
}

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("primehit-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn json_document_has_a_stable_shape() {
    let (code, out, _) = run(&[
        "exact",
        "--k-max",
        "20",
        "--sieve-limit",
        "2000",
        "--no-certify",
    ]);
    assert_eq!(code, 0);
    let doc = json(&out);
    let keys: Vec<&String> = doc.as_object().unwrap().keys().collect();
    assert_eq!(
        keys,
        ["assumptions", "config", "results", "timings", "version"]
    );

    assert_eq!(doc["config"]["command"], "exact");
    assert_eq!(doc["config"]["k_max"], 20);
    assert_eq!(doc["config"]["sides"], 6);
    assert_eq!(doc["config"]["certify"], false);
    assert_eq!(doc["results"]["k_max"], 20);
    for field in ["e_k", "e2_k", "var_k"] {
        let entry = &doc["results"][field];
        assert!(entry["decimal"].is_string(), "{field} decimal");
        assert!(entry["numerator"].is_string(), "{field} numerator");
        assert!(entry["denominator_exponent"].is_u64(), "{field} exponent");
    }
    assert_eq!(doc["version"], env!("CARGO_PKG_VERSION"));
    assert!(doc["timings"]["dp_s"].is_f64());
}

#[test]
fn default_exact_run_emits_the_certified_flagship_values() {
    let (code, out, _) = run(&["exact"]);
    assert_eq!(code, 0);
    let doc = json(&out);
    assert_eq!(doc["results"]["e_k"]["decimal"], "2.428497913693504");
    assert_eq!(doc["results"]["var_k"]["decimal"], "6.242778668279075");

    let tail = &doc["results"]["tail"];
    let lower: f64 = tail["e_interval"]["lower"]
        .as_str()
        .unwrap()
        .parse()
        .unwrap();
    let upper: f64 = tail["e_interval"]["upper"]
        .as_str()
        .unwrap()
        .parse()
        .unwrap();
    assert!(
        lower >= 2.42849791 && upper <= 2.42849799,
        "[{lower}, {upper}]"
    );
    let r: f64 = tail["r_upper"].as_str().unwrap().parse().unwrap();
    assert!(r <= 7.0e-8, "r_upper = {r}");
    assert_eq!(tail["pnt_verified_to"], 10_000_000);
    assert_eq!(doc["assumptions"].as_array().unwrap().len(), 2);
}

#[test]
fn csv_rows_rederive_their_decimal_column() {
    let (code, out, _) = run(&[
        "exact",
        "--k-max",
        "8",
        "--sieve-limit",
        "1000",
        "--format",
        "csv",
    ]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(
        lines.next().unwrap(),
        "k,p_k_numerator,p_k_denominator_exponent,p_k_decimal"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[0], "1,1,0,1.000000000000000");
    assert_eq!(rows[1], "2,3,1,0.500000000000000");

    for row in rows {
        let cols: Vec<&str> = row.split(',').collect();
        let num: Integer = cols[1].parse().unwrap();
        let exp: u32 = cols[2].parse().unwrap();
        let value = Rational::from((num, Integer::from(6u32).pow(exp)));
        assert_eq!(
            render_decimal(&value, 15, RoundMode::Nearest),
            cols[3],
            "row {}",
            cols[0]
        );
    }
}

#[test]
fn text_format_prints_the_moments() {
    let (code, out, _) = run(&[
        "exact",
        "--k-max",
        "5",
        "--sieve-limit",
        "1000",
        "--no-certify",
        "--format",
        "text",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("E_K   = "), "{out}");
    assert!(out.contains("Var_K = "), "{out}");
}

#[test]
fn precision_digits_controls_rendering() {
    let (code, out, _) = run(&[
        "exact",
        "--k-max",
        "2",
        "--sieve-limit",
        "100",
        "--no-certify",
        "--precision-digits",
        "3",
    ]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["results"]["e_k"]["decimal"], "1.500");
}

#[test]
fn bounds_reports_certified_intervals() {
    let (code, out, _) = run(&["bounds", "--sieve-limit", "20000", "--n-cut", "20000"]);
    assert_eq!(code, 0);
    let doc = json(&out);
    let results = &doc["results"];
    assert_eq!(results["k"], 1000);
    assert_eq!(results["precision_bits"], 128);
    assert_eq!(results["pnt_verified_to"], 20_000);
    let r: f64 = results["r_upper"].as_str().unwrap().parse().unwrap();
    assert!(r > 4.0e-8 && r < 4.1e-8, "r_upper = {r}");
    assert!(results["e_interval"]["lower"]
        .as_str()
        .unwrap()
        .starts_with("2.42849791"));
    assert_eq!(doc["assumptions"].as_array().unwrap().len(), 2);
}

#[test]
fn simulate_is_deterministic_for_any_worker_count() {
    let base = [
        "simulate",
        "--reps",
        "200000",
        "--seed",
        "7",
        "--sieve-limit",
        "60000",
    ];
    let (code_a, out_a, _) = run(&[&base[..], &["--workers", "2"]].concat());
    let (code_b, out_b, _) = run(&[&base[..], &["--workers", "5"]].concat());
    assert_eq!((code_a, code_b), (0, 0));
    let (a, b) = (json(&out_a), json(&out_b));
    assert_eq!(a["results"], b["results"]);
    assert_ne!(a["config"]["workers"], b["config"]["workers"]);

    let results = &a["results"];
    assert_eq!(results["completed"], 200_000);
    assert_eq!(results["cap_overflow"], 0);
    let mean = results["mean"].as_f64().unwrap();
    assert!((mean - 2.4285).abs() < 0.05, "mean = {mean}");
}

#[test]
fn simulate_text_format_summarizes() {
    let (code, out, _) = run(&[
        "simulate",
        "--reps",
        "1000",
        "--seed",
        "1",
        "--sieve-limit",
        "60000",
        "--format",
        "text",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("mean(tau)"), "{out}");
}

#[test]
fn verify_passes_and_prints_one_line_per_sweep() {
    let (code, out, _) = run(&["verify", "--sieve-limit", "5000", "--format", "text"]);
    assert_eq!(code, 0);
    for sweep in [
        "proposition-bound",
        "prime-count-lower-bound",
        "tail-function-scans",
        "dp-vs-enumeration",
    ] {
        assert!(
            out.contains(&format!("PASS {sweep}")),
            "missing {sweep} in {out}"
        );
    }
    assert!(out.contains("all sweeps passed"), "{out}");
}

#[test]
fn custom_target_downgrades_exact_to_exit_3() {
    let dir = scratch_dir("target");
    let target = dir.join("composites.txt");
    std::fs::write(&target, "4\n9\n").unwrap();

    let (code, out, err) = run(&[
        "exact",
        "--k-max",
        "5",
        "--sieve-limit",
        "100",
        "--target",
        target.to_str().unwrap(),
    ]);
    assert_eq!(code, 3);
    assert!(err.contains("certification unavailable"), "{err}");
    let doc = json(&out);
    assert_eq!(doc["results"]["e_k"]["decimal"], "3.611111111111111");
    assert!(doc["results"]["warning"]
        .as_str()
        .unwrap()
        .contains("custom targets"));
}

#[test]
fn short_truncations_downgrade_exact_to_exit_3() {
    let (code, out, err) = run(&["exact", "--k-max", "1", "--sieve-limit", "100"]);
    assert_eq!(code, 3);
    assert!(err.contains("K >= 1000"), "{err}");
    let doc = json(&out);
    assert_eq!(doc["results"]["e_k"]["decimal"], "1.000000000000000");
    assert_eq!(doc["results"]["var_k"]["decimal"], "0.000000000000000");
}

#[test]
fn preconditions_fail_with_exit_2() {
    let dir = scratch_dir("bad-target");
    let bad = dir.join("bad.txt");
    std::fs::write(&bad, "seven\n").unwrap();
    let target_arg = bad.to_str().unwrap();

    let cases: Vec<Vec<&str>> = vec![
        vec!["bounds", "--k-max", "999", "--sieve-limit", "2000"],
        vec!["bounds", "--sides", "5", "--sieve-limit", "2000"],
        vec!["bounds", "--target", target_arg, "--sieve-limit", "2000"],
        vec!["simulate", "--format", "csv"],
        vec!["simulate", "--target", target_arg],
        vec!["verify", "--sides", "5", "--sieve-limit", "2000"],
        vec!["verify", "--format", "csv"],
        vec![
            "exact",
            "--k-max",
            "5",
            "--sieve-limit",
            "100",
            "--target",
            target_arg,
        ],
        vec![
            "exact",
            "--k-max",
            "5",
            "--sieve-limit",
            "100",
            "--target",
            "/no/such/file.txt",
        ],
        vec!["exact", "--k-max", "0", "--sieve-limit", "100"],
        vec![
            "exact",
            "--sides",
            "1",
            "--k-max",
            "5",
            "--sieve-limit",
            "100",
        ],
        vec![
            "exact",
            "--precision-digits",
            "0",
            "--k-max",
            "5",
            "--sieve-limit",
            "100",
        ],
        vec!["exact", "--sieve-limit", "1"],
    ];
    for case in cases {
        let (code, _, err) = run(&case);
        assert_eq!(code, 2, "{case:?} gave exit {code}, stderr: {err}");
        assert!(!err.is_empty(), "{case:?} was silent");
    }
}

#[test]
fn unknown_arguments_exit_2() {
    let (code, _, _) = run(&["exact", "--no-such-flag"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["frobnicate"]);
    assert_eq!(code, 2);
}

#[test]
fn version_flag_reports_the_package_version() {
    let (code, out, _) = run(&["--version"]);
    assert_eq!(code, 0);
    assert!(out.contains(env!("CARGO_PKG_VERSION")), "{out}");
}

#[test]
fn output_file_routing_honors_the_out_dir() {
    let dir = scratch_dir("outdir");

    // Relative --output joins the out-dir taken from the environment.
    let (code, out, _) = run_with(
        &[
            "exact",
            "--k-max",
            "3",
            "--sieve-limit",
            "100",
            "--no-certify",
            "--output",
            "reports/run.json",
        ],
        &[("PRIMEHIT_OUT_DIR", dir.to_str().unwrap())],
    );
    assert_eq!(code, 0);
    assert!(out.is_empty(), "file output must not echo to stdout");
    let written = std::fs::read_to_string(dir.join("reports/run.json")).unwrap();
    assert_eq!(json(&written)["config"]["k_max"], 3);

    // An absolute --output ignores the out-dir.
    let abs = dir.join("absolute.json");
    let (code, _, _) = run_with(
        &[
            "exact",
            "--k-max",
            "4",
            "--sieve-limit",
            "100",
            "--no-certify",
            "--output",
            abs.to_str().unwrap(),
        ],
        &[("PRIMEHIT_OUT_DIR", dir.join("ignored").to_str().unwrap())],
    );
    assert_eq!(code, 0);
    assert_eq!(
        json(&std::fs::read_to_string(&abs).unwrap())["config"]["k_max"],
        4
    );
}
