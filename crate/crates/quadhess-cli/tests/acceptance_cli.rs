//! CLI contract acceptance: golden-file checks for verify/checkpoints on
//! the circle, sphere and paraboloid fixtures, byte-identical re-runs, the
//! exit-code contract and JSON report round-trips.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_quadhess"))
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_str()
        .unwrap()
        .to_owned()
}

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn check_golden(name: &str, args: &[&str], expect_code: i32) {
    let out = run(args);
    assert_eq!(out.status.code(), Some(expect_code), "{args:?}");
    assert_eq!(stdout_of(&out), golden(name), "golden mismatch for {name}");
    // Re-runs are byte-identical.
    let again = run(args);
    assert_eq!(out.stdout, again.stdout, "non-deterministic stdout for {name}");
}

#[test]
fn golden_verify_circle_exact() {
    check_golden(
        "verify_circle_exact.txt",
        &[
            "verify",
            "--q",
            &fixture("circle.json"),
            "--point",
            "3/5",
            "--branch",
            "plus",
            "--mode",
            "exact",
        ],
        0,
    );
}

#[test]
fn golden_verify_circle_skip() {
    check_golden(
        "verify_circle_skip.txt",
        &[
            "verify",
            "--q",
            &fixture("circle.json"),
            "--point",
            "2",
            "--mode",
            "exact",
        ],
        2,
    );
}

#[test]
fn golden_verify_sphere_exact() {
    check_golden(
        "verify_sphere_exact.txt",
        &[
            "verify",
            "--q",
            &fixture("sphere.json"),
            "--point",
            "3/5,0",
            "--branch",
            "minus",
            "--mode",
            "exact",
        ],
        0,
    );
}

#[test]
fn golden_verify_paraboloid_float() {
    check_golden(
        "verify_paraboloid_float.txt",
        &[
            "verify",
            "--q",
            &fixture("paraboloid.json"),
            "--point",
            "1,1",
            "--mode",
            "float",
        ],
        0,
    );
}

#[test]
fn golden_checkpoints() {
    check_golden(
        "checkpoints_circle.txt",
        &[
            "checkpoints",
            "--q",
            &fixture("circle.json"),
            "--point",
            "0",
            "--mode",
            "exact",
        ],
        0,
    );
    check_golden(
        "checkpoints_sphere.txt",
        &[
            "checkpoints",
            "--q",
            &fixture("sphere.json"),
            "--point",
            "0,0",
            "--mode",
            "exact",
        ],
        0,
    );
    // Paraboloid: Lambda is singular, so three checkpoints report undefined
    // without failing the run.
    check_golden(
        "checkpoints_paraboloid.txt",
        &[
            "checkpoints",
            "--q",
            &fixture("paraboloid.json"),
            "--point",
            "1,1",
            "--mode",
            "exact",
        ],
        0,
    );
}

#[test]
fn golden_verify_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("report.json");
    let out = run(&[
        "verify",
        "--q",
        &fixture("circle.json"),
        "--point",
        "3/5",
        "--branch",
        "plus",
        "--mode",
        "exact",
        "--json",
        json_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let written = std::fs::read_to_string(&json_path).unwrap();
    assert_eq!(written, golden("verify_circle_exact.json"));
}

#[test]
fn exit_code_contract() {
    // 0: verified (covered by the goldens). 1: identity failure, forced by
    // an absurd tolerance on a floating run.
    let out = run(&[
        "verify",
        "--q",
        &fixture("circle.json"),
        "--point",
        "0.6",
        "--mode",
        "float",
        "--tol",
        "1e-30",
    ]);
    assert_eq!(out.status.code(), Some(1));

    // 2: skipped preconditions.
    let out = run(&[
        "verify",
        "--q",
        &fixture("paraboloid.json"),
        "--point",
        "1,1",
        "--mode",
        "exact",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // 64: malformed input, wrong fixed mode, bad flags, bad env.
    for args in [
        vec!["verify", "--q", "missing.json", "--point", "1", "--mode", "exact"],
        vec![
            "verify",
            "--q",
            &fixture("circle.json"),
            "--point",
            "0.6",
            "--mode",
            "exact",
        ],
        vec![
            "checkpoints",
            "--q",
            &fixture("circle.json"),
            "--point",
            "0",
            "--mode",
            "float",
        ],
        vec!["verify", "--nonsense"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(64), "{args:?}");
    }

    let out = bin()
        .args(["sample", "--n", "1", "--trials", "2", "--seed", "1", "--mode", "exact"])
        .env("QUADHESS_THREADS", "nope")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn sample_sweep_passes_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for (path, threads) in [(&a, "1"), (&b, "3")] {
        let out = bin()
            .args([
                "sample", "--n", "2", "--trials", "200", "--seed", "7", "--mode", "exact",
                "--json",
            ])
            .arg(path)
            .env("QUADHESS_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        let text = stdout_of(&out);
        assert!(text.contains("failed: 0"), "{text}");
    }
    // Identical reports regardless of the thread count.
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    // Round-trip: re-summarizing the parsed records reproduces the summary.
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&a).unwrap()).unwrap();
    let records = parsed["records"].as_array().unwrap();
    assert_eq!(records.len(), 200);
    let mut verified = 0;
    let mut skipped = 0;
    let mut failed = 0;
    for r in records {
        match r["status"].as_str().unwrap() {
            "verified" => verified += 1,
            "skipped" => skipped += 1,
            _ => failed += 1,
        }
    }
    assert_eq!(parsed["summary"]["verified"], verified);
    assert_eq!(parsed["summary"]["skipped"], skipped);
    assert_eq!(parsed["summary"]["failed"], failed);
    assert_eq!(failed, 0);
}

#[test]
fn checkpoints_with_singular_leading_block() {
    // 2xy + y^2 - 1 = 0: the leading block A = [0] is singular while
    // Lambda = [-1] is not, so the A-dependent checkpoints report undefined
    // and the run still exits 0.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tilted.json");
    std::fs::write(
        &path,
        r#"{"n": 1, "kind": "rational", "entries": [[0, 1, 0], [1, 1, 0], [0, 0, -1]]}"#,
    )
    .unwrap();
    let out = run(&[
        "checkpoints",
        "--q",
        path.to_str().unwrap(),
        "--point",
        "1/2",
        "--mode",
        "exact",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("disc_hessian_det: undefined (singular A)"), "{text}");
    assert!(text.contains("constant_bracket: 8 = 8 [ok]"), "{text}");
    assert!(text.contains("det_scaling: 64 = 64 [ok]"), "{text}");
    assert!(text.contains("schur_complement_det: undefined (singular A)"), "{text}");
    assert!(text.contains("all defined checkpoints agree"), "{text}");
}

#[test]
fn verify_complex_mode() {
    let out = run(&[
        "verify",
        "--q",
        &fixture("circle.json"),
        "--point",
        "[0.6,0.0]",
        "--mode",
        "complex",
        "--tol",
        "1e-6",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("status: verified"), "{text}");
    assert!(text.contains("mode: complex"), "{text}");
}

#[test]
fn sample_float_and_complex_modes_pass() {
    for mode in ["float", "complex"] {
        let out = run(&[
            "sample", "--n", "2", "--trials", "100", "--seed", "5", "--mode", mode,
        ]);
        assert_eq!(out.status.code(), Some(0), "mode {mode}");
        assert!(stdout_of(&out).contains("failed: 0"));
    }
}

#[test]
fn bench_csv_shape_and_oracle_agreement() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("bench.csv");
    let out = run(&[
        "bench",
        "--n-list",
        "2,4,8",
        "--reps",
        "20",
        "--seed",
        "11",
        "--csv",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let lines: Vec<&str> = csv.trim_end().lines().collect();
    assert_eq!(lines[0], "n,method,mean_ns,max_abs_discrepancy");
    assert_eq!(lines.len(), 7, "header plus six data rows");
    for line in &lines[1..] {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 4);
        let disc: f64 = cols[3].parse().unwrap();
        assert!(disc <= 1e-4, "cross-discrepancy too large: {line}");
    }
    // The closed form evaluates strictly fewer roots than the stencil.
    let text = stdout_of(&out);
    for n in [2usize, 4, 8] {
        let evals = 2 * n * n + 1;
        assert!(text.contains(&format!("{evals}")), "fd root-eval count for n={n}");
    }
}
