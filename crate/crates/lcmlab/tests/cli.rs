//! End-to-end checks of the command-line surface: determinism, cache
//! behavior, exit codes, and the report schemas.

use std::process::{Command, Output};

fn lcmlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcmlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn lcmlab_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcmlab"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn analyze_is_deterministic_without_timestamp() {
    let args = [
        "analyze",
        "--poly",
        "X^4-2",
        "--N",
        "120,160",
        "--c",
        "2",
        "--no-timestamp",
    ];
    let a = lcmlab(&args);
    let b = lcmlab(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout, "reruns must be byte-identical");
    let text = stdout_of(&a);
    assert!(text.starts_with("poly,N,c,logQ,logL,logell,"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn analyze_timestamp_header_is_sole_difference() {
    let args = ["analyze", "--poly", "X^2+1", "--N", "50"];
    let with_ts = stdout_of(&lcmlab(&args));
    let mut args_no = args.to_vec();
    args_no.push("--no-timestamp");
    let without = stdout_of(&lcmlab(&args_no));
    assert!(with_ts.starts_with("# lcmlab report, generated_unix="));
    let stripped: String = with_ts.lines().skip(1).map(|l| format!("{l}\n")).collect();
    assert_eq!(stripped, without);
}

#[test]
fn warm_cache_reproduces_cold_run_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let dir_str = dir.path().to_str().unwrap();
    let args = [
        "analyze",
        "--poly",
        "X^4-2",
        "--N",
        "150",
        "--cache-dir",
        dir_str,
        "--no-timestamp",
    ];
    let cold = lcmlab(&args);
    assert_eq!(cold.status.code(), Some(0));
    let files: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    assert_eq!(files.len(), 1, "one table cached");
    let cache_text = std::fs::read_to_string(&files[0]).unwrap();
    assert!(cache_text.starts_with("{\"format\":\"lcmlab-factor-table\",\"version\":1,"));
    assert_eq!(cache_text.lines().count(), 151); // header + one record per n

    let warm = lcmlab(&args);
    assert_eq!(warm.status.code(), Some(0));
    assert_eq!(cold.stdout, warm.stdout);
    // a different cutoff must reuse the same cached factorizations
    let other_c = lcmlab(&[
        "analyze",
        "--poly",
        "X^4-2",
        "--N",
        "150",
        "--c",
        "1",
        "--cache-dir",
        dir_str,
        "--no-timestamp",
    ]);
    assert_eq!(other_c.status.code(), Some(0));
    assert_ne!(other_c.stdout, cold.stdout);
}

#[test]
fn cache_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = lcmlab_env(
        &["analyze", "--poly", "X^2+1", "--N", "40", "--no-timestamp"],
        "LCMLAB_CACHE",
        dir.path().to_str().unwrap(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn analyze_rejects_reducible_with_exit_3() {
    let out = lcmlab(&["analyze", "--poly", "X^2-1", "--N", "100"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("reducible"), "stderr: {err}");
    assert!(err.contains("X-1"), "stderr: {err}");
}

#[test]
fn analyze_unknown_requires_override() {
    let rejected = lcmlab(&["analyze", "--poly", "X^4+1", "--N", "100", "--witness-budget", "500"]);
    assert_eq!(rejected.status.code(), Some(3));
    let allowed = lcmlab(&[
        "analyze",
        "--poly",
        "X^4+1",
        "--N",
        "100",
        "--witness-budget",
        "500",
        "--allow-unknown",
        "--no-timestamp",
    ]);
    assert_eq!(allowed.status.code(), Some(0));
}

#[test]
fn analyze_json_mirror() {
    let out = lcmlab(&[
        "analyze",
        "--poly",
        "X^2+1",
        "--N",
        "60",
        "--format",
        "json",
        "--no-timestamp",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let row = &doc["reports"][0];
    assert_eq!(row["poly"], "X^2+1");
    assert_eq!(row["N"], 60);
    assert_eq!(row["c"], "2");
    for key in ["logQ", "logL", "logell", "small_mass", "large_mass"] {
        assert!(row[key].is_f64(), "missing {key}");
    }
}

#[test]
fn verify_theorem_2_exits_zero() {
    let out = lcmlab(&["verify", "--theorem", "2", "--poly", "X^4-2", "--N", "200"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("theorem 2"));
    assert!(text.contains("h=2"));
    assert!(text.contains("-> ok"));
}

#[test]
fn verify_lemma_algnt_prints_u_and_bound() {
    let out = lcmlab(&[
        "verify", "--lemma", "algnt", "--poly", "X^4-2", "--N", "300",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("u=3"), "stdout: {text}");
    assert!(text.contains("violations=0"));
}

#[test]
fn verify_theorem_4_internal_polynomial() {
    let out = lcmlab(&["verify", "--theorem", "4", "--eta", "2", "--N", "150"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("poly=X^4+1"));
    assert!(text.contains("h=4"));
}

#[test]
fn verify_exact_flag() {
    let out = lcmlab(&[
        "verify", "--theorem", "2", "--poly", "X^4-2", "--N", "150", "--exact",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).contains("exact=ok"));
    // ... and refuses past the exact-path size limit
    let out = lcmlab(&[
        "verify", "--theorem", "2", "--poly", "X^4-2", "--N", "600", "--exact",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn factoring_budget_exit_4() {
    // f(1) = (2^89-1)(2^107-1): hopeless at a 1000-iteration rho budget
    let p: u128 = 618970019642690137449562111;
    let q_str = "162259276829213363391578010288127";
    let pq = num_bigint::BigUint::from(p) * q_str.parse::<num_bigint::BigUint>().unwrap();
    let coeffs = format!("{},0,1", &pq - 1u32);
    let out = lcmlab(&[
        "analyze",
        "--poly",
        &coeffs,
        "--N",
        "2",
        "--rho-budget",
        "1000",
        "--allow-unknown",
        "--witness-budget",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(4));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("budget exceeded at n=1"), "stderr: {err}");
}

#[test]
fn tuples_dot_output() {
    let out = lcmlab(&[
        "tuples", "--filter", "baierdey", "--eta", "2", "--format", "dot",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.starts_with("digraph profiles {"));
    assert!(text.contains("\"(2)\" -> \"(2,1)\";"));
}

#[test]
fn tuples_generic_closed_form_line() {
    let out = lcmlab(&["tuples", "--filter", "generic", "--d", "4", "--u", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("max_weight: 5"));
    assert!(text.contains("closed_form: 5"));
}

#[test]
fn rejects_malformed_input() {
    assert_eq!(
        lcmlab(&["analyze", "--poly", "2X^2+1", "--N", "50"]).status.code(),
        Some(3)
    );
    assert_eq!(
        lcmlab(&["analyze", "--poly", "X^2+1", "--N", "100,50"]).status.code(),
        Some(3)
    );
    assert_eq!(
        lcmlab(&["verify", "--poly", "X^2+1", "--N", "100"]).status.code(),
        Some(3),
        "verify without --theorem/--lemma is rejected"
    );
}
