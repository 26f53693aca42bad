//! Exit-code contract and output determinism, driven through the binary.

use std::process::{Command, Output};

const A1: &str = r#"{"vertices":[0],"cartan":[[2]]}"#;
const A1AFF: &str = r#"{"vertices":[0,1],"cartan":[[2,-2],[-2,2]]}"#;
const A2AFF: &str = r#"{"vertices":[0,1,2],"cartan":[[2,-1,-1],[-1,2,-1],[-1,-1,2]]}"#;

fn ysh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ysh"))
        .args(args)
        .env_remove("YSH_BUDGET_SECONDS")
        .output()
        .expect("binary runs")
}

fn ysh_with_budget(args: &[&str], budget: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ysh"))
        .args(args)
        .env("YSH_BUDGET_SECONDS", budget)
        .output()
        .expect("binary runs")
}

fn fixture(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn exit_zero_when_all_checks_pass() {
    let dir = tempfile::tempdir().unwrap();
    let q = fixture(&dir, "a1.json", A1);
    let out = ysh(&["verify", "y4", "--quiver", &q, "--max-mode", "1"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("outcome: PASS"));
}

#[test]
fn exit_one_when_a_check_fails() {
    // at the delta weight the two central-placement conventions differ
    // already in degree 0, so forcing the wrong one fails fast
    let dir = tempfile::tempdir().unwrap();
    let q = fixture(&dir, "a2aff.json", A2AFF);
    let out = ysh(&[
        "pbw", "table", "--quiver", &q, "--weight", "1,1,1", "--max-degree", "0",
        "--convention", "k-at-l",
    ]);
    assert_eq!(code(&out), 1);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("outcome: FAIL"));
    assert!(text.contains("FAIL"));
}

#[test]
fn exit_two_on_usage_and_environment_errors() {
    let dir = tempfile::tempdir().unwrap();
    let q = fixture(&dir, "a1.json", A1);

    let bogus = ysh(&["frobnicate"]);
    assert_eq!(code(&bogus), 2);

    let missing = ysh(&["quiver", "validate", "--quiver", "/nonexistent/q.json"]);
    assert_eq!(code(&missing), 2);
    assert!(String::from_utf8_lossy(&missing.stderr).contains("ysh:"));

    let bad_pairs = ysh(&["verify", "y4", "--quiver", &q, "--pairs", "0:zebra"]);
    assert_eq!(code(&bad_pairs), 2);

    let bad_seed = ysh(&["verify", "y4", "--quiver", &q, "--seed", "0xGG"]);
    assert_eq!(code(&bad_seed), 2);

    let bad_budget = ysh_with_budget(&["verify", "y4", "--quiver", &q], "soon");
    assert_eq!(code(&bad_budget), 2);
    assert!(String::from_utf8_lossy(&bad_budget.stderr).contains("YSH_BUDGET_SECONDS"));

    let help = ysh(&["--help"]);
    assert_eq!(code(&help), 0, "help is not an error");
}

#[test]
fn malformed_quiver_files_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();

    let unknown = fixture(&dir, "u.json", r#"{"vertices":[0],"cartan":[[2]],"color":"red"}"#);
    let out = ysh(&["quiver", "validate", "--quiver", &unknown]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("u.json"), "error names the file: {err}");

    let both = fixture(
        &dir,
        "b.json",
        r#"{"vertices":[0],"cartan":[[2]],"arrows":[]}"#,
    );
    let out = ysh(&["quiver", "validate", "--quiver", &both]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not both"));

    let dangling = fixture(
        &dir,
        "d.json",
        r#"{"vertices":["a"],"arrows":[{"out":"a","inc":"z"}]}"#,
    );
    let out = ysh(&["quiver", "validate", "--quiver", &dangling]);
    assert_eq!(code(&out), 2);
}

#[test]
fn json_reports_are_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let q = fixture(&dir, "a2aff.json", A2AFF);
    let args = [
        "verify",
        "fac-embedding",
        "--quiver",
        &q,
        "--count",
        "4",
        "--output",
        "json",
    ];
    let first = ysh(&args);
    let second = ysh(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout, "same seed, same bytes");

    let reseeded = ysh(&[
        "verify",
        "fac-embedding",
        "--quiver",
        &q,
        "--count",
        "4",
        "--output",
        "json",
        "--seed",
        "7",
    ]);
    assert_eq!(code(&reseeded), 0);
    assert_ne!(first.stdout, reseeded.stdout, "seed is part of the report");
}

#[test]
fn seed_accepts_hex_and_decimal_spellings() {
    let dir = tempfile::tempdir().unwrap();
    let q = fixture(&dir, "a2aff.json", A2AFF);
    let hex = ysh(&[
        "verify", "fac-embedding", "--quiver", &q, "--count", "2", "--output", "json",
        "--seed", "0xCAFE",
    ]);
    let dec = ysh(&[
        "verify", "fac-embedding", "--quiver", &q, "--count", "2", "--output", "json",
        "--seed", "51966",
    ]);
    assert_eq!(code(&hex), 0);
    assert_eq!(hex.stdout, dec.stdout);
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let q = fixture(&dir, "a1.json", A1);
    let target = dir.path().join("report.json");
    let target_s = target.display().to_string();

    let streamed = ysh(&["quiver", "validate", "--quiver", &q, "--output", "json"]);
    let filed = ysh(&[
        "quiver", "validate", "--quiver", &q, "--output", "json", "--out", &target_s,
    ]);
    assert_eq!(code(&filed), 0);
    assert!(filed.stdout.is_empty(), "nothing on stdout when writing a file");
    let written = std::fs::read(&target).unwrap();
    assert_eq!(written, streamed.stdout, "file and stream carry the same bytes");

    let unwritable = ysh(&[
        "quiver", "validate", "--quiver", &q, "--out", "/nonexistent/dir/r.json",
    ]);
    assert_eq!(code(&unwritable), 2);
}

#[test]
fn shuffle_mul_multiplies_element_files() {
    let dir = tempfile::tempdir().unwrap();
    let q = fixture(&dir, "a1.json", A1);
    let elems = fixture(
        &dir,
        "elems.json",
        r#"[{"weight":[1],"poly":"1"},{"weight":[1],"poly":"1"}]"#,
    );
    let out = ysh(&["shuffle", "mul", "--quiver", &q, "--elements", &elems]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("(2)"), "product weight shown: {text}");
    assert!(text.contains('2'), "x0 * x0 = 2: {text}");

    let one = fixture(&dir, "one.json", r#"[{"weight":[1],"poly":"1"}]"#);
    let short = ysh(&["shuffle", "mul", "--quiver", &q, "--elements", &one]);
    assert_eq!(code(&short), 2, "fewer than two factors is a usage error");

    let empty = fixture(&dir, "none.json", "");
    let nothing = ysh(&["shuffle", "mul", "--quiver", &q, "--elements", &empty]);
    assert_eq!(code(&nothing), 2);

    let asym = fixture(&dir, "asym.json", r#"[{"weight":[2],"poly":"l(0,1)"}]"#);
    let bad = ysh(&["shuffle", "mul", "--quiver", &q, "--elements", &asym]);
    assert_eq!(code(&bad), 2);
    assert!(String::from_utf8_lossy(&bad.stderr).contains("entry 0"));
}

#[test]
fn shuffle_mul_inline_flags_conflict_with_element_files() {
    let dir = tempfile::tempdir().unwrap();
    let q = fixture(&dir, "a1.json", A1);
    let elems = fixture(&dir, "e.json", r#"[{"weight":[1],"poly":"1"}]"#);

    let conflict = ysh(&[
        "shuffle", "mul", "--quiver", &q, "--elements", &elems,
        "--lhs", "x(0,0)", "--rhs", "x(0,0)",
    ]);
    assert_eq!(code(&conflict), 2);

    let lonely = ysh(&["shuffle", "mul", "--quiver", &q, "--lhs", "x(0,0)"]);
    assert_eq!(code(&lonely), 2, "--lhs needs --rhs");

    let inline = ysh(&["shuffle", "mul", "--quiver", &q, "--lhs", "x(0,0)", "--rhs", "x(0,0)"]);
    assert_eq!(code(&inline), 0, "{}", String::from_utf8_lossy(&inline.stderr));
    assert!(String::from_utf8_lossy(&inline.stdout).contains('2'));
}

#[test]
fn parallel_arrows_warn_but_do_not_fail() {
    let dir = tempfile::tempdir().unwrap();
    let q = fixture(&dir, "a1aff.json", A1AFF);
    let out = ysh(&["quiver", "validate", "--quiver", &q]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("parallel"), "doubled arrow noted: {text}");
}

#[test]
fn time_budget_trips_with_exit_two_and_no_report() {
    let dir = tempfile::tempdir().unwrap();
    let q = fixture(&dir, "a2aff.json", A2AFF);
    // zero is rejected up front: the budget must be positive
    let zero = ysh_with_budget(&["verify", "y4", "--quiver", &q], "0");
    assert_eq!(code(&zero), 2);

    // a 1s budget cannot cover the full mode sweep; the run aborts between
    // work items without emitting a partial report
    let tight = ysh_with_budget(
        &["verify", "serre", "--quiver", &q, "--max-mode", "3"],
        "1",
    );
    if code(&tight) == 2 {
        assert!(tight.stdout.is_empty(), "no partial report on a tripped budget");
        assert!(String::from_utf8_lossy(&tight.stderr).contains("time budget"));
    } else {
        // a fast machine may finish inside the budget; then the run is clean
        assert_eq!(code(&tight), 0);
    }
}

#[test]
fn rank_one_pairing_runs_without_a_quiver_file() {
    let out = ysh(&["pair", "rank-one", "--vertex", "0", "--f", "1", "--g", "l(0,1)^-1"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("-1"), "calibration value shown: {text}");
}

#[test]
fn reports_carry_schema_and_fingerprint() {
    let dir = tempfile::tempdir().unwrap();
    let q = fixture(&dir, "a2aff.json", A2AFF);
    let out = ysh(&["quiver", "validate", "--quiver", &q, "--output", "json"]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["schema"], "ysh-report/1");
    assert_eq!(doc["seed"], "0xcafe");
    let fp = doc["quiver"]["fingerprint"].as_str().unwrap();
    assert_eq!(fp.len(), 64);
    assert!(fp.chars().all(|c| c.is_ascii_hexdigit()));

    // an arrow-list spelling of the same quiver has the same fingerprint
    let arrows = fixture(
        &dir,
        "arrows.json",
        r#"{"vertices":[0,1,2],"arrows":[{"out":0,"inc":1},{"out":1,"inc":2},{"out":0,"inc":2}]}"#,
    );
    let out2 = ysh(&["quiver", "validate", "--quiver", &arrows, "--output", "json"]);
    assert_eq!(code(&out2), 0);
    let doc2: serde_json::Value = serde_json::from_slice(&out2.stdout).unwrap();
    assert_eq!(doc2["quiver"]["fingerprint"].as_str().unwrap(), fp);
}
