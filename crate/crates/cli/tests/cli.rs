use std::path::PathBuf;
use std::process::{Command, Output};

use hypconst::VerifierReport;
use hypconst_cli::{ConstantsReport, CurtainReport, ReparamOutcome};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypconst")).args(args).env_remove("HYPCONST_THREADS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b
}

#[test]
fn constants_closed_form_route() {
    let o = run(&["constants", "--q1", "1", "--q2", "7", "--D", "125", "--mode", "theorem-b"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: ConstantsReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(rel(r.delta_prime, 2.11e5) < 0.01);
    assert!(rel(r.delta.unwrap(), 1.19e7) < 0.015);
    assert!(stderr(&o).contains("δ′ = 2.11e5"));
}

#[test]
fn constants_fixed_point_route() {
    let o = run(&["constants", "--q1", "1", "--q2", "7", "--D", "125", "--mode", "fixed-point"]);
    assert_eq!(o.status.code(), Some(0));
    let r: ConstantsReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((2.39e3..=2.41e3).contains(&r.kappa));
    assert!(rel(r.delta.unwrap(), 5.56e5) < 0.01);
    assert!(r.certificate_ok);
    assert!(stderr(&o).contains("κ = 2.41e3"));
}

#[test]
fn constants_base_case_and_csv() {
    let o = run(&["constants", "--q1", "1", "--q2", "0", "--D", "1", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("mode,method,kappa,delta_prime,delta,certificate_ok"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let kappa: f64 = row[2].parse().unwrap();
    assert!((kappa - 7.44).abs() < 0.005, "{kappa}");
    assert!(!text.contains('\r'));
}

#[test]
fn constants_kappa_n_mode() {
    let o = run(&["constants", "--q1", "1", "--q2", "7", "--D", "125", "--mode", "n:8"]);
    let r: ConstantsReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(rel(r.kappa, 5.27e4) < 0.005);
}

#[test]
fn constants_input_errors() {
    for args in [
        &["constants", "--q1", "0.5", "--q2", "7", "--D", "125"][..],
        &["constants", "--q1", "-1", "--q2", "7", "--D", "125"],
        &["constants", "--q1", "2", "--q2", "7", "--D", "125", "--mode", "theorem-b"],
        &["constants", "--q1", "1", "--q2", "7", "--D", "125", "--mode", "n:zero"],
        &["constants", "--q1", "1", "--q2", "0.5", "--D", "0.5", "--mode", "n:8"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stdout(&o).is_empty());
    }
}

#[test]
fn kappa_table_csv() {
    let o = run(&["kappa-table", "--q", "1", "--D", "1", "--n-max", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "n,K_n,eps_n,kappa_n,running_min,argmin");
    assert_eq!(rows.len(), 4);
    for r in &rows[1..] {
        let k: f64 = r.split(',').nth(3).unwrap().parse().unwrap();
        assert!((17.0..=18.0).contains(&k));
    }

    let o = run(&["kappa-table", "--q", "7", "--D", "125", "--n-max", "2000"]);
    let text = stdout(&o);
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("2000,"));
    assert!(last.ends_with(",2000"));
    let row8: f64 = text.lines().nth(8).unwrap().split(',').nth(3).unwrap().parse().unwrap();
    assert!(rel(row8, 5.27e4) < 0.005);

    assert_eq!(run(&["kappa-table", "--q", "0.5", "--D", "1", "--n-max", "3"]).status.code(), Some(2));
}

#[test]
fn verify_tree_fixture() {
    let o = run(&["verify", "--space", &fixture("tree_space.json"), "--paths", &fixture("tree_paths.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: VerifierReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.delta_four_exact, 0.0);
    assert!(r.within_bound);
}

#[test]
fn verify_unit_square() {
    let o = run(&["verify", "--space", &fixture("square_space.json"), "--paths", &fixture("square_paths.json")]);
    assert_eq!(o.status.code(), Some(0));
    let r: VerifierReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((r.delta_four_exact - (2.0 * 2f64.sqrt() - 2.0)).abs() < 1e-12);
    assert_eq!(r.d_g1, 2.0);
}

#[test]
fn verify_reports_triangle_violation() {
    let o = run(&["verify", "--space", &fixture("bad_triangle.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("d(x, z) > d(x, y) + d(y, z)"), "{}", stderr(&o));
}

#[test]
fn triangle_violation_names_the_labels() {
    let f = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(f.path(), r#"{"labels": ["p", "q", "r"], "dist": [[0, 3, 1], [3, 0, 1], [1, 1, 0]]}"#).unwrap();
    let o = run(&["verify", "--space", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("d(p, q) > d(p, r) + d(r, q)"), "{}", stderr(&o));
}

#[test]
fn verify_rejects_missing_file_and_bad_json() {
    assert_eq!(run(&["verify", "--space", "/nonexistent/space.json"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.json");
    std::fs::write(&p, "{\"labels\": [\"a\"]").unwrap();
    assert_eq!(run(&["verify", "--space", p.to_str().unwrap()]).status.code(), Some(2));
}

fn curtain(extra: &[&str]) -> Output {
    let mut args = vec!["curtain"];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn curtain_real_line_matches_hand_values() {
    let o = curtain(&[
        "--backend",
        &fixture("line_backend.json"),
        "--pairs",
        &fixture("line_pairs.json"),
        "--grid-step",
        "0.05",
        "--samples",
        "8",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: CurtainReport = serde_json::from_str(&stdout(&o)).unwrap();
    // unit slabs packed strictly inside (x, y): ⌈len⌉ − 1 of them
    let expected = [2.0, 3.0, 0.0, 5.0];
    for (p, want_chain) in r.pairs.iter().zip(expected) {
        let lo = if want_chain == 0.0 { 0.0 } else { want_chain + 1.0 };
        assert!(p.per_l.iter().all(|b| b.lower == lo), "{:?}", p.per_l);
        assert!(p.per_l.iter().all(|b| b.lower <= 1.0 + p.distance));
        assert!(p.lower <= p.upper);
    }
    assert_eq!(r.pairs[0].per_l[0].upper, 3.5);
    assert!(r.within_ceiling);
}

#[test]
fn curtain_tree_with_exact_base_is_flat() {
    let o = curtain(&[
        "--backend",
        &fixture("tree_backend.json"),
        "--pairs",
        &fixture("tree_pairs.json"),
        "--exact-base",
        "--samples",
        "30",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: CurtainReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r.empirical.result.value <= 1e-12);
    assert_eq!(r.empirical.oracle, "exact");
    assert_eq!(r.pairs[0].distance, 3.0);
}

#[test]
fn curtain_plane_defaults_stay_below_ceiling() {
    let o = curtain(&["--backend", &fixture("plane_backend.json"), "--pairs", &fixture("plane_pairs.json")]);
    assert_eq!(o.status.code(), Some(0));
    let r: CurtainReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.empirical.result.n_samples, 200);
    assert!(r.empirical.result.value <= 5.56e5);
    assert!((r.ceilings.theorem_b_delta_prime - 2.11e5).abs() / 2.11e5 < 0.01);
    assert!(r.empirical.margin > 0.0);
    let err = stderr(&o);
    assert!(err.contains("2.11e5") && err.contains("5.54e5"), "{err}");
}

#[test]
fn curtain_density_failure_does_not_stop_the_run() {
    // a very coarse grid leaves gaps in the sampled model distances
    let o = curtain(&[
        "--backend",
        &fixture("line_backend.json"),
        "--pairs",
        &fixture("line_pairs.json"),
        "--grid-step",
        "3",
        "--exact-base",
        "--samples",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: CurtainReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.pairs.len(), 4);
    assert!(r.pairs.iter().any(|p| matches!(p.reparametrization, ReparamOutcome::DensityFailure { .. })));
    assert!(r.pairs.iter().any(|p| matches!(p.reparametrization, ReparamOutcome::Ok(_))));
}

#[test]
fn curtain_csv_has_one_row_per_pair() {
    let o = curtain(&[
        "--backend",
        &fixture("line_backend.json"),
        "--pairs",
        &fixture("line_pairs.json"),
        "--L-max",
        "3",
        "--samples",
        "4",
        "--format",
        "csv",
    ]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "pair,distance,lower,upper,d1_lower,d1_upper,d2_lower,d2_upper,d3_lower,d3_upper,reparam_status,reparam_defect"
    );
    assert_eq!(lines.len(), 5);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 12));
}

#[test]
fn curtain_input_errors() {
    let bad_pairs = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(bad_pairs.path(), r#"{"pairs": [[[0, 0], [1]]]}"#).unwrap();
    let o = curtain(&["--backend", &fixture("plane_backend.json"), "--pairs", bad_pairs.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = curtain(&[
        "--backend",
        &fixture("plane_backend.json"),
        "--pairs",
        &fixture("plane_pairs.json"),
        "--samples",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_caps() {
    let args = [
        "curtain",
        "--backend",
        &fixture("plane_backend.json"),
        "--pairs",
        &fixture("plane_pairs.json"),
        "--samples",
        "30",
        "--seed",
        "7",
        "--random-curtains",
        "4",
    ];
    let a = run(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_hypconst")).args(args).env("HYPCONST_THREADS", "1").output().unwrap();
    assert_eq!(a.stdout, b.stdout);
    let c = run(&args);
    assert_eq!(a.stdout, c.stdout);
    let zero = Command::new(env!("CARGO_BIN_EXE_hypconst")).args(args).env("HYPCONST_THREADS", "0").output().unwrap();
    assert_eq!(zero.status.code(), Some(2));
}

#[test]
fn output_flag_writes_file_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = run(&[
        "verify",
        "--space",
        &fixture("square_space.json"),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    let r: VerifierReport = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&r).unwrap() + "\n", text);
}

#[test]
fn help_documents_defaults() {
    let o = run(&["curtain", "--help"]);
    let text = stdout(&o);
    for needle in ["[default: 0]", "[default: 20]", "[default: 0.25]", "[default: 200]", "HYPCONST_THREADS"] {
        assert!(text.contains(needle), "{needle} missing from\n{text}");
    }
}
