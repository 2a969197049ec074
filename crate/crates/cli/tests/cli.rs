//! End-to-end tests against the compiled binary: exit codes, report
//! schemas, JSON round-trips, and byte determinism.

use std::process::{Command, Output};

use sigma_race::arith::factorize;
use sigma_race_cli::report;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sigma-race"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sigma-race"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn race_verified_exit_zero_and_fields() {
    let out = run(&["race", "--kmax", "2", "--residue", "1"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let certs = report::parse_certificates_json(&stdout(&out)).unwrap();
    assert_eq!(certs.len(), 1);
    assert!(certs[0].verified);
    assert_eq!(certs[0].min_margin, 40); // sigma(30) - sigma(31)
    assert_eq!(certs[0].argmin_k, 1);
    assert_eq!(certs[0].k_max, 2);
}

#[test]
fn race_all_residues_base_case() {
    let out = run(&["race", "--kmax", "999", "--residues", "all"]);
    assert_eq!(out.status.code(), Some(0));
    let certs = report::parse_certificates_json(&stdout(&out)).unwrap();
    assert_eq!(certs.len(), 8);
    assert!(certs.iter().all(|c| c.verified && c.min_margin > 0));
}

#[test]
fn usage_errors_exit_one() {
    let out = run(&["race", "--kmax", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("kmax"), "stderr: {}", stderr(&out));

    let out = run(&["race", "--kmax", "5", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(1));

    let out = run(&["race", "--kmax", "5", "--residue", "31"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("below the modulus"));

    let out = run(&["envelope", "--grid-min", "10"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn violation_exits_two() {
    // The reversed sigma claim fails at n = 1 already.
    let out = run(&["scan", "--function", "sigma", "--expect", "offset", "--limit", "20"]);
    assert_eq!(out.status.code(), Some(2));
    let scan = report::parse_scan_json(&stdout(&out)).unwrap();
    assert_eq!(scan.first_violation, Some(1));
    assert_eq!(scan.violations.len(), 20);

    let csv = run(&[
        "scan", "--function", "sigma", "--expect", "offset", "--limit", "3", "--format", "csv",
    ]);
    assert_eq!(stdout(&csv), "n\n1\n2\n3\n");
}

#[test]
fn scan_default_claim_small_range() {
    let out = run(&["scan", "--function", "phi", "--limit", "500"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let scan = report::parse_scan_json(&stdout(&out)).unwrap();
    assert!(scan.violations.is_empty());
    assert_eq!(scan.limit, 500);
}

#[test]
fn envelope_csv_schema_and_values() {
    let out = run(&[
        "envelope", "--residue", "0", "--grid-points", "2", "--grid-max", "2000", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "x,normalized_sum,beta_term,residual,envelope_lo,envelope_hi,pass"
    );
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "1000");
    assert_eq!(first[6], "true");

    // Independent oracle: S(1000) by per-value factorization, no sieve.
    let direct: f64 = (1..=1000u64)
        .map(|m| {
            let n = 30 * m;
            factorize(n, None).unwrap().sigma().unwrap() as f64 / n as f64
        })
        .sum();
    let reported: f64 = first[1].parse().unwrap();
    assert!(
        (reported - direct).abs() < 1e-8,
        "S(1000) reported {reported}, direct {direct}"
    );
    assert_eq!(text.lines().count(), 3); // header + 2 grid rows
}

#[test]
fn envelope_csv_multi_residue_gains_k_column() {
    let out = run(&[
        "envelope", "--residues", "0,1", "--grid-points", "1", "--grid-max", "1000", "--format",
        "csv",
    ]);
    let text = stdout(&out);
    assert!(text.starts_with("k,x,normalized_sum"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn json_reports_round_trip() {
    let env = run(&["envelope", "--residues", "0,7", "--grid-points", "3", "--grid-max", "3000"]);
    let body = stdout(&env);
    let parsed = report::parse_envelopes_json(&body).unwrap();
    assert_eq!(report::envelopes_json(&parsed), body);
    assert_eq!(parsed.len(), 2);
    assert!(parsed.iter().all(|r| r.all_pass));

    let bounds = run(&["bounds", "--grid-points", "2", "--grid-max", "1500"]);
    let body = stdout(&bounds);
    let parsed = report::parse_bounds_json(&body).unwrap();
    assert_eq!(report::bounds_json(&parsed), body);
    assert!(parsed.all_pass);
    assert_eq!(parsed.samples.len(), 2);
    assert_eq!(parsed.samples[0].offsets.len(), 8);

    let beta = run(&["beta", "--truncate", "1000"]);
    let body = stdout(&beta);
    let parsed = report::parse_beta_json(&body).unwrap();
    assert_eq!(report::beta_json(&parsed), body);
    assert_eq!(parsed.len(), 9);

    let race = run(&["race", "--kmax", "50", "--residues", "1,29"]);
    let body = stdout(&race);
    let parsed = report::parse_certificates_json(&body).unwrap();
    assert_eq!(report::certificates_json(&parsed), body);

    let scan = run(&["scan", "--function", "sigma", "--limit", "40"]);
    let body = stdout(&scan);
    let parsed = report::parse_scan_json(&body).unwrap();
    assert_eq!(report::scan_json(&parsed), body);
}

#[test]
fn beta_constants_golden() {
    let out = run(&["beta", "--residue", "0", "--truncate", "1000000"]);
    let body = stdout(&out);
    assert!(body.contains("\"coefficient_num\":319,\"coefficient_den\":1080"));
    let parsed = &report::parse_beta_json(&body).unwrap()[0];
    let expect = 319.0 / 1080.0 * std::f64::consts::PI * std::f64::consts::PI;
    assert!((parsed.constant.numeric() - expect).abs() < 1e-9);
    assert!((parsed.constant.numeric() - parsed.series.partial).abs() <= parsed.series.tail_bound);

    let out = run(&["beta", "--residue", "7", "--truncate", "10"]);
    assert!(stdout(&out).contains("\"coefficient_num\":8,\"coefficient_den\":75"));
}

#[test]
fn reports_are_deterministic_across_runs_and_threads() {
    let args = ["envelope", "--residues", "all", "--grid-points", "4", "--grid-max", "5000"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(stdout(&a), stdout(&b));
    let c = run_env(&args, &[("SIGMA_RACE_THREADS", "3")]);
    assert_eq!(stdout(&a), stdout(&c));

    // Races are identical up to the elapsed_ms timing field.
    let race_args = ["race", "--kmax", "2000", "--residues", "all"];
    let mut r1 = report::parse_certificates_json(&stdout(&run(&race_args))).unwrap();
    let mut r2 = report::parse_certificates_json(&stdout(&run_env(
        &race_args,
        &[("SIGMA_RACE_THREADS", "2")],
    )))
    .unwrap();
    for c in r1.iter_mut().chain(r2.iter_mut()) {
        c.elapsed_ms = 0;
    }
    assert_eq!(r1, r2);
}

#[test]
fn invalid_thread_env_is_a_config_error() {
    let out = run_env(&["race", "--kmax", "5", "--residue", "1"], &[("SIGMA_RACE_THREADS", "soon")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("SIGMA_RACE_THREADS"));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&[
        "race", "--kmax", "10", "--residue", "1", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).is_empty());
    let body = std::fs::read_to_string(&path).unwrap();
    assert!(report::parse_certificates_json(&body).unwrap()[0].verified);

    let bad = run(&["race", "--kmax", "10", "--residue", "1", "--out", "/no/such/dir/x.json"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stderr(&bad).contains("cannot write"));
}

#[test]
fn selftest_subset_prints_table() {
    let out = run(&["selftest", "--only", "1,4"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("exact-constants"));
    assert!(text.contains("race-base-case"));
    assert!(text.contains("2/2 criteria passed"));

    // Structured output lands in the file, table on stdout.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("selftest.csv");
    let out = run(&[
        "selftest", "--only", "1", "--format", "csv", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let body = std::fs::read_to_string(&path).unwrap();
    assert!(body.starts_with("id,name,passed,elapsed_ms,target_ms,detail"));
    assert!(body.contains("1,exact-constants,true"));
}

#[test]
fn bounds_csv_schema() {
    let out = run(&["bounds", "--grid-points", "1", "--grid-max", "1000", "--format", "csv"]);
    let text = stdout(&out);
    assert_eq!(
        text.lines().next().unwrap(),
        "x,k,sum_multiple,lower_bound,lower_pass,sum_offset,upper_bound,upper_pass,crossover_gap,crossover_pass"
    );
    assert_eq!(text.lines().count(), 9); // header + 8 offsets at one x
    for line in text.lines().skip(1) {
        assert!(!line.ends_with(",true,")); // no dangling commas
        assert!(line.split(',').count() == 10);
    }
}

#[test]
fn general_modulus_race_runs() {
    // The machinery generalizes beyond q = 30.
    let out = run(&["race", "--kmax", "100", "--modulus", "12", "--residues", "all"]);
    let certs = report::parse_certificates_json(&stdout(&out)).unwrap();
    assert_eq!(certs.len(), 4); // 1, 5, 7, 11
    assert!(certs.iter().all(|c| c.modulus.q() == 12));
}
