use std::path::Path;
use std::process::{Command, Output};

use lfcs::cli::{self, Report};

fn lfcs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lfcs")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn corpus_path() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/symbols.jsonl").display().to_string()
}

#[test]
fn classify_involution_is_symmetric() {
    let o = lfcs(&["classify", "--json", "--symbol", r#"{"family":"involution","a":[0.5,0]}"#]);
    assert_eq!(o.status.code(), Some(0));
    let r = Report::from_json(&stdout(&o)).unwrap();
    assert!(r.verdict.unwrap().is_cs);
}

#[test]
fn classify_dilate_translate_uses_the_infinity_witness() {
    let o = lfcs(&["classify", "--json", "--symbol", r#"{"a":[0.5,0],"b":[0.25,0],"c":[0,0],"d":[1,0]}"#]);
    assert_eq!(o.status.code(), Some(0));
    let v = Report::from_json(&stdout(&o)).unwrap().verdict.unwrap();
    assert!(v.is_cs);
    assert_eq!(v.witnesses.iter().map(|w| w.label()).collect::<Vec<_>>(), vec!["fix_infinity_and_interior"]);
}

#[test]
fn classify_rejects_non_self_maps_and_bad_input() {
    assert_eq!(lfcs(&["classify", "--symbol", r#"{"a":2,"b":0,"c":0,"d":1}"#]).status.code(), Some(2));
    assert_eq!(lfcs(&["classify", "--symbol", "not json"]).status.code(), Some(1));
    assert_eq!(lfcs(&["classify"]).status.code(), Some(1));
    assert_eq!(lfcs(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn verify_suites_pass() {
    for args in [
        vec!["verify", "--suite", "order3", "--a", "0.5", "--truncation", "512"],
        vec!["verify", "--suite", "schroeder", "--b", "0.5", "--c", "0.25"],
        vec!["verify", "--suite", "identities", "--a", "0"],
    ] {
        let o = lfcs(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}\n{}", stdout(&o));
    }
}

#[test]
fn verify_reports_failures_with_exit_three() {
    // far too short a truncation for the kernel identities at |a| = 0.9
    let o = lfcs(&["verify", "--suite", "identities", "--a", "0.9", "--truncation", "16"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn verify_order3_at_zero_is_a_domain_error() {
    assert_eq!(lfcs(&["verify", "--suite", "order3", "--a", "0"]).status.code(), Some(2));
}

#[test]
fn residual_of_rotation_is_zero() {
    let o = lfcs(&["residual", "--json", "--symbol", r#"{"family":"rotation","p":1,"q":4}"#, "--truncation-schedule", "8,16"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = Report::from_json(&stdout(&o)).unwrap().residual_study.unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.best_residual == 0.0));
}

#[test]
fn sweeps_write_csv() {
    let dir = tempfile::tempdir().unwrap();
    let inv = dir.path().join("inv.csv");
    let o = lfcs(&["sweep", "--family", "involution", "--grid", "0.05:0.9:10", "--out", inv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let mut rdr = csv::Reader::from_path(&inv).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| &r[4] == "true"));

    let ell = dir.path().join("ell.csv");
    lfcs(&["sweep", "--family", "elliptic3", "--grid", "0.05:0.9:10", "--out", ell.to_str().unwrap()]);
    let rows: Vec<csv::StringRecord> = csv::Reader::from_path(&ell).unwrap().records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| &r[4] == "false"));

    let empty = dir.path().join("empty.csv");
    lfcs(&["sweep", "--family", "involution", "--grid", "", "--out", empty.to_str().unwrap()]);
    assert_eq!(std::fs::read_to_string(&empty).unwrap(), "family,param,symbol,class,is_cs,residual\n");
}

#[test]
fn sweep_reports_unwritable_path() {
    let o = lfcs(&["sweep", "--family", "involution", "--grid", "0.5", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/dir/x.csv"));
}

#[test]
fn bundled_corpus_has_no_mismatches() {
    let o = lfcs(&["corpus", "--json", "--in", &corpus_path()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let c = Report::from_json(&stdout(&o)).unwrap().corpus.unwrap();
    assert_eq!(c.total, 30);
}

#[test]
fn corpus_mismatch_and_malformed_lines() {
    let dir = tempfile::tempdir().unwrap();
    let wrong = dir.path().join("wrong.jsonl");
    std::fs::write(&wrong, "{\"family\":\"elliptic3\",\"a\":0.5,\"expected_cs\":true,\"label\":\"bad\"}\n").unwrap();
    let o = lfcs(&["corpus", "--in", wrong.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("bad: expected is_cs=true"));

    let broken = dir.path().join("broken.jsonl");
    std::fs::write(&broken, "{\"family\":\"rotation\",\"q\":4}\n{oops\n").unwrap();
    assert_eq!(lfcs(&["corpus", "--in", broken.to_str().unwrap()]).status.code(), Some(1));

    let empty = dir.path().join("empty.jsonl");
    std::fs::write(&empty, "").unwrap();
    let o = lfcs(&["corpus", "--json", "--in", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(Report::from_json(&stdout(&o)).unwrap().corpus.unwrap().total, 0);
}

#[test]
fn reports_round_trip_and_are_key_sorted() {
    let o = lfcs(&["verify", "--json", "--suite", "schroeder"]);
    let text = stdout(&o);
    let report = Report::from_json(&text).unwrap();
    assert_eq!(report.to_stable_json(), text);
    let keys: Vec<&str> = text.lines().filter(|l| l.starts_with("  \"")).map(|l| l.trim().split('"').nth(1).unwrap()).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn in_process_runner_matches_binary() {
    let args = ["lfcs", "classify", "--json", "--symbol", r#"{"family":"elliptic3","a":[0.5,0]}"#];
    let mut out = Vec::new();
    let mut err = Vec::new();
    assert_eq!(cli::run(args, &mut out, &mut err), 0);
    assert_eq!(String::from_utf8(out).unwrap(), stdout(&lfcs(&args[1..])));
}
