use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_pivotal-lab");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("PIVOTAL_LAB_THREADS").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

/// Data rows (header first) of every table on stdout, comments dropped.
fn rows(text: &str) -> Vec<Vec<String>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).has_headers(false).flexible(true).from_reader(text.as_bytes());
    rdr.records().map(|r| r.unwrap().iter().map(str::to_string).collect()).collect()
}

fn column(table: &[Vec<String>], header_row: usize, name: &str) -> usize {
    table[header_row].iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn arity_beyond_cap_is_a_usage_error() {
    let o = run(&["exact", "--family", "majority", "--n", "25"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap"));
}

#[test]
fn flip_semantics_with_biased_p_is_rejected() {
    let o = run(&["dynamics", "--family", "dictator", "--n", "1", "--p", "0.3", "--semantics", "flip", "--trials", "10"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_flag_and_unknown_config_key_exit_2() {
    assert_eq!(run(&["exact", "--colour", "red"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.conf");
    fs::write(&path, "family = majority\nn = 3\ncolour = red\n").unwrap();
    let o = run(&["exact", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));
}

#[test]
fn majority_three_spectrum() {
    let o = run(&["exact", "--family", "majority", "--n", "3", "--report", "spectrum"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("# pivotal-lab 0.1.0 seed=20170601 config="));
    let t = rows(&text);
    assert_eq!(t[0], ["mask", "set", "degree", "coefficient"]);
    let coef: Vec<(u32, f64)> = t[1..].iter().map(|r| (r[2].parse().unwrap(), r[3].parse().unwrap())).collect();
    assert_eq!(coef.len(), 4);
    let weight: f64 = coef.iter().map(|c| c.1 * c.1).sum();
    assert!((weight - 1.0).abs() < 1e-12);
    assert_eq!(coef.iter().filter(|c| c.0 == 1).count(), 3);
}

#[test]
fn tribes_two_by_two_value_law() {
    let o = run(&["exact", "--family", "tribes", "--l", "2", "--k", "2", "--report", "pivotal-law"]);
    assert!(o.status.success());
    let text = stdout(&o);
    // Two tables: the joint law, then the value law.
    let second = text.match_indices("# pivotal-lab").nth(1).expect("value-law table").0;
    let t = rows(&text[second..]);
    let (v, p) = (column(&t, 0, "value"), column(&t, 0, "probability"));
    let zero = t.iter().find(|r| r[v] == "0").expect("T = 0 row");
    // (3/4)^2: both tribes fail.
    assert_eq!(zero[p].parse::<f64>().unwrap(), 0.5625);
}

#[test]
fn zero_noise_never_disagrees() {
    let o = run(&["mc", "--family", "majority", "--n", "5", "--epsilon", "0", "--samples", "2000"]);
    assert!(o.status.success());
    let t = rows(&stdout(&o));
    let est = column(&t, 0, "estimate");
    assert_eq!(t[1][est], "0");
}

#[test]
fn mc_output_is_independent_of_thread_count() {
    let args = ["mc", "--family", "bribed", "--l", "3", "--k", "6", "--quantity", "sandwich", "--samples", "20000"];
    let a = run(&[&args[..], &["--threads", "1"]].concat());
    let b = run(&[&args[..], &["--threads", "8"]].concat());
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.contains(&b'\r'));
}

#[test]
fn seed_changes_estimates_and_threads_do_not() {
    let base = ["mc", "--family", "majority", "--n", "7", "--epsilon", "0.2", "--samples", "5000"];
    let a = stdout(&run(&[&base[..], &["--seed", "1"]].concat()));
    let b = stdout(&run(&[&base[..], &["--seed", "2"]].concat()));
    assert_ne!(a.lines().nth(2), b.lines().nth(2));
    let c = stdout(&run(&[&base[..], &["--seed", "1", "--threads", "3"]].concat()));
    assert_eq!(a, c);
}

#[test]
fn flat_and_json_config_files_agree() {
    let dir = tempfile::tempdir().unwrap();
    let flat = dir.path().join("run.conf");
    fs::write(&flat, "# tribes census\nfamily = tribes\nl = 2\nk = 3\nreport = influences\n").unwrap();
    let json = dir.path().join("run.json");
    fs::write(&json, r#"{"family": "tribes", "l": 2, "k": 3, "report": "influences"}"#).unwrap();
    let a = run(&["exact", "--config", flat.to_str().unwrap()]);
    let b = run(&["exact", "--config", json.to_str().unwrap()]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let t = rows(&stdout(&a));
    assert_eq!(t.len(), 7);
    // Flags override the file.
    let c = run(&["exact", "--config", flat.to_str().unwrap(), "--k", "2"]);
    assert_eq!(rows(&stdout(&c)).len(), 5);
}

#[test]
fn dictator_survival_matches_exponential() {
    let o = run(&["dynamics", "--family", "dictator", "--n", "1", "--trials", "40000"]);
    assert!(o.status.success());
    let t = rows(&stdout(&o));
    let (p, se) = (column(&t, 0, "p_c0"), column(&t, 0, "stderr"));
    let (p, se): (f64, f64) = (t[1][p].parse().unwrap(), t[1][se].parse().unwrap());
    assert!((p - (-1.0f64).exp()).abs() <= 4.0 * se, "{p} ± {se}");
}

#[test]
fn constant_function_never_changes() {
    let o = run(&["dynamics", "--family", "constant", "--n", "3", "--trials", "500"]);
    assert!(o.status.success());
    let t = rows(&stdout(&o));
    assert_eq!(t[1][column(&t, 0, "p_c0")], "1");
    assert_eq!(t[1][column(&t, 0, "mean_C")], "0");
}

#[test]
fn schedule_table_lists_the_default_sweep() {
    let o = run(&["schedule"]);
    assert!(o.status.success());
    let t = rows(&stdout(&o));
    let l = column(&t, 0, "l");
    let ls: Vec<&str> = t[1..].iter().map(|r| r[l].as_str()).collect();
    assert_eq!(ls, ["12", "13", "14", "15", "16", "17", "18", "20", "21"]);
}

#[test]
fn out_directory_receives_named_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("res");
    let o = run(&["exact", "--family", "parity", "--n", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    for name in ["spectrum", "influences", "pivotal-law", "value-law", "disagreement", "marginals"] {
        assert!(Path::new(&out.join(format!("{name}.csv"))).exists(), "{name}");
    }
    let j = run(&["exact", "--family", "parity", "--n", "3", "--report", "influences", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    assert_eq!(v["table"], "influences");
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn marginals_suite_passes_and_writes_its_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m");
    let o = run(&["reproduce", "marginals", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("verdict.json")).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 7);
    assert!(stdout(&o).contains("7 of 7 checks passed"));
}

/// Swapping the sweep family for a constant function must fail the
/// volatility checks rather than pass vacuously.
#[test]
fn volatility_negative_control_fails() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("control.conf");
    fs::write(&conf, "family = constant\ntrials = 300\nsamples = 300\n").unwrap();
    let out = dir.path().join("v");
    let o = run(&["reproduce", "volatility", "--config", conf.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("sweep-strictly-decreasing"), "{err}");
    let summary = fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("FAIL [9] sweep-endpoint-separation"));
}
