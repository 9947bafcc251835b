use std::io::Write;

use ramsey_lab::cli::run;
use serde_json::Value;

fn ramsey(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["ramsey"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> (i32, Value) {
    let (code, out, _) = ramsey(args);
    let v: Value = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{out}: {e}"));
    assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", out, "JSON must round-trip");
    (code, v)
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(ramsey(&["--help"]).0, 0);
    assert_eq!(ramsey(&["--version"]).0, 0);
    assert_eq!(ramsey(&["search", "--help"]).0, 0);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(ramsey(&["frobnicate"]).0, 1);
    assert_eq!(ramsey(&["search", "--kind", "ap"]).0, 1);
    assert_eq!(ramsey(&["search", "--kind", "ap", "--k", "1"]).0, 1);
    assert_eq!(ramsey(&["bound", "--name", "sp-upper", "--m", "2"]).0, 1);
    assert_eq!(ramsey(&["--json", "--csv", "bound", "--name", "q1-new-base"]).0, 1);
}

#[test]
fn search_json_fields() {
    let (code, v) = json(&["--json", "--threads", "2", "search", "--kind", "semi", "--param", "3", "--k", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "exact");
    assert_eq!(v["value"], 11);
    assert_eq!(v["witness"].as_str().unwrap().len(), 10);
    assert_eq!(v["certificate_verified"], true);
    assert_eq!(v["config"]["threads"], 2);
}

#[test]
fn capped_search_reports_lower_bound_and_exits_two() {
    let (code, v) = json(&["--json", "search", "--kind", "ap", "--k", "4", "--max-n", "20"]);
    assert_eq!(code, 2);
    assert_eq!(v["status"], "incomplete");
    assert_eq!(v["lower_bound"], 21);
    let (code, v) = json(&["--json", "search", "--kind", "semi", "--k", "6", "--node-budget", "1000"]);
    assert_eq!(code, 2);
    assert!(v["lower_bound"].as_u64().unwrap() >= 1);
}

#[test]
fn bound_values() {
    let (code, v) = json(&["--json", "bound", "--name", "sp-upper", "--m", "3", "--k", "5"]);
    assert_eq!(code, 0);
    assert_eq!(v["value"], 25);
    assert_eq!(v["direction"], "upper");
    let (_, v) = json(&["--json", "bound", "--name", "vdw-lower-primes", "--p", "5", "--q", "2"]);
    assert_eq!(v["value"], 156);
    let (_, v) = json(&["--json", "bound", "--name", "gowers-upper", "--k", "3", "--r", "2"]);
    assert!(v["value"].is_string());
    let (code, v) = json(&["--json", "bound", "--name", "sp-upper", "--m", "2", "--k", "5"]);
    assert_eq!(code, 1);
    assert_eq!(v["applicable"], false);
}

#[test]
fn verify_rejects_monochromatic_coloring() {
    assert_eq!(ramsey(&["verify", "--kind", "ap", "--k", "3", "--coloring", "00110011"]).0, 0);
    let (code, v) = json(&["--json", "verify", "--kind", "ap", "--k", "3", "--coloring", "001100110"]);
    assert_eq!(code, 3);
    assert_eq!(v["valid"], false);
    assert_eq!(ramsey(&["verify", "--kind", "semi", "--param", "2", "--terms", "1,3,7"]).0, 0);
    assert_eq!(ramsey(&["verify", "--kind", "ap", "--terms", "1,3,7"]).0, 3);
}

#[test]
fn mc_csv_has_one_row_and_config_on_stderr() {
    let (code, out, err) = ramsey(&["--csv", "mc", "chebyshev-threepoint", "--samples", "2000", "--seed", "4"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].ends_with("samples,estimate,std_error,bound,passed"));
    assert!(err.starts_with("config: "));
}

#[test]
fn failed_experiment_exits_three() {
    let (code, v) = json(&[
        "--json",
        "mc",
        "janson-threepath",
        "--n",
        "20",
        "--samples",
        "50",
        "--floor",
        "1.01",
    ]);
    assert_eq!(code, 3);
    assert_eq!(v["passed"], false);
}

#[test]
fn table_csv_header_only_for_empty_range() {
    let (code, out, _) = ramsey(&["table", "--k-range", "5..4"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 1);
    assert!(out.starts_with("family,param,k,"));
}

#[test]
fn config_file_fills_defaults_and_flags_win() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "# defaults\nk = 4\nmax-n = 12\nseed = 3\nthreads = 2").unwrap();
    let path = f.path().to_str().unwrap();

    let (code, v) = json(&["--json", "--config", path, "search", "--kind", "ap"]);
    assert_eq!(code, 2);
    assert_eq!(v["lower_bound"], 13);
    assert_eq!(v["config"]["threads"], 2);
    assert_eq!(v["config"]["ignored_config_keys"], serde_json::json!(["seed"]));

    let (code, v) = json(&["--json", "--config", path, "search", "--kind", "ap", "--k", "3", "--threads", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["value"], 9);
    assert_eq!(v["config"]["threads"], 1);
}

#[test]
fn malformed_config_is_a_usage_error() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "k 4").unwrap();
    let (code, _, err) = ramsey(&["--config", f.path().to_str().unwrap(), "search", "--kind", "ap"]);
    assert_eq!(code, 1);
    assert!(err.contains("line 1"), "{err}");
}

#[test]
fn count_subcommands() {
    let (code, v) = json(&[
        "--json", "count", "report", "--n", "5", "--kind", "quasi", "--param", "1", "--k", "3",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["chain_holds"], true);
    assert!(v["t"]
        .as_array()
        .unwrap()
        .iter()
        .any(|t| t["a"] == 1 && t["d"] == 1 && t["count"] == 18));
    let (_, v) = json(&["--json", "count", "lambda", "--k", "2"]);
    assert_eq!(v["v0"], "3/2");
    assert_eq!(v["v1"], "2");
    let (code, v) = json(&["--json", "count", "sums", "--k", "3", "--r", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["attains_bound"], true);
    let (_, v) = json(&["--json", "count", "rset", "--n", "9", "--kind", "quasi", "--param", "1", "--k", "3"]);
    assert_eq!(v["elements"], serde_json::json!([1, 2, 3, 4, 5]));
    assert_eq!(ramsey(&["count", "omega", "--n", "8", "--k", "3"]).0, 0);
    assert_eq!(ramsey(&["count", "levels", "--n", "8", "--k", "3"]).0, 0);
}
