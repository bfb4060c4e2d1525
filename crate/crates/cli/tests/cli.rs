use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dgpfit"))
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/reported_claims.csv")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn schema_check(doc: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/report.schema.json");
    let schema: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| format!("{e} at {}", e.instance_path())).collect();
    assert!(errors.is_empty(), "{errors:#?}");
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stderr));
    })
}

#[test]
fn describe_prints_one_row_per_group() {
    let out = run(&["describe", fixture().to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 6, "{text}");
    for year in 2012..=2016 {
        assert!(text.contains(&year.to_string()));
    }
}

#[test]
fn describe_json_is_schema_valid() {
    let out = run(&["describe", fixture().to_str().unwrap(), "--json"]);
    assert!(out.status.success());
    let doc = json(&out);
    schema_check(&doc);
    assert_eq!(doc["groups"].as_array().unwrap().len(), 5);
}

#[test]
fn missing_file_exits_two() {
    let out = run(&["describe", "/definitely/not/here.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read"));
    assert!(out.stdout.is_empty());
}

#[test]
fn malformed_input_exits_two_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    fs::write(&path, "count,a\n5,1\n3,2\n").unwrap();
    let out = run(&["fit", path.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn bad_flags_exit_two() {
    assert_eq!(run(&["fit", "--model", "poisson", "x.csv"]).status.code(), Some(2));
    let out = run(&["fit", fixture().to_str().unwrap(), "--bootstrap", "1", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["fit", fixture().to_str().unwrap(), "--tolerance", "0", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fit_json_is_schema_valid_and_repeatable() {
    let input = fixture();
    let before = fs::read(&input).unwrap();
    let args = [
        "fit",
        input.to_str().unwrap(),
        "--aggregate",
        "--bootstrap",
        "20",
        "--seed",
        "5",
        "--anneal-iters",
        "2000",
        "--json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let doc = json(&a);
    schema_check(&doc);
    assert_eq!(doc["aggregate"]["n"], 145);
    assert_eq!(doc["config_echo"]["seed"], 5);
    assert_eq!(fs::read(&input).unwrap(), before, "input must not change");
}

#[test]
fn out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&[
        "compare",
        fixture().to_str().unwrap(),
        "--seed",
        "3",
        "--anneal-iters",
        "1000",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("winner AIC"), "{text}");
    let doc: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    schema_check(&doc);
    assert_eq!(doc["command"], "compare");
    for g in doc["groups"].as_array().unwrap() {
        assert!(g.get("fits").is_none());
        assert_eq!(g["comparison"]["scores"].as_array().unwrap().len(), 2);
    }
    let denied = run(&["compare", fixture().to_str().unwrap(), "--seed", "3", "--out", "/proc/forbidden/x.json"]);
    assert_eq!(denied.status.code(), Some(2));
}

#[test]
fn failing_group_is_isolated() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mixed.csv");
    // group `flat` is underdispersed, `wide` is fine
    fs::write(&path, "count,flat,wide\n0,0,10\n1,3,4\n2,4,2\n3,3,1\n40,0,2\n300,0,1\n").unwrap();
    let out = run(&["fit", path.to_str().unwrap(), "--model", "nb", "--seed", "2", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let doc = json(&out);
    schema_check(&doc);
    let groups = doc["groups"].as_array().unwrap();
    assert!(groups[0]["failures"][0]["error"].as_str().unwrap().contains("underdispersed"));
    assert!(groups[0]["fits"].as_array().unwrap().is_empty());
    assert!(groups[1]["failures"].as_array().unwrap().is_empty());
    assert_eq!(groups[1]["fits"][0]["model"], "nb");
}

#[test]
fn default_seed_warns() {
    let out = run(&["compare", fixture().to_str().unwrap(), "--anneal-iters", "200"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("no --seed"));
    let quiet = run(&["compare", fixture().to_str().unwrap(), "--anneal-iters", "200", "--seed", "0"]);
    assert!(quiet.stderr.is_empty());
    assert_eq!(out.stdout, quiet.stdout);
}

fn simulate(dir: &Path, extra: &[&str]) -> (PathBuf, String) {
    let path = dir.join(format!("sim{}.csv", extra.join("_").replace(['-', '.'], "")));
    let mut args = vec!["simulate", "--out", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = run(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&path).unwrap();
    (path, text)
}

#[test]
fn simulate_writes_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--model", "dgp", "--alpha", "1.5", "--lambda", "0.8", "--mu", "0", "--n", "10000", "--seed", "7"];
    let (_, text) = simulate(dir.path(), &args);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "# model=dgp alpha=1.5 lambda=0.8 mu=0 n=10000 seed=7");
    assert_eq!(lines.next().unwrap(), "count");
    let values: Vec<u64> = lines.map(|l| l.parse().unwrap()).collect();
    assert_eq!(values.len(), 10_000);
    let again = run(&["simulate", "--model", "dgp", "--alpha", "1.5", "--lambda", "0.8", "--n", "10000", "--seed", "7"]);
    assert_eq!(String::from_utf8(again.stdout).unwrap(), text);
    let missing = run(&["simulate", "--model", "nb", "--r", "1", "--n", "5", "--seed", "1"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn simulate_then_fit_recovers() {
    let dir = tempfile::tempdir().unwrap();
    let (path, _) = simulate(
        dir.path(),
        &["--model", "dgp", "--alpha", "1.5", "--lambda", "0.8", "--mu", "0", "--n", "10000", "--seed", "7"],
    );
    let out = run(&["fit", path.to_str().unwrap(), "--model", "dgp", "--seed", "7", "--json"]);
    assert!(out.status.success());
    let doc = json(&out);
    let params = &doc["groups"][0]["fits"][0]["parameters"];
    let alpha = params[1]["estimate"].as_f64().unwrap();
    let lambda = params[2]["estimate"].as_f64().unwrap();
    assert!((alpha / 1.5 - 1.0).abs() < 0.1, "{alpha}");
    assert!((lambda / 0.8 - 1.0).abs() < 0.1, "{lambda}");

    let (nb_path, nb_text) = simulate(dir.path(), &["--model", "nb", "--r", "2", "--m", "5", "--n", "10000", "--seed", "9"]);
    assert!(nb_text.starts_with("# model=nb r=2 m=5 n=10000 seed=9\ncount\n"));
    let out = run(&["fit", nb_path.to_str().unwrap(), "--model", "nb", "--seed", "9", "--json"]);
    let doc = json(&out);
    let r = doc["groups"][0]["fits"][0]["parameters"][0]["estimate"].as_f64().unwrap();
    assert!((r / 2.0 - 1.0).abs() < 0.1, "{r}");
}

#[test]
fn free_mu_mode_reports_three_parameters() {
    let out = run(&[
        "fit",
        fixture().to_str().unwrap(),
        "--model",
        "dgp",
        "--mu-mode",
        "free",
        "--seed",
        "1",
        "--anneal-iters",
        "1000",
        "--json",
    ]);
    let doc = json(&out);
    schema_check(&doc);
    let fit = &doc["groups"][0]["fits"][0];
    assert_eq!(fit["parameter_count"], 3);
    assert!(fit["diagnostics"].as_array().unwrap().iter().any(|d| d.as_str().unwrap().contains("non-canonical")));
}
