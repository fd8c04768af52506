use std::process::{Command, Output};

use serde_json::Value;

fn tribell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tribell"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = tribell(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn reproduce_passes_every_row() {
    let out = tribell(&["reproduce"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().find(|l| l.starts_with("S_V @ (90°, 0°)")).unwrap();
    assert!(row.contains("3.000000") && row.ends_with("pass"), "{row}");
    let row = text.lines().find(|l| l.starts_with("Mermin hybrid max")).unwrap();
    assert!(row.ends_with("pass"));

    let v = json(&["reproduce", "--format", "json"]);
    assert_eq!(v["all_pass"], true);
    let rows = v["rows"].as_array().unwrap();
    let optimal = rows.iter().find(|r| r["id"] == "svetlichny_w_optimal").unwrap();
    assert!((optimal["value"].as_f64().unwrap() - 4.354).abs() <= 1e-3);
}

#[test]
fn reproduce_fails_on_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.toml");
    std::fs::write(
        &path,
        r#"
[[row]]
id = "wrong"
label = "S_V @ (90°, 0°)"
quantity = "quantum"
state = "w"
functional = "svetlichny"
phi_deg = 90.0
phi_prime_deg = 0.0
expected = 4.0
tolerance = 1e-9
"#,
    )
    .unwrap();
    let out = tribell(&["reproduce", "--manifest", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn optimize_w_svetlichny() {
    let v = json(&["optimize", "--state", "w", "--functional", "svetlichny", "--format", "json"]);
    assert!((v["best_value"].as_f64().unwrap() - 4.354).abs() <= 1e-3);
    assert_eq!(v["settings"].as_array().unwrap().len(), 3);
    assert!(v["settings"][0]["phi_deg"].is_f64() && v["settings"][0]["phi_rad"].is_f64());
    assert_eq!(v["classification"], "rules_out_hybrid");
}

#[test]
fn optimize_writes_trace_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let out = tribell(&["optimize", "--state", "ghz-rl", "--trace-csv", path.to_str().unwrap()]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(path).unwrap();
    assert_eq!(csv.lines().next(), Some("iteration,value"));
}

#[test]
fn lhv_scan_mermin_local() {
    let v = json(&["lhv-scan", "--functional", "mermin", "--model", "local", "--format", "json"]);
    let results = v["results"].as_array().unwrap();
    assert_eq!(results.len(), 1);
    assert_eq!(results[0]["max_value"], 2.0);
    assert_eq!(results[0]["strategies_checked"], 64);
    let csv = String::from_utf8(tribell(&["lhv-scan", "--format", "csv"]).stdout).unwrap();
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["sample", "--state", "w", "--pairs", "90,0", "--shots", "0"][..],
        &["sample", "--state", "w", "--pairs", "90", "--shots", "10"],
        &["correlations", "--pairs", "90,0", "--pairs", "90,0"],
        &["correlations", "--pairs", "90,0", "--visibility", "1.5"],
        &["lhv-scan", "--model", "quantum"],
        &["frobnicate"],
    ] {
        assert_eq!(tribell(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn runtime_errors_exit_one_with_json() {
    let out = tribell(&["correlations", "--state", "/nonexistent/state.json", "--pairs", "90,0"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"].as_str().unwrap().contains("state"));
}

#[test]
fn correlations_at_criticized_settings() {
    let v = json(&["correlations", "--state", "w", "--pairs", "90,0", "--format", "json"]);
    assert!((v["svetlichny"]["value"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    assert_eq!(v["svetlichny"]["classification"], "consistent_with_local");
    assert_eq!(v["mermin"]["classification"], "rules_out_local_only");
    let csv = String::from_utf8(tribell(&["correlations", "--pairs", "90,0", "--format", "csv"]).stdout).unwrap();
    assert_eq!(csv.lines().next(), Some("i,j,k,E"));
    // radians flag
    let r = json(&[
        "correlations", "--radians", "--pairs", "1.5707963267948966,0", "--format", "json",
    ]);
    assert!((r["svetlichny"]["value"].as_f64().unwrap() - 3.0).abs() < 1e-12);
}

#[test]
fn sample_is_seeded() {
    let args = ["sample", "--state", "w", "--pairs", "35.264,144.736", "--shots", "20000", "--seed", "3", "--format", "json"];
    let a = tribell(&args);
    let b = tribell(&args);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["counts"]["rows"].as_array().unwrap().len(), 64);
    let value = v["report"]["value"].as_f64().unwrap();
    let se = v["report"]["std_error"].as_f64().unwrap();
    assert!((value.abs() - 4.3546).abs() < 5.0 * se);
    let csv = String::from_utf8(tribell(&["sample", "--pairs", "90,0", "--shots", "5", "--format", "csv"]).stdout).unwrap();
    assert_eq!(csv.lines().next(), Some("i,j,k,outcome,count"));
}

#[test]
fn state_files_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.json");
    let s = 1.0 / 3f64.sqrt();
    let amps = format!("[[0,0],[{s},0],[{s},0],[0,0],[{s},0],[0,0],[0,0],[0,0]]");
    std::fs::write(&path, amps).unwrap();
    let v = json(&["correlations", "--state", path.to_str().unwrap(), "--pairs", "90,0", "--format", "json"]);
    assert!((v["mermin"]["value"].as_f64().unwrap() - 3.0).abs() < 1e-12);
}

#[test]
fn json_output_round_trips_byte_for_byte() {
    for args in [
        &["correlations", "--pairs", "35.264,144.736", "--visibility", "0.8", "--format", "json"][..],
        &["lhv-scan", "--format", "json"],
        &["sample", "--pairs", "90,0", "--shots", "100", "--format", "json"],
        &["optimize", "--state", "ghz-rl", "--format", "json"],
        &["reproduce", "--format", "json"],
    ] {
        let out = tribell(args);
        assert!(out.status.success());
        let text = String::from_utf8(out.stdout).unwrap();
        let parsed: Value = serde_json::from_str(&text).unwrap();
        let rendered = serde_json::to_string_pretty(&parsed).unwrap() + "\n";
        assert_eq!(rendered, text, "{args:?}");
    }
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = tribell(&["lhv-scan", "--format", "json", "--output", path.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["results"].as_array().unwrap().len(), 4);
}
