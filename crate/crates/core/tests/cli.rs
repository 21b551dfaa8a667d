use std::process::{Command, Output};

fn e2zeros(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_e2zeros"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn zeros_csv_has_one_row_per_label() {
    let out = e2zeros(&["zeros", "--max-denominator", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    // 0/1, ±1/2, ±1/3, ±1/4, ±1/5, ±2/5 with 1/2 counted once
    assert_eq!(text.lines().count(), 1 + 10);
    assert!(text.starts_with("c,d,a,b,"));
}

#[test]
fn zeros_json_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zeros.json");
    let out = e2zeros(&["zeros", "--min-height", "0.05", "--format", "json", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let records = json["records"].as_array().unwrap();
    // heights ≈ 1/(c² v0) above .05 leave c ≤ 3
    assert_eq!(records.len(), 4);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(e2zeros(&["zeros"]).status.code(), Some(1));
    assert_eq!(e2zeros(&["zeros", "--max-denominator", "3", "--min-height", "0.1"]).status.code(), Some(1));
    assert_eq!(e2zeros(&["plot", "--figure", "nope", "--out", "x.svg"]).status.code(), Some(1));
    assert_eq!(e2zeros(&["--help"]).status.code(), Some(0));
}

#[test]
fn empty_selection_is_an_error() {
    let out = e2zeros(&["zeros", "--min-height", "0.9"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn verify_theorem_two_passes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = e2zeros(&["verify", "--theorem", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.lines().all(|l| l.starts_with("PASS")), "{stderr}");
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(json["passed"], serde_json::Value::Bool(true));
    assert_eq!(json["strip_chain"].as_array().unwrap().len(), 4);
}

#[test]
fn plots_are_svg() {
    let dir = tempfile::tempdir().unwrap();
    for figure in ["zeros_scatter", "real_locus", "h_image", "circles"] {
        let path = dir.path().join(format!("{figure}.svg"));
        let out = e2zeros(&["plot", "--figure", figure, "--out", path.to_str().unwrap()]);
        assert!(out.status.success(), "{figure}: {}", String::from_utf8_lossy(&out.stderr));
        let svg = std::fs::read_to_string(&path).unwrap();
        let doc = roxmltree::Document::parse(&svg).unwrap();
        assert_eq!(doc.root_element().tag_name().name(), "svg");
    }
}

#[test]
fn unwritable_output_fails() {
    let out = e2zeros(&["axis-zeros", "--out", "/nonexistent-dir/zeros.csv"]);
    assert_eq!(out.status.code(), Some(1));
}
