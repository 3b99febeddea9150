use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn reltab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reltab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn workspace() -> String {
    fixtures().join("workspace.json").display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

type Row = BTreeMap<String, String>;

/// Nested-loop natural join on the fixture files, read without the library.
fn oracle_join() -> Vec<Row> {
    let lives: Value = serde_json::from_str(&std::fs::read_to_string(fixtures().join("lives.json")).unwrap()).unwrap();
    let left: Vec<Row> = lives["rows"]
        .as_object()
        .unwrap()
        .values()
        .map(|r| serde_json::from_value(r.clone()).unwrap())
        .collect();
    let mut reader = csv::Reader::from_path(fixtures().join("located.csv")).unwrap();
    let header = reader.headers().unwrap().clone();
    let right: Vec<Row> = reader
        .records()
        .map(|r| {
            header
                .iter()
                .zip(r.unwrap().iter())
                .map(|(a, v)| (a.into(), v.into()))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for l in &left {
        for r in &right {
            if l.iter().all(|(a, v)| r.get(a).is_none_or(|w| w == v)) {
                let mut row = l.clone();
                row.extend(r.clone());
                out.push(row);
            }
        }
    }
    out.sort();
    out
}

#[test]
fn join_reproduces_golden_file() {
    let o = reltab(&["join", &workspace(), "lives", "located"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let golden = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/join.json")).unwrap();
    assert_eq!(stdout(&o), golden);
    assert!(stderr(&o).contains("identified: city = lives.city = located.city"));
}

#[test]
fn golden_rows_match_nested_loop_oracle() {
    let golden: Value = serde_json::from_str(
        &std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/join.json")).unwrap(),
    )
    .unwrap();
    let mut rows: Vec<Row> = golden["rows"]
        .as_object()
        .unwrap()
        .values()
        .map(|r| serde_json::from_value(r.clone()).unwrap())
        .collect();
    rows.sort();
    assert_eq!(rows, oracle_join());
}

#[test]
fn validate_exit_codes() {
    assert_eq!(reltab(&["validate", &workspace()]).status.code(), Some(0));

    let bad = reltab(&[
        "validate",
        &fixtures().join("invalid/workspace.json").display().to_string(),
    ]);
    assert_eq!(bad.status.code(), Some(1));
    let report = stderr(&bad);
    assert!(report.contains("`l2`") && report.contains("`city`"), "{report}");

    let missing = reltab(&[
        "validate",
        &fixtures().join("missing/workspace.json").display().to_string(),
    ]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(stderr(&missing).contains("unresolved signature `lives`"));

    let absent = reltab(&["validate", "/nonexistent/workspace.json"]);
    assert_eq!(absent.status.code(), Some(2));
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

#[test]
fn sort_clash_names_the_attribute() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "d.json",
        r#"{"sorts":["a","b"],"values":["1"],"classification":[["a","1"],["b","1"]]}"#,
    );
    write(
        dir.path(),
        "w.json",
        r#"{"domains":{"d":"d.json"},"tables":{
            "s":"s.json","t":"t.json"}}"#,
    );
    write(
        dir.path(),
        "s.json",
        r#"{"signature":{"sorts":["a","b"],"attributes":{"x":"a"}},"domain":"d","rows":{"k":{"x":"1"}}}"#,
    );
    write(
        dir.path(),
        "t.json",
        r#"{"signature":{"sorts":["a","b"],"attributes":{"x":"b"}},"domain":"d","rows":{"k":{"x":"1"}}}"#,
    );
    let o = reltab(&["join", &dir.path().join("w.json").display().to_string(), "s", "t"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("`x`"), "{}", stderr(&o));
}

#[test]
fn disjoint_headers_give_the_product() {
    let o = reltab(&["join", &workspace(), "staff", "cities", "--format", "csv"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 1 + 3 * 3);
}

#[test]
fn enumerate_empty_signature_has_one_tuple() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "d.json",
        r#"{"sorts":["a"],"values":[],"classification":[]}"#,
    );
    write(dir.path(), "e.json", r#"{"sorts":["a"],"attributes":{}}"#);
    write(
        dir.path(),
        "w.json",
        r#"{"domains":{"d":"d.json"},"signatures":{"e":"e.json"}}"#,
    );
    let o = reltab(&[
        "enumerate",
        &dir.path().join("w.json").display().to_string(),
        "--signature",
        "e",
        "--domain",
        "d",
    ]);
    assert!(o.status.success());
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["members"], serde_json::json!([{}]));
}

#[test]
fn image_drops_duplicate_rows() {
    let o = reltab(&["image", &workspace(), "staff"]);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["members"].as_array().unwrap().len(), 2);
}

#[test]
fn exported_tables_import_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("joined.json");
    let o = reltab(&[
        "join",
        &workspace(),
        "lives",
        "located",
        "--out",
        &first.display().to_string(),
    ]);
    assert!(o.status.success());
    write(dir.path(), "w.json", r#"{"tables":{"j":"joined.json"}}"#);
    let again = reltab(&["union", &dir.path().join("w.json").display().to_string(), "j", "j"]);
    assert!(again.status.success(), "{}", stderr(&again));
    let ws = reltab::io::Workspace::load(&dir.path().join("w.json")).unwrap();
    assert_eq!(
        reltab::io::table_to_json(&ws.tables["j"]),
        std::fs::read_to_string(&first).unwrap()
    );
}

#[test]
fn same_seed_same_output() {
    let a = reltab(&["check-laws", "--seed", "3", "--instances", "3"]);
    let b = reltab(&["check-laws", "--seed", "3", "--instances", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let l1 = reltab(&[
        "limit",
        &workspace(),
        &fixtures().join("diagram.json").display().to_string(),
    ]);
    let l2 = reltab(&[
        "limit",
        &workspace(),
        &fixtures().join("diagram.json").display().to_string(),
    ]);
    assert!(l1.status.success(), "{}", stderr(&l1));
    assert_eq!(l1.stdout, l2.stdout);
}

#[test]
fn limit_of_fixture_opspan_matches_join_rows() {
    let o = reltab(&[
        "limit",
        &workspace(),
        &fixtures().join("diagram.json").display().to_string(),
    ]);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let mut rows: Vec<Row> = doc["rows"]
        .as_object()
        .unwrap()
        .values()
        .map(|r| serde_json::from_value(r.clone()).unwrap())
        .collect();
    rows.sort();
    assert_eq!(rows, oracle_join());
}

#[test]
fn sigma_and_substitute_follow_the_morphism() {
    let project = fixtures().join("project.json").display().to_string();
    let sigma = reltab(&["sigma", &workspace(), "lives", &project, "--format", "csv"]);
    assert_eq!(stdout(&sigma), "person\nann\nbob\ncy\n");
    let pulled = reltab(&["substitute", &workspace(), "staff", &project, "--format", "csv"]);
    // three staff keys times three cities
    assert_eq!(stdout(&pulled).lines().count(), 1 + 9);
}
