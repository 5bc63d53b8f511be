#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_nbcrit"));
    c.env_remove("NBCRIT_TABLE_LIMIT");
    c
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn nbcrit")
}

pub fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "nbcrit {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

pub fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/schemas")
}

/// Errors of `instance` against `docs/schemas/<name>`; empty when valid.
pub fn schema_errors(name: &str, instance: &serde_json::Value) -> Vec<String> {
    let text = std::fs::read_to_string(schema_dir().join(name)).expect("schema file");
    let schema: serde_json::Value = serde_json::from_str(&text).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    validator.iter_errors(instance).map(|e| e.to_string()).collect()
}

pub fn assert_valid(name: &str, instance: &serde_json::Value) {
    let errors = schema_errors(name, instance);
    assert!(errors.is_empty(), "{name}: {errors:?}");
}

/// Header row declared for `key` in `docs/schemas/csv_headers.json`.
pub fn declared_header(key: &str) -> String {
    let text = std::fs::read_to_string(schema_dir().join("csv_headers.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["headers"][key]
        .as_array()
        .unwrap_or_else(|| panic!("no header for {key}"))
        .iter()
        .map(|c| c.as_str().unwrap())
        .collect::<Vec<_>>()
        .join(",")
}

/// Parsed data rows of a CSV with a header.
pub fn csv_rows(text: &str) -> (String, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default().to_string();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (header, rows)
}

pub fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}
