#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

pub fn polyfeas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyfeas"))
        .args(args)
        .env_remove("POLYFEAS_THREADS")
        .output()
        .expect("binary runs")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn stderr_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().unwrap_or_else(|| panic!("no stderr, stdout: {}", stdout(out)));
    serde_json::from_str(line).unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {text}"))
}

pub fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

/// `A = I`, `B` given, box `[0, 1]^d`.
pub fn identity_problem(b: &str) -> String {
    format!(
        r#"{{"schema_version":"1","kind":"generic","a":[[1,0],[0,1]],"b":{b},"y_lo":[0,0],"y_hi":[1,1]}}"#
    )
}
