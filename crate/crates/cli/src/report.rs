//! Run reports and output plumbing.

use std::collections::BTreeMap;
use std::io::{IsTerminal, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

/// Everything a subcommand produced. Deterministic unless `wall_time_s` is
/// requested.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub residuals: BTreeMap<String, f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl RunReport {
    pub fn new(command: &str, inputs: Value) -> Self {
        Self {
            command: command.into(),
            inputs,
            results: Value::Null,
            residuals: BTreeMap::new(),
            pass: true,
            wall_time_s: None,
        }
    }

    pub fn residual(&mut self, name: &str, value: f64) {
        self.residuals.insert(name.into(), value);
    }

    /// Records a residual and fails the run when it is not below `tol`.
    pub fn require(&mut self, name: &str, value: f64, tol: f64) {
        self.residual(name, value);
        if value.is_nan() || value >= tol {
            self.pass = false;
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// A run report plus the table emitted under `--format csv`.
pub struct Output {
    pub report: RunReport,
    pub csv: String,
}

pub fn write_text(out: Option<&Path>, text: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn colored(text: &str, code: &str) -> String {
    let plain = std::env::var_os("FUGLEDE_NO_COLOR").is_some() || !std::io::stderr().is_terminal();
    if plain {
        text.to_string()
    } else {
        format!("\x1b[{code}m{text}\x1b[0m")
    }
}

pub fn status(pass: bool, command: &str) {
    let tag = if pass { colored("PASS", "32") } else { colored("FAIL", "31") };
    eprintln!("{tag} {command}");
}

pub fn input_error(msg: &str) {
    eprintln!("{} {msg}", colored("error:", "31"));
}
