//! Text reports: `key = value` lines followed by the same data as JSON.

use std::fmt::Write as _;

use serde_json::{Map, Value};

use crate::args::{DEFAULT_DEPTH, DEFAULT_RESOLUTION};

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    entries: Vec<(String, Value)>,
}

impl Report {
    /// Starts a report with the run parameters every report carries.
    pub fn new(command: &str, resolution: Option<u32>, depth: Option<usize>, seed: u64) -> Self {
        let mut r = Self { entries: Vec::new() };
        r.push("command", command);
        r.push("resolution", resolution.unwrap_or(DEFAULT_RESOLUTION));
        r.push("depth", depth.unwrap_or(DEFAULT_DEPTH) as u64);
        r.push("seed", format!("{seed:#X}").replacen("0X", "0x", 1));
        r
    }

    pub fn push(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.entries.push((key.to_string(), value.into()));
        self
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let text = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            let _ = writeln!(out, "{k} = {text}");
        }
        let map: Map<String, Value> = self.entries.iter().cloned().collect();
        out.push_str(&serde_json::to_string_pretty(&Value::Object(map)).expect("plain JSON values"));
        out.push('\n');
        out
    }
}
