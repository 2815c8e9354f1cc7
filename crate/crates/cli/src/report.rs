use std::io::Write;
use std::time::Instant;

use nlgame::rational::{self, Rational};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

/// Exact value, serialized as `"num/den"` alongside its decimal.
pub fn exact(r: &Rational) -> Value {
    json!({ "exact": rational::format(r), "decimal": rational::to_f64(r) })
}

pub fn float(v: f64, tolerance: f64) -> Value {
    json!({ "float": v, "tolerance": tolerance })
}

pub fn tagged(value: Value, tag: &str) -> Value {
    json!({ "value": value, "tag": tag })
}

pub struct Report {
    command: Vec<String>,
    hasher: Sha256,
    results: Map<String, Value>,
    timings: Map<String, Value>,
    pub pass: bool,
}

impl Report {
    pub fn new(command: Vec<String>) -> Self {
        let mut hasher = Sha256::new();
        for arg in &command {
            hasher.update(arg.as_bytes());
            hasher.update([0]);
        }
        Report {
            command,
            hasher,
            results: Map::new(),
            timings: Map::new(),
            pass: true,
        }
    }

    /// Folds the contents of an input file into the inputs hash.
    pub fn input(&mut self, bytes: &[u8]) {
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(bytes);
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.results.insert(key.to_string(), value);
    }

    pub fn timed<T>(&mut self, key: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings
            .insert(key.to_string(), json!(start.elapsed().as_secs_f64() * 1e3));
        out
    }

    pub fn fail(&mut self) {
        self.pass = false;
    }

    pub fn finish(self) -> (Value, bool) {
        let hash: String = self.hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
        let v = json!({
            "command": self.command,
            "inputs_hash": hash,
            "results": self.results,
            "timings_ms": self.timings,
            "version": env!("CARGO_PKG_VERSION"),
            "pass": self.pass,
        });
        (v, self.pass)
    }
}

/// Single-line rendering of a result value for terminal output.
pub fn render(v: &Value) -> String {
    match v {
        Value::Object(m) if m.contains_key("exact") && m.contains_key("decimal") => {
            format!("{} ({})", m["exact"].as_str().unwrap_or("?"), m["decimal"])
        }
        Value::Object(m) if m.contains_key("float") && m.contains_key("tolerance") => {
            format!("{} (± {})", m["float"], m["tolerance"])
        }
        Value::Object(m) if m.contains_key("tag") && m.contains_key("value") => {
            format!("{} [{}]", render(&m["value"]), m["tag"].as_str().unwrap_or(""))
        }
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn print_human(report: &Value) {
    let mut out = std::io::stdout().lock();
    let results = report["results"].as_object().cloned().unwrap_or_default();
    for (k, v) in &results {
        match v {
            Value::Object(m) if !m.contains_key("exact") && !m.contains_key("float") && !m.contains_key("tag") => {
                let _ = writeln!(out, "{k}:");
                for (k2, v2) in m {
                    let _ = writeln!(out, "  {k2}: {}", render(v2));
                }
            }
            _ => {
                let _ = writeln!(out, "{k}: {}", render(v));
            }
        }
    }
    let _ = writeln!(out, "pass: {}", report["pass"]);
}
