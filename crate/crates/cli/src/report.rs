use std::fmt::Write as _;
use std::time::Duration;

use dualmds::verify::CheckResult;
use serde_json::{json, Map, Value};

/// Outcome of one CLI command.
///
/// The JSON document leaves out the wall-clock duration so that seeded runs
/// produce byte-identical documents.
#[derive(Debug, Default)]
pub struct RunReport {
    pub command: &'static str,
    pub params: Vec<(String, String)>,
    pub checks: Vec<CheckResult>,
    pub matrices: Vec<(String, String)>,
    pub notes: Vec<String>,
    pub duration: Duration,
}

impl RunReport {
    pub fn new(command: &'static str) -> Self {
        Self {
            command,
            ..Self::default()
        }
    }

    pub fn param(&mut self, name: &str, value: impl ToString) {
        self.params.push((name.to_string(), value.to_string()));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command: {}", self.command);
        for (k, v) in &self.params {
            let _ = writeln!(s, "  {k} = {v}");
        }
        for (name, body) in &self.matrices {
            let _ = writeln!(s, "{name}:");
            for line in body.lines() {
                let _ = writeln!(s, "  {line}");
            }
        }
        for c in &self.checks {
            let _ = writeln!(s, "[{}] {}", if c.pass { "PASS" } else { "FAIL" }, c.name);
            for (label, value) in &c.values {
                let _ = writeln!(s, "    {label}: {}", format_value(*value));
            }
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        let _ = writeln!(s, "duration: {:.3}s", self.duration.as_secs_f64());
        let _ = writeln!(s, "status: {}", if self.passed() { "pass" } else { "fail" });
        s
    }

    pub fn to_json(&self) -> Value {
        let params: Map<String, Value> = self
            .params
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                let values: Vec<Value> = c
                    .values
                    .iter()
                    .map(|(label, value)| json!({ "label": label, "value": number(*value) }))
                    .collect();
                json!({ "name": c.name, "pass": c.pass, "values": values })
            })
            .collect();
        let matrices: Map<String, Value> = self
            .matrices
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        json!({
            "command": self.command,
            "params": params,
            "checks": checks,
            "matrices": matrices,
            "notes": self.notes,
            "status": if self.passed() { "pass" } else { "fail" },
        })
    }
}

fn format_value(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e12).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

// JSON has no NaN or infinity; those become null.
fn number(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}
