//! The JSON document every command prints, and its plain-text rendering.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA: &str = "nebulae-report/1";

/// One re-derived claim.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

/// Output of one command. `timing` is only filled on request so that two
/// runs with the same arguments print identical bytes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema: String,
    pub command: String,
    pub config: Value,
    pub seed: Option<u64>,
    pub results: Value,
    pub validation: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timing: Option<Timing>,
}

impl ReportDocument {
    pub fn new(
        command: &str,
        config: Value,
        seed: Option<u64>,
        results: Value,
        validation: Vec<Check>,
    ) -> Self {
        ReportDocument {
            schema: SCHEMA.to_string(),
            command: command.to_string(),
            config,
            seed,
            results,
            validation,
            timing: None,
        }
    }

    pub fn passed(&self) -> bool {
        !self.validation.is_empty() && self.validation.iter().all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.validation
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values serialize");
        s.push('\n');
        s
    }

    /// Scalar results as `key: value` lines, then one line per check.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.command);
        if let Value::Object(map) = &self.results {
            for (k, v) in map {
                match v {
                    Value::Array(_) | Value::Object(_) => {}
                    Value::String(x) => {
                        let _ = writeln!(s, "  {k}: {x}");
                    }
                    other => {
                        let _ = writeln!(s, "  {k}: {other}");
                    }
                }
            }
        }
        for c in &self.validation {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            let _ = writeln!(s, "  [{mark}] {}: {}", c.name, c.detail);
        }
        if let Some(t) = &self.timing {
            let _ = writeln!(s, "  elapsed: {:.1} ms", t.elapsed_ms);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn json_round_trip_and_timing_is_optional() {
        let doc = ReportDocument::new(
            "tr",
            json!({"file": "a"}),
            None,
            json!({"size": 2}),
            vec![Check::new("transitive", true, "scores 0..2")],
        );
        let text = doc.to_json();
        assert!(!text.contains("timing"));
        let back: ReportDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
        assert!(doc.passed());
    }

    #[test]
    fn empty_validation_does_not_pass() {
        let doc = ReportDocument::new("x", Value::Null, None, Value::Null, vec![]);
        assert!(!doc.passed());
    }

    #[test]
    fn text_lists_scalars_and_checks() {
        let doc = ReportDocument::new(
            "free",
            Value::Null,
            Some(3),
            json!({"free": true, "embeddings": [1, 2]}),
            vec![Check::new("a", false, "b")],
        );
        let text = doc.to_text();
        assert!(text.contains("free: true"));
        assert!(!text.contains("embeddings"));
        assert!(text.contains("[FAIL] a: b"));
        assert_eq!(doc.failed_checks(), vec!["a"]);
    }
}
