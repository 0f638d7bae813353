//! Verdict reports: one entry per check with its values, a witness on
//! failure, the seed of randomized checks and the elapsed time.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::rational::{self, Q};

pub const REPORT_VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckReport {
    pub name: String,
    pub verdict: Verdict,
    /// Names the statement the check exercises.
    pub tag: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    pub values: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub version: String,
    pub pass: bool,
    pub checks: Vec<CheckReport>,
}

impl Report {
    pub fn new(checks: Vec<CheckReport>) -> Self {
        let pass = checks.iter().all(|c| c.verdict == Verdict::Pass);
        Report { version: REPORT_VERSION.into(), pass, checks }
    }

    pub fn to_json(&self, pretty: bool) -> String {
        if pretty {
            serde_json::to_string_pretty(self)
        } else {
            serde_json::to_string(self)
        }
        .expect("reports serialize")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Plain text for terminals.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let v = match c.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
            };
            let _ = write!(out, "[{v}] {} ({})  {:.1} ms", c.name, c.tag, c.elapsed_ms);
            if let Some(s) = c.seed {
                let _ = write!(out, "  seed {s}");
            }
            out.push('\n');
            text_fields(&mut out, &c.values, 4);
            if let Some(w) = &c.witness {
                out.push_str("    witness:\n");
                text_fields(&mut out, w, 6);
            }
        }
        let _ = writeln!(
            out,
            "{} of {} checks passed",
            self.checks.iter().filter(|c| c.verdict == Verdict::Pass).count(),
            self.checks.len()
        );
        out
    }
}

fn text_fields(out: &mut String, v: &Value, indent: usize) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let _ = writeln!(out, "{:indent$}{k}: {}", "", compact(x));
            }
        }
        other => {
            let _ = writeln!(out, "{:indent$}{}", "", compact(other));
        }
    }
}

fn compact(v: &Value) -> String {
    let s = v.to_string();
    if s.len() > 160 {
        format!("{}…", &s[..s.char_indices().nth(157).map_or(s.len(), |(i, _)| i)])
    } else {
        s
    }
}

/// A float rounded to 12 significant digits; non-finite values become strings.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::String(x.to_string());
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

pub fn matrix(rows: &[Vec<f64>]) -> Value {
    Value::Array(rows.iter().map(|r| nums(r)).collect())
}

pub fn exact(x: &Q) -> Value {
    Value::String(rational::format(x))
}

pub fn exacts(xs: &[Q]) -> Value {
    Value::Array(xs.iter().map(exact).collect())
}

/// Builds a JSON object from key/value pairs, keeping insertion order.
pub fn obj<const N: usize>(pairs: [(&str, Value); N]) -> Value {
    let mut m = Map::new();
    for (k, v) in pairs {
        m.insert(k.to_string(), v);
    }
    Value::Object(m)
}
