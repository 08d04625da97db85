//! Report and artifact formatting. Reals carry 17 significant digits;
//! infinities are written as the strings "inf" and "-inf".

use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use anyhow::{Context, Result};
use serde_json::{Map, Number, Value};

use semidirect::surface::io::fmt17;

pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(Number::from_str(&fmt17(x)).expect("formatted float is a JSON number"))
    } else if x.is_nan() {
        Value::String("nan".into())
    } else if x > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

/// Rewrites every non-integer number in `v` with 17 significant digits.
pub fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => num(n.as_f64().unwrap_or(f64::NAN)),
        Value::Array(a) => Value::Array(a.into_iter().map(normalize).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, normalize(v))).collect()),
        other => other,
    }
}

/// One asserted comparison `value <= tolerance` (or `value == 0` style
/// counts with tolerance 0).
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: &'static str, value: f64, tolerance: f64) -> Self {
        Self { name, value, tolerance, passed: value <= tolerance }
    }

    pub fn at_least(name: &'static str, value: f64, bound: f64) -> Self {
        Self { name, value, tolerance: bound, passed: value >= bound }
    }

    fn to_json(&self, kind: &str) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), Value::String(self.name.into()));
        m.insert("kind".into(), Value::String(kind.into()));
        m.insert("value".into(), num(self.value));
        m.insert("tolerance".into(), num(self.tolerance));
        m.insert("passed".into(), Value::Bool(self.passed));
        Value::Object(m)
    }
}

/// Deterministic run report: nothing time- or path-dependent goes in here.
pub struct Report {
    command: &'static str,
    config: Value,
    fields: Map<String, Value>,
    artifacts: Vec<String>,
    checks: Vec<(Check, bool)>,
}

impl Report {
    pub fn new(command: &'static str, config: &impl serde::Serialize) -> Result<Self> {
        Ok(Self {
            command,
            config: normalize(serde_json::to_value(config)?),
            fields: Map::new(),
            artifacts: Vec::new(),
            checks: Vec::new(),
        })
    }

    pub fn field(&mut self, key: &str, v: Value) {
        self.fields.insert(key.into(), v);
    }

    pub fn artifact(&mut self, name: &str) {
        self.artifacts.push(name.into());
    }

    /// Adds a check that decides the exit status.
    pub fn assert(&mut self, c: Check) {
        self.checks.push((c, true));
    }

    /// Adds a check that is reported only.
    pub fn note(&mut self, c: Check) {
        self.checks.push((c, false));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(c, asserted)| c.passed || !asserted)
    }

    pub fn checks(&self) -> impl Iterator<Item = (&Check, bool)> {
        self.checks.iter().map(|(c, a)| (c, *a))
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), Value::String(self.command.into()));
        m.insert("version".into(), Value::String(env!("CARGO_PKG_VERSION").into()));
        m.insert("config".into(), self.config.clone());
        for (k, v) in &self.fields {
            m.insert(k.clone(), v.clone());
        }
        m.insert(
            "artifacts".into(),
            Value::Array(self.artifacts.iter().map(|a| Value::String(a.clone())).collect()),
        );
        m.insert(
            "checks".into(),
            Value::Array(
                self.checks
                    .iter()
                    .map(|(c, a)| c.to_json(if *a { "asserted" } else { "reported" }))
                    .collect(),
            ),
        );
        m.insert("passed".into(), Value::Bool(self.passed()));
        Value::Object(m)
    }
}

pub fn json_text(v: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

/// Writes `bytes` to `dir/name` through a temporary file in `dir` and a rename.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating temp file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    let target = dir.join(name);
    tmp.persist(&target).with_context(|| format!("writing {}", target.display()))?;
    Ok(())
}
