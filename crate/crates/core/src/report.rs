//! Report emission.
//!
//! A report is a header (the effective configuration), a list of row
//! records and a summary record. It renders either as line-oriented text,
//! one record per line of `key=value` pairs, or as a JSON tree.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde_json::{Map, Value};

use crate::dynamics::PlanePoint;
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Tree,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "text" => Ok(Format::Text),
            "tree" => Ok(Format::Tree),
            other => Err(Error::InvalidParameter(format!(
                "unknown format {other:?} (expected text or tree)"
            ))),
        }
    }
}

/// Ordered `key=value` record.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record(Vec<(String, Value)>);

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: impl Into<String>, value: impl Into<Value>) -> Self {
        self.push(key, value);
        self
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Into<Value>) {
        self.0.push((key.into(), value.into()));
    }

    /// Adds `<key>_re` and `<key>_im`.
    pub fn with_complex(self, key: &str, c: Complex64) -> Self {
        self.with(format!("{key}_re"), c.re).with(format!("{key}_im"), c.im)
    }

    pub fn with_point(self, key: &str, p: &PlanePoint) -> Self {
        self.with_complex(&format!("{key}_z"), p.z)
            .with_complex(&format!("{key}_w"), p.w)
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn entries(&self) -> &[(String, Value)] {
        &self.0
    }

    fn to_object(&self) -> Value {
        Value::Object(self.0.iter().cloned().collect::<Map<String, Value>>())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub kind: String,
    pub config: Record,
    pub rows: Vec<Record>,
    pub summary: Record,
}

fn text_value(v: &Value) -> String {
    match v {
        Value::String(s) if !s.is_empty() && !s.contains(|c: char| c.is_whitespace() || c == '=' || c == '"') => {
            s.clone()
        }
        Value::Null => "none".to_string(),
        // non-finite floats become null in serde_json
        other => other.to_string(),
    }
}

fn write_line(f: &mut fmt::Formatter<'_>, lead: &str, r: &Record) -> fmt::Result {
    f.write_str(lead)?;
    for (k, v) in r.entries() {
        write!(f, " {k}={}", text_value(v))?;
    }
    f.write_str("\n")
}

impl Report {
    pub fn new(kind: impl Into<String>, config: Record) -> Self {
        Self {
            kind: kind.into(),
            config,
            rows: Vec::new(),
            summary: Record::new(),
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.to_string(),
            Format::Tree => {
                let mut root = Map::new();
                root.insert("report".into(), Value::String(self.kind.clone()));
                root.insert("config".into(), self.config.to_object());
                root.insert(
                    "rows".into(),
                    Value::Array(self.rows.iter().map(Record::to_object).collect()),
                );
                root.insert("summary".into(), self.summary.to_object());
                let mut s = serde_json::to_string_pretty(&Value::Object(root))
                    .expect("report values are always serializable");
                s.push('\n');
                s
            }
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_line(f, &format!("record=config report={}", self.kind), &self.config)?;
        for r in &self.rows {
            write_line(f, "record=row", r)?;
        }
        write_line(f, "record=summary", &self.summary)
    }
}

/// Floats that JSON cannot hold are reported as strings.
pub fn float(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else {
        Value::String(x.to_string())
    }
}
