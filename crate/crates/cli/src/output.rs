//! Result records and their two renderings.
//!
//! A command builds one ordered JSON object. `machine` prints it on one
//! line; `human` prints the same fields as an indented outline.

use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Human,
    Machine,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "human" => Ok(Format::Human),
            "machine" => Ok(Format::Machine),
            _ => Err(format!("unknown format `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Record(Map<String, Value>);

impl Record {
    pub fn new(command: &str) -> Self {
        let mut r = Record::default();
        r.set("command", command);
        r
    }

    pub fn set(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.0.insert(key.to_string(), v.into());
        self
    }

    pub fn into_value(self) -> Value {
        Value::Object(self.0)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Machine => {
                let mut s = serde_json::to_string(&self.0).expect("records serialize");
                s.push('\n');
                s
            }
            Format::Human => {
                let mut out = String::new();
                for (k, v) in &self.0 {
                    if k != "command" {
                        field(&mut out, k, v, 0);
                    }
                }
                out
            }
        }
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) if s.is_empty() => Some("\"\"".into()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.is_empty() => Some("(none)".into()),
        _ => None,
    }
}

fn field(out: &mut String, k: &str, v: &Value, indent: usize) {
    let pad = " ".repeat(indent);
    match scalar(v) {
        Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
        None => {
            out.push_str(&format!("{pad}{k}:\n"));
            block(out, v, indent + 2);
        }
    }
}

fn block(out: &mut String, v: &Value, indent: usize) {
    let pad = " ".repeat(indent);
    match v {
        Value::Array(items) => {
            for item in items {
                match (scalar(item), item) {
                    (Some(s), _) => out.push_str(&format!("{pad}- {s}\n")),
                    (None, Value::Object(m)) => {
                        let mut inner = String::new();
                        for (k, v) in m {
                            field(&mut inner, k, v, indent + 2);
                        }
                        // First line takes the bullet.
                        out.push_str(&format!("{pad}- {}", &inner[indent + 2..]));
                    }
                    (None, other) => {
                        out.push_str(&format!("{pad}-\n"));
                        block(out, other, indent + 2);
                    }
                }
            }
        }
        Value::Object(m) => {
            for (k, v) in m {
                field(out, k, v, indent);
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn both_formats() {
        let mut r = Record::new("rg");
        r.set("count", 1).set(
            "systems",
            json!([{"equations": ["y[1]^2 - 4*y[0]"], "inequations": ["y[1]"]}]),
        );
        assert_eq!(
            r.render(Format::Machine),
            "{\"command\":\"rg\",\"count\":1,\"systems\":[{\"equations\":[\"y[1]^2 - 4*y[0]\"],\"inequations\":[\"y[1]\"]}]}\n"
        );
        assert_eq!(
            r.render(Format::Human),
            "count: 1\nsystems:\n  - equations:\n      - y[1]^2 - 4*y[0]\n    inequations:\n      - y[1]\n"
        );
    }

    #[test]
    fn scalars() {
        let mut r = Record::new("x");
        r.set("value", Value::Null)
            .set("list", json!([]))
            .set("ok", true);
        assert_eq!(
            r.render(Format::Human),
            "value: -\nlist: (none)\nok: true\n"
        );
    }
}
