//! Deterministic JSON rendering for reports.
//!
//! Reports must be byte-identical across runs, platforms, and thread counts,
//! so they are rendered through this small ordered value type instead of a
//! generic serializer: object keys keep insertion order, metric values are
//! printed with exactly six decimals, and raw per-utterance values use the
//! shortest round-trip decimal form. Non-finite numbers render as `null`.

use std::fmt::Write;

#[derive(Debug, Clone)]
pub enum JVal {
    Null,
    Bool(bool),
    /// Unsigned count.
    Count(u64),
    /// Signed integer.
    Int(i64),
    /// Fixed six-decimal rendering, for corpus-level metric values.
    Fixed6(f64),
    /// Shortest round-trip rendering, for raw per-utterance values.
    Full(f64),
    Str(String),
    Arr(Vec<JVal>),
    Obj(Vec<(&'static str, JVal)>),
}

impl JVal {
    pub fn str(s: impl Into<String>) -> JVal {
        JVal::Str(s.into())
    }

    pub fn render(&self) -> String {
        let mut buf = String::new();
        self.write(&mut buf, 0);
        buf.push('\n');
        buf
    }

    fn write(&self, buf: &mut String, indent: usize) {
        match self {
            JVal::Null => buf.push_str("null"),
            JVal::Bool(b) => {
                let _ = write!(buf, "{b}");
            }
            JVal::Count(n) => {
                let _ = write!(buf, "{n}");
            }
            JVal::Int(n) => {
                let _ = write!(buf, "{n}");
            }
            JVal::Fixed6(v) => {
                if v.is_finite() {
                    let _ = write!(buf, "{v:.6}");
                } else {
                    buf.push_str("null");
                }
            }
            JVal::Full(v) => {
                if v.is_finite() {
                    let _ = write!(buf, "{v}");
                } else {
                    buf.push_str("null");
                }
            }
            JVal::Str(s) => {
                buf.push_str(&serde_json::to_string(s).expect("string serialization"));
            }
            JVal::Arr(items) => {
                if items.is_empty() {
                    buf.push_str("[]");
                    return;
                }
                buf.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        buf.push(',');
                    }
                    buf.push('\n');
                    pad(buf, indent + 1);
                    item.write(buf, indent + 1);
                }
                buf.push('\n');
                pad(buf, indent);
                buf.push(']');
            }
            JVal::Obj(fields) => {
                if fields.is_empty() {
                    buf.push_str("{}");
                    return;
                }
                buf.push('{');
                for (i, (key, value)) in fields.iter().enumerate() {
                    if i > 0 {
                        buf.push(',');
                    }
                    buf.push('\n');
                    pad(buf, indent + 1);
                    let _ = write!(buf, "\"{key}\": ");
                    value.write(buf, indent + 1);
                }
                buf.push('\n');
                pad(buf, indent);
                buf.push('}');
            }
        }
    }
}

fn pad(buf: &mut String, indent: usize) {
    for _ in 0..indent {
        buf.push_str("  ");
    }
}
