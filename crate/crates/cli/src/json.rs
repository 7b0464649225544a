//! Minimal ordered JSON writer.
//!
//! Reports are golden-tested byte for byte, so keys are written in insertion
//! order and every float is printed with 17 significant digits
//! (`{:.16e}`), which is enough for an exact round trip through any correct
//! decimal parser.

use std::fmt::Write as _;

use symspec::Matrix;

#[derive(Clone, Debug, PartialEq)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
    Array(Vec<Json>),
    Object(Vec<(String, Json)>),
}

impl Json {
    pub fn object() -> Json {
        Json::Object(Vec::new())
    }

    /// Appends a key; panics on non-objects.
    pub fn with(mut self, key: &str, value: impl Into<Json>) -> Json {
        match &mut self {
            Json::Object(fields) => fields.push((key.to_string(), value.into())),
            _ => panic!("with() on a non-object"),
        }
        self
    }

    pub fn floats(xs: &[f64]) -> Json {
        Json::Array(xs.iter().map(|&x| Json::Float(x)).collect())
    }

    /// `{"rows": r, "cols": c, "data": [[…], …]}`.
    pub fn matrix(m: &Matrix) -> Json {
        let rows = (0..m.rows()).map(|i| Json::floats(m.row(i))).collect();
        Json::object()
            .with("rows", m.rows())
            .with("cols", m.cols())
            .with("data", Json::Array(rows))
    }

    /// Pretty-printed with two-space indentation and a trailing newline.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String, indent: usize) {
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(i) => write!(out, "{i}").expect("string write"),
            Json::Float(x) => write_float(out, *x),
            Json::Str(s) => write_str(out, s),
            Json::Array(items) => {
                // numeric rows stay on one line
                if items.iter().all(|x| matches!(x, Json::Float(_) | Json::Int(_))) {
                    out.push('[');
                    for (i, x) in items.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        x.write(out, indent);
                    }
                    out.push(']');
                    return;
                }
                out.push('[');
                for (i, x) in items.iter().enumerate() {
                    out.push_str(if i > 0 { ",\n" } else { "\n" });
                    pad(out, indent + 1);
                    x.write(out, indent + 1);
                }
                out.push('\n');
                pad(out, indent);
                out.push(']');
            }
            Json::Object(fields) => {
                if fields.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push('{');
                for (i, (k, v)) in fields.iter().enumerate() {
                    out.push_str(if i > 0 { ",\n" } else { "\n" });
                    pad(out, indent + 1);
                    write_str(out, k);
                    out.push_str(": ");
                    v.write(out, indent + 1);
                }
                out.push('\n');
                pad(out, indent);
                out.push('}');
            }
        }
    }
}

fn pad(out: &mut String, indent: usize) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}

fn write_float(out: &mut String, x: f64) {
    // non-finite values cannot occur in valid reports; keep the JSON valid anyway
    if x.is_finite() {
        write!(out, "{x:.16e}").expect("string write");
    } else {
        out.push_str("null");
    }
}

fn write_str(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => write!(out, "\\u{:04x}", c as u32).expect("string write"),
            c => out.push(c),
        }
    }
    out.push('"');
}

impl From<f64> for Json {
    fn from(x: f64) -> Self {
        Json::Float(x)
    }
}

impl From<usize> for Json {
    fn from(x: usize) -> Self {
        Json::Int(x as i64)
    }
}

impl From<u64> for Json {
    fn from(x: u64) -> Self {
        Json::Int(x as i64)
    }
}

impl From<bool> for Json {
    fn from(b: bool) -> Self {
        Json::Bool(b)
    }
}

impl From<&str> for Json {
    fn from(s: &str) -> Self {
        Json::Str(s.to_string())
    }
}

impl From<String> for Json {
    fn from(s: String) -> Self {
        Json::Str(s)
    }
}

impl From<Option<String>> for Json {
    fn from(s: Option<String>) -> Self {
        s.map_or(Json::Null, Json::Str)
    }
}

impl From<&Matrix> for Json {
    fn from(m: &Matrix) -> Self {
        Json::matrix(m)
    }
}

impl From<Vec<Json>> for Json {
    fn from(v: Vec<Json>) -> Self {
        Json::Array(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_serde() {
        for x in [0.0, -0.0, 1.0, 0.1, 1.0 / 3.0, f64::MAX, f64::MIN_POSITIVE, 5e-324, -2.5e-17] {
            let text = Json::Float(x).render();
            let back: f64 = serde_json::from_str(text.trim()).unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{text}");
        }
    }

    #[test]
    fn keys_keep_insertion_order() {
        let j = Json::object().with("z", 1usize).with("a", "x\"y");
        assert_eq!(j.render(), "{\n  \"z\": 1,\n  \"a\": \"x\\\"y\"\n}\n");
    }

    #[test]
    fn matrices_render_row_per_line() {
        let m = Matrix::identity(2);
        let text = Json::matrix(&m).render();
        assert!(text.contains("[1.0000000000000000e0, 0.0000000000000000e0]"));
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["rows"], 2);
    }
}
