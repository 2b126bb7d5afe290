//! Deterministic JSON rendering: object keys keep insertion order and every
//! floating-point number is written with 17 significant digits.

use std::fmt::Write;

use serde::Serialize;
use serde_json::Value;

pub fn to_string<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let value = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&value, 0, &mut out);
    out.push('\n');
    Ok(out)
}

fn write_number(n: &serde_json::Number, out: &mut String) {
    if n.is_f64() {
        let x = n.as_f64().expect("f64 number");
        // serde_json maps non-finite floats to null before we get here.
        let _ = write!(out, "{x:.16e}");
    } else {
        let _ = write!(out, "{n}");
    }
}

fn indent(depth: usize, out: &mut String) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

/// Arrays of scalars stay on one line; everything else is pretty-printed.
fn is_flat(items: &[Value]) -> bool {
    items.iter().all(|v| match v {
        Value::Array(inner) => inner.iter().all(|x| !x.is_array() && !x.is_object()),
        Value::Object(_) => false,
        _ => true,
    })
}

fn write_value(value: &Value, depth: usize, out: &mut String) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => write_number(n, out),
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if is_flat(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(item, depth, out);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                indent(depth + 1, out);
                write_value(item, depth + 1, out);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            indent(depth, out);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (key, item)) in map.iter().enumerate() {
                indent(depth + 1, out);
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(item, depth + 1, out);
                if i + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            indent(depth, out);
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_use_seventeen_digits() {
        let s = to_string(&json!({"pi": std::f64::consts::PI, "one": 1.0, "n": 3})).unwrap();
        assert!(s.contains("\"pi\": 3.1415926535897931e0"), "{s}");
        assert!(s.contains("\"one\": 1.0000000000000000e0"), "{s}");
        assert!(s.contains("\"n\": 3"), "{s}");
    }

    #[test]
    fn output_is_valid_json_and_round_trips_floats() {
        let x = 0.1 + 0.2;
        let s = to_string(&json!({"v": [[x, -1e-300]], "s": "a\"b", "o": {}})).unwrap();
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["v"][0][0].as_f64().unwrap(), x);
        assert_eq!(back["v"][0][1].as_f64().unwrap(), -1e-300);
        assert_eq!(back["s"], "a\"b");
    }

    #[test]
    fn key_order_is_preserved() {
        #[derive(Serialize)]
        struct S {
            zeta: u8,
            alpha: u8,
        }
        let s = to_string(&S { zeta: 1, alpha: 2 }).unwrap();
        assert!(s.find("zeta").unwrap() < s.find("alpha").unwrap());
    }
}
