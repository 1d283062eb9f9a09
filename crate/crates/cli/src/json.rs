//! Number formatting and the text rendering of report payloads.
//!
//! Floats are written with 17 significant digits and stored as arbitrary-
//! precision JSON numbers, so the text and JSON renderings print the same
//! digit strings.

use std::str::FromStr;

use serde_json::{Number, Value};

/// `x` with 17 significant digits; positional notation for exponents in `[-5, 16]`.
pub fn sig17(x: f64) -> String {
    if x == 0.0 {
        return "0.0".to_string();
    }
    let s = format!("{:.16e}", x);
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let neg = mant.starts_with('-');
    let digits: String = mant.trim_start_matches('-').chars().filter(|c| *c != '.').collect();
    let body = if (-5..=16).contains(&exp) {
        if exp >= 0 {
            let (int, frac) = digits.split_at(exp as usize + 1);
            if frac.is_empty() {
                format!("{int}.0")
            } else {
                format!("{int}.{frac}")
            }
        } else {
            format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
        }
    } else {
        format!("{}.{}e{}", &digits[..1], &digits[1..], exp)
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// JSON number for a finite float, string `"nan"`, `"inf"` or `"-inf"` otherwise.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(Number::from_str(&sig17(x)).expect("formatted float is a JSON number"))
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

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("null".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn inline(v: &Value) -> Option<String> {
    if let Some(s) = scalar(v) {
        return Some(s);
    }
    match v {
        Value::Array(items) => {
            let parts: Option<Vec<String>> = items.iter().map(scalar).collect();
            parts.map(|p| format!("[{}]", p.join(", ")))
        }
        Value::Object(map) if map.is_empty() => Some("{}".into()),
        _ => None,
    }
}

/// Indented `key: value` rendering of a JSON tree.
pub fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (key, val) in map {
                match inline(val) {
                    Some(s) => out.push_str(&format!("{pad}{key}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{key}:\n"));
                        render_text(val, indent + 1, out);
                    }
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match inline(item) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        render_text(item, indent + 1, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, -2.5, 1.0 / 3.0, 3.158727282575, 1e-9, 6.02e23, -7.25e-6, 1234567.0] {
            let s = sig17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
            assert_eq!(s.chars().filter(|c| c.is_ascii_digit()).count() - leading_zeros(&s) - exponent_digits(&s), 17, "{s}");
        }
        assert_eq!(sig17(1.0), "1.0000000000000000");
        assert_eq!(sig17(0.0), "0.0");
        assert_eq!(sig17(-0.0), "0.0");
    }

    fn leading_zeros(s: &str) -> usize {
        let m = s.trim_start_matches('-').split('e').next().unwrap();
        m.chars().take_while(|c| *c == '0' || *c == '.').filter(|c| *c == '0').count()
    }

    fn exponent_digits(s: &str) -> usize {
        s.split_once('e').map_or(0, |(_, e)| e.chars().filter(|c| c.is_ascii_digit()).count())
    }

    #[test]
    fn json_and_text_share_digits() {
        let v = serde_json::json!({ "x": num(0.1), "xs": nums(&[2.0, f64::NAN]), "nested": { "flag": true } });
        let json = serde_json::to_string(&v).unwrap();
        let mut text = String::new();
        render_text(&v, 0, &mut text);
        assert!(json.contains("0.10000000000000001"));
        assert!(text.contains("x: 0.10000000000000001"));
        assert!(text.contains("xs: [2.0000000000000000, nan]"));
        assert!(text.contains("nested:\n  flag: true"));
    }
}
