//! Deterministic number formatting for report files.

use serde::Serialize;
use serde_json::Value;

use crate::error::Result;

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Shortest decimal form of `round12(x)`.
pub fn fmt(x: f64) -> String {
    format!("{}", round12(x))
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                if let Some(r) = serde_json::Number::from_f64(round12(x)) {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with every float rounded to 12 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_is_stable() {
        assert_eq!(fmt(std::f64::consts::PI), "3.14159265359");
        assert_eq!(fmt(0.1 + 0.2), "0.3");
        assert_eq!(round12(round12(1.0 / 3.0)), round12(1.0 / 3.0));
        let text = to_json(&vec![1.0 / 3.0, 2.0]).unwrap();
        assert!(text.contains("0.333333333333"));
    }
}
