//! Numeric output: twelve significant digits, `+∞` as `"inf"`.

use serde::Serialize;
use serde_json::Value;

const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds to twelve significant digits; the result prints in shortest form.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

/// One CSV cell. `None` (undefined at this row) prints as an empty cell.
pub fn cell(x: Option<f64>) -> String {
    match x {
        None => String::new(),
        Some(x) if x == f64::INFINITY => "inf".to_owned(),
        Some(x) if x.is_nan() => "nan".to_owned(),
        Some(x) => serde_json::Number::from_f64(round_sig(x))
            .map(|n| n.to_string())
            .unwrap_or_default(),
    }
}

pub fn number(x: f64) -> Value {
    if x == f64::INFINITY {
        return Value::String("inf".to_owned());
    }
    serde_json::Number::from_f64(round_sig(x))
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

/// Serializes `item` and rounds every floating-point leaf.
pub fn to_json<T: Serialize>(item: &T) -> Value {
    let mut value = serde_json::to_value(item).expect("output types serialize");
    round_floats(&mut value);
    value
}

pub fn round_floats(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            *value = number(n.as_f64().unwrap_or(f64::NAN));
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}
