use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

/// `x` rounded to `digits` significant decimal digits.
pub fn round_significant(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x).parse().unwrap_or(x)
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(_), _, _) | (_, Some(_), _) => Value::Number(n),
            (_, _, Some(f)) => serde_json::Number::from_f64(round_significant(f, 12))
                .map(Value::Number)
                .unwrap_or(Value::Null),
            _ => Value::Number(n),
        },
        Value::Array(items) => Value::Array(items.into_iter().map(round_value).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

/// Pretty JSON with sorted keys and numbers rounded to 12 significant digits.
pub fn report_json<T: Serialize>(report: &T) -> Result<String> {
    let value = serde_json::to_value(report).map_err(|e| Error::Schema(e.to_string()))?;
    let empty = match &value {
        Value::Null => true,
        Value::Object(m) => m.is_empty(),
        Value::Array(a) => a.is_empty(),
        _ => false,
    };
    if empty {
        return Err(Error::Schema("report is empty".into()));
    }
    let mut s = serde_json::to_string_pretty(&round_value(value)).map_err(|e| Error::Schema(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn save_report<T: Serialize>(path: impl AsRef<Path>, report: &T) -> Result<()> {
    let path = path.as_ref();
    let text = report_json(report)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn rounding() {
        assert_eq!(round_significant(0.1 + 0.2, 12), 0.3);
        assert_eq!(round_significant(123456.7890123456, 12), 123456.789012);
        assert_eq!(round_significant(0.0, 12), 0.0);
    }

    #[test]
    fn empty_report_is_a_schema_error() {
        let empty: BTreeMap<String, f64> = BTreeMap::new();
        assert!(matches!(report_json(&empty), Err(Error::Schema(_))));
        assert!(matches!(report_json(&()), Err(Error::Schema(_))));
    }

    #[test]
    fn keys_are_sorted_and_stable() {
        #[derive(Serialize)]
        struct R {
            zeta: f64,
            alpha: u32,
        }
        let s = report_json(&R { zeta: 1.0 / 3.0, alpha: 2 }).unwrap();
        assert!(s.find("alpha").unwrap() < s.find("zeta").unwrap());
        assert!(s.contains("0.333333333333"));
        assert_eq!(s, report_json(&R { zeta: 1.0 / 3.0, alpha: 2 }).unwrap());
    }
}
