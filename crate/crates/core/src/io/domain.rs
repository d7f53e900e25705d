use std::path::Path;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::geometry::{ClosedCurve, DomainSpec, Vec2};

/// Parsed contents of a domain file, before geometric validation.
///
/// ```json
/// {"curve": {"type": "fourier", "x_cos": [0, 1], "x_sin": [0, 0],
///            "y_cos": [0, 0], "y_sin": [0, 1]},
///  "delta": 0.4, "mode": "tubular"}
/// ```
///
/// Curve types: `fourier` (coefficient arrays `x_cos`, `x_sin`, `y_cos`,
/// `y_sin`, index k multiplying cos/sin(k t)), `polyline` (`points`, closed
/// periodic spline), `circle` (`center`, `radius`), `ellipse` (`center`, `a`,
/// `b`) and `rect` (`min`, `max`, raw mode only). Raw mode accepts `holes`,
/// a list of curves.
#[derive(Debug, Clone)]
pub struct DomainFile {
    pub spec: DomainSpec,
    pub raw: Value,
}

pub fn load_domain(path: impl AsRef<Path>) -> Result<DomainSpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_domain(&text).map(|d| d.spec)
}

pub fn parse_domain(text: &str) -> Result<DomainFile> {
    let raw: Value = serde_json::from_str(text)
        .map_err(|e| Error::parse(format!("domain file line {} column {}", e.line(), e.column()), e.to_string()))?;
    let obj = raw
        .as_object()
        .ok_or_else(|| Error::parse("domain file", "top level must be an object"))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "curve" | "delta" | "mode" | "holes") {
            return Err(Error::parse(key.clone(), "unknown field"));
        }
    }
    let curve_v = obj.get("curve").ok_or_else(|| Error::parse("curve", "missing field"))?;
    let delta = match obj.get("delta") {
        None | Some(Value::Null) => None,
        Some(v) => Some(v.as_f64().ok_or_else(|| Error::parse("delta", "expected a number"))?),
    };
    let mode = match obj.get("mode") {
        None => {
            if delta.is_some() {
                "tubular"
            } else {
                "raw"
            }
        }
        Some(v) => v.as_str().ok_or_else(|| Error::parse("mode", "expected a string"))?,
    };
    let spec = match mode {
        "tubular" => {
            let delta = delta.ok_or_else(|| Error::parse("delta", "tubular mode requires a half-width"))?;
            if obj.contains_key("holes") {
                return Err(Error::parse("holes", "only allowed in raw mode"));
            }
            let core = match parse_curve(curve_v, "curve")? {
                Parsed::Curve(c) => c,
                Parsed::Rect(..) => return Err(Error::parse("curve.type", "rect is only allowed in raw mode")),
            };
            DomainSpec::tubular(core, delta)?
        }
        "raw" => {
            if delta.is_some() {
                return Err(Error::parse("delta", "only allowed in tubular mode"));
            }
            let holes = match obj.get("holes") {
                None => Vec::new(),
                Some(Value::Array(items)) => items
                    .iter()
                    .enumerate()
                    .map(|(k, v)| match parse_curve(v, &format!("holes[{k}]"))? {
                        Parsed::Curve(c) => Ok(c),
                        Parsed::Rect(..) => Err(Error::parse(format!("holes[{k}].type"), "rect holes are not supported")),
                    })
                    .collect::<Result<_>>()?,
                Some(_) => return Err(Error::parse("holes", "expected an array of curves")),
            };
            match parse_curve(curve_v, "curve")? {
                Parsed::Curve(c) => DomainSpec::raw(c, holes),
                Parsed::Rect(min, max) => {
                    if !holes.is_empty() {
                        return Err(Error::parse("holes", "rect domains cannot have holes"));
                    }
                    DomainSpec::rect(min, max)?
                }
            }
        }
        other => return Err(Error::parse("mode", format!("expected \"tubular\" or \"raw\", got {other:?}"))),
    };
    Ok(DomainFile { spec, raw })
}

enum Parsed {
    Curve(ClosedCurve),
    Rect(Vec2, Vec2),
}

fn number(obj: &serde_json::Map<String, Value>, key: &str, ctx: &str) -> Result<f64> {
    obj.get(key)
        .and_then(Value::as_f64)
        .ok_or_else(|| Error::parse(format!("{ctx}.{key}"), "expected a number"))
}

fn point(v: Option<&Value>, ctx: &str) -> Result<Vec2> {
    let arr = v
        .and_then(Value::as_array)
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::parse(ctx, "expected a point [x, y]"))?;
    match (arr[0].as_f64(), arr[1].as_f64()) {
        (Some(x), Some(y)) => Ok(Vec2::new(x, y)),
        _ => Err(Error::parse(ctx, "point coordinates must be numbers")),
    }
}

fn numbers(obj: &serde_json::Map<String, Value>, key: &str, ctx: &str) -> Result<Vec<f64>> {
    obj.get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| Error::parse(format!("{ctx}.{key}"), "expected an array of numbers"))?
        .iter()
        .map(|v| v.as_f64().ok_or_else(|| Error::parse(format!("{ctx}.{key}"), "expected an array of numbers")))
        .collect()
}

fn parse_curve(v: &Value, ctx: &str) -> Result<Parsed> {
    let obj = v.as_object().ok_or_else(|| Error::parse(ctx, "expected an object"))?;
    let ty = obj
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::parse(format!("{ctx}.type"), "missing curve type"))?;
    let allowed: &[&str] = match ty {
        "fourier" => &["type", "x_cos", "x_sin", "y_cos", "y_sin"],
        "polyline" => &["type", "points"],
        "circle" => &["type", "center", "radius"],
        "ellipse" => &["type", "center", "a", "b"],
        "rect" => &["type", "min", "max"],
        other => return Err(Error::parse(format!("{ctx}.type"), format!("unknown curve type {other:?}"))),
    };
    if let Some(k) = obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Error::parse(format!("{ctx}.{k}"), "unknown field"));
    }
    let curve = match ty {
        "fourier" => ClosedCurve::fourier(
            numbers(obj, "x_cos", ctx)?,
            numbers(obj, "x_sin", ctx)?,
            numbers(obj, "y_cos", ctx)?,
            numbers(obj, "y_sin", ctx)?,
        ),
        "polyline" => {
            let pts = obj
                .get("points")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::parse(format!("{ctx}.points"), "expected an array of points"))?
                .iter()
                .enumerate()
                .map(|(k, p)| point(Some(p), &format!("{ctx}.points[{k}]")))
                .collect::<Result<Vec<_>>>()?;
            ClosedCurve::polyline(&pts)
        }
        "circle" => ClosedCurve::circle(point(obj.get("center"), &format!("{ctx}.center"))?, number(obj, "radius", ctx)?),
        "ellipse" => ClosedCurve::ellipse(
            point(obj.get("center"), &format!("{ctx}.center"))?,
            number(obj, "a", ctx)?,
            number(obj, "b", ctx)?,
        ),
        _ => {
            return Ok(Parsed::Rect(
                point(obj.get("min"), &format!("{ctx}.min"))?,
                point(obj.get("max"), &format!("{ctx}.max"))?,
            ))
        }
    };
    curve.map(Parsed::Curve).map_err(|e| match e {
        Error::InvalidCurve(m) => Error::InvalidCurve(format!("{ctx}: {m}")),
        other => other,
    })
}
