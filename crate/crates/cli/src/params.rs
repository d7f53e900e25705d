use anyhow::{anyhow, bail, Result};
use linefield::geometry::Vec2;
use linefield::patterns::PatternSpec;

/// Pattern names accepted by `pattern --name`.
pub const PATTERN_NAMES: [&str; 6] = ["tubular", "vortex", "target", "uturn", "grain", "constant"];

fn scalar(key: &str, value: &str) -> Result<f64> {
    let v: f64 = value
        .trim()
        .parse()
        .map_err(|_| anyhow!("parameter {key}: {value:?} is not a number"))?;
    if !v.is_finite() {
        bail!("parameter {key} must be finite");
    }
    Ok(v)
}

fn point(key: &str, value: &str) -> Result<Vec2> {
    let parts: Vec<&str> = value.split(',').collect();
    if parts.len() != 2 {
        bail!("parameter {key}: expected x,y, got {value:?}");
    }
    Ok(Vec2::new(scalar(key, parts[0])?, scalar(key, parts[1])?))
}

/// Builds a pattern from `key=value` pairs; vectors are written `x,y`.
pub fn pattern_from_params(name: &str, params: &[String]) -> Result<PatternSpec> {
    let allowed: &[&str] = match name {
        "tubular" => &[],
        "vortex" => &["center", "alpha"],
        "target" | "uturn" => &["center"],
        "grain" => &["theta_left", "theta_right", "point", "direction"],
        "constant" => &["theta"],
        other => bail!("unknown pattern {other:?}; expected one of {}", PATTERN_NAMES.join(", ")),
    };
    let mut center = Vec2::ZERO;
    let mut alpha = 1.0;
    let mut theta = 0.0;
    let mut theta_left = 0.0;
    let mut theta_right = std::f64::consts::FRAC_PI_3;
    let mut at = Vec2::ZERO;
    let mut direction = Vec2::new(0.0, 1.0);
    for p in params {
        let (key, value) = p
            .split_once('=')
            .ok_or_else(|| anyhow!("parameter {p:?} is not of the form key=value"))?;
        if !allowed.contains(&key) {
            bail!("pattern {name} has no parameter {key:?}");
        }
        match key {
            "center" => center = point(key, value)?,
            "alpha" => alpha = scalar(key, value)?,
            "theta" => theta = scalar(key, value)?,
            "theta_left" => theta_left = scalar(key, value)?,
            "theta_right" => theta_right = scalar(key, value)?,
            "point" => at = point(key, value)?,
            "direction" => direction = point(key, value)?,
            _ => unreachable!("checked against the allowed keys"),
        }
    }
    Ok(match name {
        "tubular" => PatternSpec::Tubular,
        "vortex" => {
            if alpha != 1.0 && alpha != -1.0 {
                bail!("vortex alpha must be 1 or -1, got {alpha}");
            }
            PatternSpec::Vortex { center, alpha }
        }
        "target" => PatternSpec::Target { center },
        "uturn" => PatternSpec::Uturn { center },
        "grain" => PatternSpec::Grain {
            theta_left,
            theta_right,
            point: at,
            direction,
        },
        _ => PatternSpec::Constant { theta },
    })
}
