use super::{ClosedCurve, Vec2};
use crate::error::{Error, Result};

/// How a domain was specified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainMode {
    /// `Ω = Γ + B(0, δ)` built from a core curve and a half-width.
    Tubular,
    /// Ω given directly by its boundary.
    Raw,
}

/// A planar domain.
#[derive(Debug, Clone)]
pub enum DomainSpec {
    /// Points within `delta` of the closed core curve.
    Tubular { core: ClosedCurve, delta: f64 },
    /// Interior of `outer` minus the interiors of `holes`.
    Raw {
        outer: ClosedCurve,
        holes: Vec<ClosedCurve>,
    },
    /// Axis-aligned rectangle (raw mode; used for fixtures with straight edges).
    Rect { min: Vec2, max: Vec2 },
}

/// Result of the curvature check on a tubular specification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureReport {
    pub max_curvature: f64,
    pub delta: f64,
    /// `delta * max_curvature`; must be strictly below 1.
    pub product: f64,
}

/// A point on ∂Ω with the outward unit normal of Ω and the traversal tangent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySample {
    pub point: Vec2,
    pub normal: Vec2,
    pub tangent: Vec2,
}

/// Signed distance with the nearest boundary point.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryQuery {
    /// Negative inside Ω.
    pub signed_distance: f64,
    pub point: Vec2,
    /// Outward normal of Ω at `point`.
    pub normal: Vec2,
}

/// Checks `0 < δ < 1/max|κ|` for a tubular specification.
pub fn validate_tubular_spec(spec: &DomainSpec) -> Result<CurvatureReport> {
    let DomainSpec::Tubular { core, delta } = spec else {
        return Err(Error::InvalidArgument(
            "curvature validation requires a tubular specification".into(),
        ));
    };
    let delta = *delta;
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tube half-width must be positive, got {delta}"
        )));
    }
    let max_curvature = core.max_abs_curvature();
    let product = delta * max_curvature;
    if product >= 1.0 {
        return Err(Error::TubeSelfOverlap {
            delta,
            max_curvature,
            product,
        });
    }
    Ok(CurvatureReport {
        max_curvature,
        delta,
        product,
    })
}

/// Signed distance to ∂Ω, negative inside.
pub fn signed_distance(spec: &DomainSpec, p: Vec2) -> f64 {
    spec.query(p).signed_distance
}

impl DomainSpec {
    /// Tubular domain, validated.
    pub fn tubular(core: ClosedCurve, delta: f64) -> Result<Self> {
        let spec = DomainSpec::Tubular { core, delta };
        validate_tubular_spec(&spec)?;
        Ok(spec)
    }

    pub fn raw(outer: ClosedCurve, holes: Vec<ClosedCurve>) -> Self {
        DomainSpec::Raw { outer, holes }
    }

    pub fn rect(min: Vec2, max: Vec2) -> Result<Self> {
        if !(max.x > min.x && max.y > min.y) {
            return Err(Error::InvalidArgument("empty rectangle".into()));
        }
        Ok(DomainSpec::Rect { min, max })
    }

    pub fn mode(&self) -> DomainMode {
        match self {
            DomainSpec::Tubular { .. } => DomainMode::Tubular,
            _ => DomainMode::Raw,
        }
    }

    /// Tight bounding box of Ω.
    pub fn bounding_box(&self) -> (Vec2, Vec2) {
        match self {
            DomainSpec::Tubular { core, delta } => {
                let (lo, hi) = core.bounds();
                let d = Vec2::new(*delta, *delta);
                (lo - d, hi + d)
            }
            DomainSpec::Raw { outer, .. } => outer.bounds(),
            DomainSpec::Rect { min, max } => (*min, *max),
        }
    }

    /// Number of connected components of ∂Ω.
    pub fn boundary_count(&self) -> usize {
        match self {
            DomainSpec::Tubular { .. } => 2,
            DomainSpec::Raw { holes, .. } => 1 + holes.len(),
            DomainSpec::Rect { .. } => 1,
        }
    }

    /// Approximate length of boundary component `j` (component 0 is the outer one).
    pub fn boundary_length(&self, j: usize) -> f64 {
        match self {
            DomainSpec::Tubular { core, delta } => {
                // ∫(1 ± κδ) ds with ∫κ ds = 2π for a simple counterclockwise curve
                let turn = std::f64::consts::TAU * delta;
                if j == 0 {
                    core.length() + turn
                } else {
                    core.length() - turn
                }
            }
            DomainSpec::Raw { outer, holes } => {
                if j == 0 {
                    outer.length()
                } else {
                    holes[j - 1].length()
                }
            }
            DomainSpec::Rect { min, max } => 2.0 * ((max.x - min.x) + (max.y - min.y)),
        }
    }

    /// `n` ordered samples of boundary component `j`, shifted by `offset` (fraction of a turn).
    pub fn boundary_samples(&self, j: usize, n: usize, offset: f64) -> Vec<BoundarySample> {
        match self {
            DomainSpec::Tubular { core, delta } => {
                let sign = if j == 0 { 1.0 } else { -1.0 };
                core.sample_uniform(n, offset * core.length())
                    .into_iter()
                    .map(|c| BoundarySample {
                        point: c.point + c.normal * (sign * delta),
                        normal: c.normal * sign,
                        tangent: c.tangent,
                    })
                    .collect()
            }
            DomainSpec::Raw { outer, holes } => {
                let (curve, sign) = if j == 0 {
                    (outer, 1.0)
                } else {
                    (&holes[j - 1], -1.0)
                };
                curve
                    .sample_uniform(n, offset * curve.length())
                    .into_iter()
                    .map(|c| BoundarySample {
                        point: c.point,
                        normal: c.normal * sign,
                        tangent: c.tangent,
                    })
                    .collect()
            }
            DomainSpec::Rect { min, max } => {
                let (w, h) = (max.x - min.x, max.y - min.y);
                let per = 2.0 * (w + h);
                (0..n)
                    .map(|k| {
                        let s = ((k as f64 + 0.5) / n as f64 + offset).rem_euclid(1.0) * per;
                        if s < w {
                            BoundarySample {
                                point: Vec2::new(min.x + s, min.y),
                                normal: Vec2::new(0.0, -1.0),
                                tangent: Vec2::new(1.0, 0.0),
                            }
                        } else if s < w + h {
                            BoundarySample {
                                point: Vec2::new(max.x, min.y + (s - w)),
                                normal: Vec2::new(1.0, 0.0),
                                tangent: Vec2::new(0.0, 1.0),
                            }
                        } else if s < 2.0 * w + h {
                            BoundarySample {
                                point: Vec2::new(max.x - (s - w - h), max.y),
                                normal: Vec2::new(0.0, 1.0),
                                tangent: Vec2::new(-1.0, 0.0),
                            }
                        } else {
                            BoundarySample {
                                point: Vec2::new(min.x, max.y - (s - 2.0 * w - h)),
                                normal: Vec2::new(-1.0, 0.0),
                                tangent: Vec2::new(0.0, -1.0),
                            }
                        }
                    })
                    .collect()
            }
        }
    }

    /// Signed distance and nearest boundary point.
    pub fn query(&self, p: Vec2) -> BoundaryQuery {
        match self {
            DomainSpec::Tubular { core, delta } => {
                let foot = core.closest_point(p);
                let side = if foot.signed_distance >= 0.0 { 1.0 } else { -1.0 };
                BoundaryQuery {
                    signed_distance: foot.distance() - delta,
                    point: foot.point + foot.normal * (side * delta),
                    normal: foot.normal * side,
                }
            }
            DomainSpec::Raw { outer, holes } => {
                let foot = outer.closest_point(p);
                let mut best = BoundaryQuery {
                    signed_distance: foot.signed_distance,
                    point: foot.point,
                    normal: foot.normal,
                };
                for hole in holes {
                    let f = hole.closest_point(p);
                    if f.distance() < best.signed_distance.abs() {
                        best = BoundaryQuery {
                            signed_distance: -f.signed_distance,
                            point: f.point,
                            normal: -f.normal,
                        };
                    }
                }
                best
            }
            DomainSpec::Rect { min, max } => rect_query(*min, *max, p),
        }
    }

    /// Applies a rigid motion (rotation about the origin, then translation).
    pub fn transformed(&self, angle: f64, translation: Vec2) -> Result<Self> {
        Ok(match self {
            DomainSpec::Tubular { core, delta } => DomainSpec::Tubular {
                core: core.transformed(angle, translation)?,
                delta: *delta,
            },
            DomainSpec::Raw { outer, holes } => DomainSpec::Raw {
                outer: outer.transformed(angle, translation)?,
                holes: holes
                    .iter()
                    .map(|h| h.transformed(angle, translation))
                    .collect::<Result<_>>()?,
            },
            DomainSpec::Rect { min, max } => {
                if angle != 0.0 {
                    return Err(Error::InvalidArgument(
                        "rectangles only support translations".into(),
                    ));
                }
                DomainSpec::Rect {
                    min: *min + translation,
                    max: *max + translation,
                }
            }
        })
    }
}

fn rect_query(min: Vec2, max: Vec2, p: Vec2) -> BoundaryQuery {
    let inside = p.x > min.x && p.x < max.x && p.y > min.y && p.y < max.y;
    if inside {
        let faces = [
            (p.x - min.x, Vec2::new(min.x, p.y), Vec2::new(-1.0, 0.0)),
            (max.x - p.x, Vec2::new(max.x, p.y), Vec2::new(1.0, 0.0)),
            (p.y - min.y, Vec2::new(p.x, min.y), Vec2::new(0.0, -1.0)),
            (max.y - p.y, Vec2::new(p.x, max.y), Vec2::new(0.0, 1.0)),
        ];
        let (d, point, normal) = faces
            .into_iter()
            .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
            .unwrap();
        BoundaryQuery {
            signed_distance: -d,
            point,
            normal,
        }
    } else {
        let q = Vec2::new(p.x.clamp(min.x, max.x), p.y.clamp(min.y, max.y));
        let d = p.distance(q);
        let normal = if d > 0.0 {
            (p - q) / d
        } else if p.x <= min.x {
            Vec2::new(-1.0, 0.0)
        } else if p.x >= max.x {
            Vec2::new(1.0, 0.0)
        } else if p.y <= min.y {
            Vec2::new(0.0, -1.0)
        } else {
            Vec2::new(0.0, 1.0)
        };
        BoundaryQuery {
            signed_distance: d,
            point: q,
            normal,
        }
    }
}
