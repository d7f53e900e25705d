//! Closed planar curves with an arclength parameterization.
//!
//! A curve is described natively either by a truncated Fourier series on
//! `[0, 2π)` or by a periodic cubic spline through polyline vertices. The
//! native parameter is converted to arclength through a cumulative table
//! built with 8-point Gauss–Legendre quadrature, and all derivative
//! quantities (tangent, normal, curvature) come from analytic derivatives of
//! the native representation.

use std::f64::consts::TAU;
use std::fmt;

use rstar::primitives::GeomWithData;
use rstar::RTree;
use serde::{Deserialize, Serialize};

use super::spline::PeriodicSpline;
use super::Vec2;
use crate::error::{Error, Result};

const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

const MIN_TABLE_INTERVALS: usize = 1024;
const MIN_SPEED: f64 = 1e-12;

/// Truncated Fourier series `x(u) = Σ xc[k] cos(ku) + xs[k] sin(ku)` (same for y).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierCurve {
    pub x_cos: Vec<f64>,
    pub x_sin: Vec<f64>,
    pub y_cos: Vec<f64>,
    pub y_sin: Vec<f64>,
}

impl FourierCurve {
    fn terms(&self) -> usize {
        self.x_cos
            .len()
            .max(self.x_sin.len())
            .max(self.y_cos.len())
            .max(self.y_sin.len())
    }

    fn eval(&self, u: f64) -> (Vec2, Vec2, Vec2) {
        let mut p = Vec2::ZERO;
        let mut d1 = Vec2::ZERO;
        let mut d2 = Vec2::ZERO;
        let coef = |v: &[f64], k: usize| v.get(k).copied().unwrap_or(0.0);
        for k in 0..self.terms() {
            let kf = k as f64;
            let (s, c) = (kf * u).sin_cos();
            let (xc, xs) = (coef(&self.x_cos, k), coef(&self.x_sin, k));
            let (yc, ys) = (coef(&self.y_cos, k), coef(&self.y_sin, k));
            p += Vec2::new(xc * c + xs * s, yc * c + ys * s);
            d1 += Vec2::new(-xc * s + xs * c, -yc * s + ys * c) * kf;
            d2 -= Vec2::new(xc * c + xs * s, yc * c + ys * s) * (kf * kf);
        }
        (p, d1, d2)
    }

    fn transformed(&self, angle: f64, translation: Vec2) -> Self {
        let (s, c) = angle.sin_cos();
        let n = self.terms();
        let get = |v: &[f64], k: usize| v.get(k).copied().unwrap_or(0.0);
        let mut out = FourierCurve {
            x_cos: vec![0.0; n],
            x_sin: vec![0.0; n],
            y_cos: vec![0.0; n],
            y_sin: vec![0.0; n],
        };
        for k in 0..n {
            let (xc, xs) = (get(&self.x_cos, k), get(&self.x_sin, k));
            let (yc, ys) = (get(&self.y_cos, k), get(&self.y_sin, k));
            out.x_cos[k] = c * xc - s * yc;
            out.y_cos[k] = s * xc + c * yc;
            out.x_sin[k] = c * xs - s * ys;
            out.y_sin[k] = s * xs + c * ys;
        }
        if n == 0 {
            out.x_cos.push(0.0);
            out.y_cos.push(0.0);
        }
        out.x_cos[0] += translation.x;
        out.y_cos[0] += translation.y;
        out
    }
}

/// A closed curve in its native (not necessarily arclength) parameter.
#[derive(Debug, Clone)]
pub enum ParamCurve {
    Fourier(FourierCurve),
    Spline(PeriodicSpline),
}

impl ParamCurve {
    pub fn fourier(x_cos: Vec<f64>, x_sin: Vec<f64>, y_cos: Vec<f64>, y_sin: Vec<f64>) -> Self {
        ParamCurve::Fourier(FourierCurve {
            x_cos,
            x_sin,
            y_cos,
            y_sin,
        })
    }

    pub fn polyline(points: &[Vec2]) -> Result<Self> {
        Ok(ParamCurve::Spline(PeriodicSpline::new(points)?))
    }

    /// Circle parameterized by angle, counterclockwise.
    pub fn circle(center: Vec2, radius: f64) -> Self {
        Self::ellipse(center, radius, radius)
    }

    pub fn ellipse(center: Vec2, a: f64, b: f64) -> Self {
        Self::fourier(vec![center.x, a], vec![0.0, 0.0], vec![center.y, 0.0], vec![0.0, b])
    }

    pub fn period(&self) -> f64 {
        match self {
            ParamCurve::Fourier(_) => TAU,
            ParamCurve::Spline(s) => s.period(),
        }
    }

    /// Position, first and second derivative with respect to the native parameter.
    pub fn eval(&self, u: f64) -> (Vec2, Vec2, Vec2) {
        match self {
            ParamCurve::Fourier(f) => f.eval(u),
            ParamCurve::Spline(s) => s.eval(u),
        }
    }

    /// Rigid motion: rotation by `angle` about the origin, then translation.
    pub fn transformed(&self, angle: f64, translation: Vec2) -> Result<Self> {
        Ok(match self {
            ParamCurve::Fourier(f) => ParamCurve::Fourier(f.transformed(angle, translation)),
            ParamCurve::Spline(s) => {
                ParamCurve::Spline(s.map_points(|p| p.rotated(angle) + translation)?)
            }
        })
    }

    fn table_knots(&self) -> Vec<f64> {
        match self {
            ParamCurve::Fourier(f) => {
                let k = MIN_TABLE_INTERVALS.max(32 * f.terms());
                (0..=k).map(|i| TAU * i as f64 / k as f64).collect()
            }
            ParamCurve::Spline(s) => {
                // subdivide spline segments so quadrature never straddles a knot
                let n = s.segment_count();
                let sub = MIN_TABLE_INTERVALS.div_ceil(n).max(2);
                let mut knots = Vec::with_capacity(n * sub + 1);
                let mut t = 0.0;
                let mut last = 0.0;
                for i in 0..n {
                    let next = if i + 1 == n {
                        s.period()
                    } else {
                        t + s.points()[i].distance(s.points()[i + 1])
                    };
                    for j in 0..sub {
                        knots.push(t + (next - t) * j as f64 / sub as f64);
                    }
                    last = next;
                    t = next;
                }
                knots.push(last);
                knots
            }
        }
    }
}

/// Evaluation of a curve at an arclength position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub point: Vec2,
    pub tangent: Vec2,
    /// Tangent rotated by −90°; outward for counterclockwise curves.
    pub normal: Vec2,
    pub curvature: f64,
}

/// Closest point on a curve to a query point.
#[derive(Debug, Clone, Copy)]
pub struct Foot {
    /// Native parameter of the foot point.
    pub u: f64,
    pub point: Vec2,
    pub tangent: Vec2,
    pub normal: Vec2,
    /// `(x - point) · normal`: positive on the outward side.
    pub signed_distance: f64,
}

impl Foot {
    pub fn distance(&self) -> f64 {
        self.signed_distance.abs()
    }
}

type Sample = GeomWithData<[f64; 2], usize>;

/// Counterclockwise closed C² curve with an arclength table.
#[derive(Clone)]
pub struct ClosedCurve {
    param: ParamCurve,
    reversed: bool,
    knots_u: Vec<f64>,
    cum_s: Vec<f64>,
    length: f64,
    max_abs_curvature: f64,
    samples: Vec<Vec2>,
    max_spacing: f64,
    tree: RTree<Sample>,
}

impl fmt::Debug for ClosedCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClosedCurve")
            .field("param", &self.param)
            .field("reversed", &self.reversed)
            .field("length", &self.length)
            .field("max_abs_curvature", &self.max_abs_curvature)
            .finish()
    }
}

/// Builds the arclength parameterization of a regular closed curve.
///
/// The output is oriented counterclockwise (detected through the signed
/// area and reversed when needed).
pub fn arclength_reparam(param: ParamCurve) -> Result<ClosedCurve> {
    let period = param.period();
    if !(period.is_finite() && period > 0.0) {
        return Err(Error::InvalidCurve("non-positive parameter period".into()));
    }
    let base_knots = param.table_knots();
    let area: f64 = {
        let pts: Vec<Vec2> = base_knots[..base_knots.len() - 1]
            .iter()
            .map(|&u| param.eval(u).0)
            .collect();
        shoelace(&pts)
    };
    if area.abs() < 1e-14 {
        return Err(Error::InvalidCurve("curve encloses zero area".into()));
    }
    let reversed = area < 0.0;
    let knots_u: Vec<f64> = if reversed {
        base_knots.iter().rev().map(|&u| period - u).collect()
    } else {
        base_knots
    };

    let mut curve = ClosedCurve {
        param,
        reversed,
        knots_u,
        cum_s: Vec::new(),
        length: 0.0,
        max_abs_curvature: 0.0,
        samples: Vec::new(),
        max_spacing: 0.0,
        tree: RTree::new(),
    };

    let intervals = curve.knots_u.len() - 1;
    let mut cum_s = Vec::with_capacity(intervals + 1);
    cum_s.push(0.0);
    let mut max_k: f64 = 0.0;
    for i in 0..intervals {
        let (a, b) = (curve.knots_u[i], curve.knots_u[i + 1]);
        let (seg, seg_min_speed) = curve.integrate_speed(a, b);
        if seg_min_speed < MIN_SPEED {
            return Err(Error::InvalidCurve(format!(
                "curve is not regular near parameter {a:.6} (|γ'| < {MIN_SPEED:e})"
            )));
        }
        cum_s.push(cum_s[i] + seg);
        for j in 0..4 {
            let u = a + (b - a) * j as f64 / 4.0;
            let (_, d1, d2) = curve.native(u);
            let sp = d1.norm();
            if sp < MIN_SPEED {
                return Err(Error::InvalidCurve(format!(
                    "cusp detected at parameter {u:.6}"
                )));
            }
            max_k = max_k.max((d1.cross(d2) / (sp * sp * sp)).abs());
        }
    }
    curve.length = cum_s[intervals];
    curve.cum_s = cum_s;
    curve.max_abs_curvature = max_k;
    curve.samples = curve.knots_u[..intervals]
        .iter()
        .map(|&u| curve.native(u).0)
        .collect();
    curve.max_spacing = (0..intervals)
        .map(|i| curve.samples[i].distance(curve.samples[(i + 1) % intervals]))
        .fold(0.0, f64::max);
    curve.tree = RTree::bulk_load(
        curve
            .samples
            .iter()
            .enumerate()
            .map(|(i, p)| GeomWithData::new(p.to_array(), i))
            .collect(),
    );
    Ok(curve)
}

fn shoelace(pts: &[Vec2]) -> f64 {
    let n = pts.len();
    0.5 * (0..n).map(|i| pts[i].cross(pts[(i + 1) % n])).sum::<f64>()
}

impl ClosedCurve {
    pub fn fourier(x_cos: Vec<f64>, x_sin: Vec<f64>, y_cos: Vec<f64>, y_sin: Vec<f64>) -> Result<Self> {
        arclength_reparam(ParamCurve::fourier(x_cos, x_sin, y_cos, y_sin))
    }

    pub fn polyline(points: &[Vec2]) -> Result<Self> {
        arclength_reparam(ParamCurve::polyline(points)?)
    }

    pub fn circle(center: Vec2, radius: f64) -> Result<Self> {
        arclength_reparam(ParamCurve::circle(center, radius))
    }

    pub fn ellipse(center: Vec2, a: f64, b: f64) -> Result<Self> {
        arclength_reparam(ParamCurve::ellipse(center, a, b))
    }

    pub fn param(&self) -> &ParamCurve {
        &self.param
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn max_abs_curvature(&self) -> f64 {
        self.max_abs_curvature
    }

    /// Enclosed area (positive: the curve is stored counterclockwise).
    pub fn signed_area(&self) -> f64 {
        shoelace(&self.samples)
    }

    pub fn transformed(&self, angle: f64, translation: Vec2) -> Result<Self> {
        arclength_reparam(self.param.transformed(angle, translation)?)
    }

    /// Bounding box of the sample polygon, padded by the maximal sagitta.
    pub fn bounds(&self) -> (Vec2, Vec2) {
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.samples {
            lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let pad = self.max_spacing * self.max_spacing * self.max_abs_curvature + 1e-12;
        (lo - Vec2::new(pad, pad), hi + Vec2::new(pad, pad))
    }

    /// Native evaluation with orientation applied.
    fn native(&self, u: f64) -> (Vec2, Vec2, Vec2) {
        if self.reversed {
            let (p, d1, d2) = self.param.eval(self.param.period() - u);
            (p, -d1, d2)
        } else {
            self.param.eval(u)
        }
    }

    fn point_at_native(&self, u: f64) -> CurvePoint {
        let (p, d1, d2) = self.native(u);
        let speed = d1.norm();
        let t = d1 / speed;
        CurvePoint {
            point: p,
            tangent: t,
            normal: t.perp_cw(),
            curvature: d1.cross(d2) / (speed * speed * speed),
        }
    }

    fn integrate_speed(&self, a: f64, b: f64) -> (f64, f64) {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = 0.0;
        let mut min_speed = f64::INFINITY;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            for u in [mid - half * x, mid + half * x] {
                let sp = self.native(u).1.norm();
                min_speed = min_speed.min(sp);
                acc += w * sp;
            }
        }
        (acc * half, min_speed)
    }

    /// Native parameter corresponding to arclength `s` (wrapped to `[0, L)`).
    pub fn native_param(&self, s: f64) -> f64 {
        let s = s.rem_euclid(self.length);
        let n = self.cum_s.len() - 1;
        let i = match self.cum_s.binary_search_by(|c| c.partial_cmp(&s).unwrap()) {
            Ok(i) => i.min(n - 1),
            Err(i) => i.saturating_sub(1).min(n - 1),
        };
        let (ua, ub) = (self.knots_u[i], self.knots_u[i + 1]);
        let (sa, sb) = (self.cum_s[i], self.cum_s[i + 1]);
        let mut u = ua + (s - sa) / (sb - sa) * (ub - ua);
        for _ in 0..30 {
            let f = sa + self.integrate_speed(ua, u).0 - s;
            let sp = self.native(u).1.norm();
            let next = (u - f / sp).clamp(ua, ub);
            let done = (next - u).abs() <= 1e-15 * (1.0 + u.abs());
            u = next;
            if done {
                break;
            }
        }
        u
    }

    /// Arclength position of a native parameter value.
    pub fn arclength_of(&self, u: f64) -> f64 {
        let period = self.param.period();
        let u = u.rem_euclid(period);
        let n = self.knots_u.len() - 1;
        let i = match self.knots_u.binary_search_by(|c| c.partial_cmp(&u).unwrap()) {
            Ok(i) => i.min(n - 1),
            Err(i) => i.saturating_sub(1).min(n - 1),
        };
        self.cum_s[i] + self.integrate_speed(self.knots_u[i], u).0
    }

    /// Point, unit tangent, outward normal and signed curvature at arclength `s`.
    pub fn eval(&self, s: f64) -> CurvePoint {
        self.point_at_native(self.native_param(s))
    }

    /// `n` points at uniform arclength spacing starting at `offset`.
    pub fn sample_uniform(&self, n: usize, offset: f64) -> Vec<CurvePoint> {
        (0..n)
            .map(|k| self.eval(offset + self.length * k as f64 / n as f64))
            .collect()
    }

    fn knot_unwrapped(&self, i: isize) -> f64 {
        let k = self.samples.len() as isize;
        let wraps = i.div_euclid(k);
        self.knots_u[i.rem_euclid(k) as usize] + wraps as f64 * self.param.period()
    }

    /// Local minimizer of the distance to `x`, starting from sample `k`.
    fn refine(&self, x: Vec2, k: usize) -> Foot {
        let g = |u: f64| {
            let (p, d1, _) = self.native(u);
            (p - x).dot(d1)
        };
        let k = k as isize;
        let (mut ilo, mut ihi) = (k - 1, k + 1);
        let mut lo = self.knot_unwrapped(ilo);
        let mut hi = self.knot_unwrapped(ihi);
        let (mut glo, mut ghi) = (g(lo), g(hi));
        let mut steps = 0;
        while !(glo <= 0.0 && ghi >= 0.0) && steps < self.samples.len() {
            if glo > 0.0 {
                ihi = ilo;
                hi = lo;
                ghi = glo;
                ilo -= 1;
                lo = self.knot_unwrapped(ilo);
                glo = g(lo);
            } else {
                ilo = ihi;
                lo = hi;
                glo = ghi;
                ihi += 1;
                hi = self.knot_unwrapped(ihi);
                ghi = g(hi);
            }
            steps += 1;
        }
        let mut u = self.knot_unwrapped(k).clamp(lo, hi);
        if glo <= 0.0 && ghi >= 0.0 {
            for _ in 0..100 {
                let (p, d1, d2) = self.native(u);
                let gu = (p - x).dot(d1);
                if gu == 0.0 {
                    break;
                }
                if gu < 0.0 {
                    lo = u;
                } else {
                    hi = u;
                }
                let gp = d1.norm_sq() + (p - x).dot(d2);
                let step = gu / gp;
                if gp > 0.0 && step.abs() <= 1e-13 * (1.0 + u.abs()) {
                    u -= step;
                    break;
                }
                let mut next = u - step;
                if !(gp > 0.0 && next > lo && next < hi) {
                    next = 0.5 * (lo + hi);
                }
                u = next;
                if hi - lo <= 1e-15 {
                    break;
                }
            }
        }
        let u = u.rem_euclid(self.param.period());
        let cp = self.point_at_native(u);
        Foot {
            u,
            point: cp.point,
            tangent: cp.tangent,
            normal: cp.normal,
            signed_distance: (x - cp.point).dot(cp.normal),
        }
    }

    /// Closest point on the curve (global search over samples, then local refinement).
    pub fn closest_point(&self, x: Vec2) -> Foot {
        let k = self
            .tree
            .nearest_neighbor(x.to_array())
            .map(|s| s.data)
            .unwrap_or(0);
        let foot = self.refine(x, k);
        // the sample walk may settle on a far local minimum; the nearest sample bounds it
        if foot.point.distance(x) > self.samples[k].distance(x) + 1e-12 {
            let cp = self.point_at_native(self.knots_u[k]);
            return Foot {
                u: self.knots_u[k],
                point: cp.point,
                tangent: cp.tangent,
                normal: cp.normal,
                signed_distance: (x - cp.point).dot(cp.normal),
            };
        }
        foot
    }

    /// Closest point, rejecting queries with two distinct minimizers within `tol`.
    pub fn closest_point_unique(&self, x: Vec2, tol: f64) -> Result<Foot> {
        let Some(nearest) = self.tree.nearest_neighbor(x.to_array()) else {
            return Err(Error::InvalidCurve("empty curve".into()));
        };
        let d0 = self.samples[nearest.data].distance(x);
        let r = d0 + self.max_spacing;
        let idx: Vec<usize> = self
            .tree
            .locate_within_distance(x.to_array(), r * r)
            .map(|s| s.data)
            .collect();
        let n = self.samples.len();
        let dist = |i: usize| self.samples[i].distance(x);
        let mut candidates: Vec<usize> = Vec::new();
        for &i in &idx {
            let (prev, next) = ((i + n - 1) % n, (i + 1) % n);
            if dist(i) <= dist(prev) && dist(i) <= dist(next) {
                candidates.push(i);
            }
        }
        if candidates.is_empty() {
            candidates.push(nearest.data);
        }
        candidates.sort_by(|&a, &b| dist(a).partial_cmp(&dist(b)).unwrap());
        candidates.truncate(8);
        let mut feet: Vec<Foot> = candidates.iter().map(|&i| self.refine(x, i)).collect();
        feet.sort_by(|a, b| a.distance().partial_cmp(&b.distance()).unwrap());
        let a = feet[0];
        for b in &feet[1..] {
            if (b.distance() - a.distance()).abs() < tol
                && a.point.distance(b.point) > 2.0 * self.max_spacing
            {
                return Err(Error::NearestPointAmbiguity {
                    x: x.x,
                    y: x.y,
                    d1: a.distance(),
                    d2: b.distance(),
                });
            }
        }
        Ok(feet[0])
    }
}
