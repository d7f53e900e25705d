//! Inward normal rays and the class-𝒜 focal-intersection test.

use rayon::prelude::*;
use robust::{orient2d, Coord};

use super::{DomainSpec, Vec2};
use crate::error::{Error, Result};

/// An inward normal segment `{x + t d : t ∈ [0, T]}` traced until it leaves Ω̄.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayResult {
    pub origin: Vec2,
    /// Unit inward direction (−n(x)).
    pub direction: Vec2,
    /// Exit parameter T(x).
    pub t_exit: f64,
    /// `origin + t_exit * direction`, a point of ∂Ω.
    pub hit: Vec2,
    /// Whether another traced segment crosses this one inside Ω.
    pub transversal: bool,
}

/// Traces the segment from boundary point `origin` along `inward` until it exits Ω̄.
///
/// Marches the signed distance with steps of at most `h/4` near the boundary
/// (farther away the step is bounded by the distance to ∂Ω, which cannot skip
/// a crossing) and refines the exit by bisection to 1e-7.
pub fn normal_ray_trace(spec: &DomainSpec, origin: Vec2, inward: Vec2, h: f64) -> Result<RayResult> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("step scale must be positive, got {h}")));
    }
    let dir = inward.normalized();
    let (lo, hi) = spec.bounding_box();
    let pad = 4.0 * h;
    let in_box = |p: Vec2| {
        p.x >= lo.x - pad && p.x <= hi.x + pad && p.y >= lo.y - pad && p.y <= hi.y + pad
    };
    let sd = |t: f64| spec.query(origin + dir * t).signed_distance;
    let min_step = 0.25 * h;

    let mut t = min_step;
    let mut d = sd(t);
    while d >= 0.0 {
        t += min_step;
        if t > 2.0 * h {
            return Err(Error::MalformedDomain(format!(
                "ray from ({:.6}, {:.6}) does not enter the domain",
                origin.x, origin.y
            )));
        }
        d = sd(t);
    }
    loop {
        let step = min_step.max(0.9 * d.abs());
        let next = t + step;
        let p = origin + dir * next;
        if !in_box(p) {
            return Err(Error::MalformedDomain(format!(
                "ray from ({:.6}, {:.6}) left the bounding box without exiting the domain",
                origin.x, origin.y
            )));
        }
        let dn = sd(next);
        if dn >= 0.0 {
            let (mut a, mut b) = (t, next);
            while b - a > 1e-7 {
                let m = 0.5 * (a + b);
                if sd(m) < 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            let t_exit = 0.5 * (a + b);
            return Ok(RayResult {
                origin,
                direction: dir,
                t_exit,
                hit: origin + dir * t_exit,
                transversal: false,
            });
        }
        t = next;
        d = dn;
    }
}

/// Outcome of the class-𝒜 test.
#[derive(Debug, Clone)]
pub struct ClassAResult {
    pub is_class_a: bool,
    /// Boundary points whose normal segments cross inside Ω.
    pub witness: Option<(Vec2, Vec2)>,
    /// Traced rays, component by component.
    pub rays: Vec<RayResult>,
    /// Component index of each ray.
    pub components: Vec<usize>,
}

/// Class-𝒜 test with the default marching scale (bounding-box diagonal / 512).
pub fn class_a_test(spec: &DomainSpec, n: usize) -> Result<ClassAResult> {
    let (lo, hi) = spec.bounding_box();
    class_a_test_with_step(spec, n, (hi - lo).norm() / 512.0)
}

/// Traces `n` inward normals per boundary component and looks for two
/// distinct normal segments that cross at an interior point of Ω.
///
/// The witness is the crossing pair with the smallest index offset along a
/// component (nearby boundary points first), then pairs across components.
pub fn class_a_test_with_step(spec: &DomainSpec, n: usize, h: f64) -> Result<ClassAResult> {
    if n < 16 {
        return Err(Error::InvalidArgument(format!(
            "class-A test needs at least 16 samples, got {n}"
        )));
    }
    let mut rays = Vec::new();
    let mut comps = Vec::new();
    for j in 0..spec.boundary_count() {
        let samples = spec.boundary_samples(j, n, 0.0);
        let traced: Vec<RayResult> = samples
            .par_iter()
            .map(|b| normal_ray_trace(spec, b.point, -b.normal, h))
            .collect::<Result<_>>()?;
        comps.extend(std::iter::repeat(j).take(traced.len()));
        rays.extend(traced);
    }

    let (lo, hi) = spec.bounding_box();
    let scale = (hi - lo).norm();
    let line_tol = 1e-6 * scale;
    let interior_tol = 1e-6 * scale;

    let crosses = |a: &RayResult, b: &RayResult| -> bool {
        if same_line(a, b, line_tol) {
            return false;
        }
        match proper_intersection(a.origin, a.hit, b.origin, b.hit) {
            Some(q) => spec.query(q).signed_distance < -interior_tol,
            None => false,
        }
    };

    // pair order: same component by increasing cyclic offset, then across components
    let mut order: Vec<(usize, usize)> = Vec::new();
    let ncomp = spec.boundary_count();
    for d in 1..=n / 2 {
        for c in 0..ncomp {
            let base = c * n;
            for i in 0..n {
                let k = (i + d) % n;
                if d * 2 == n && k < i {
                    continue;
                }
                order.push((base + i, base + k));
            }
        }
    }
    for c1 in 0..ncomp {
        for c2 in c1 + 1..ncomp {
            for i in 0..n {
                for k in 0..n {
                    order.push((c1 * n + i, c2 * n + k));
                }
            }
        }
    }
    let hits: Vec<bool> = order
        .par_iter()
        .map(|&(i, k)| crosses(&rays[i], &rays[k]))
        .collect();
    let mut witness = None;
    for (&(i, k), &hit) in order.iter().zip(&hits) {
        if hit {
            rays[i].transversal = true;
            rays[k].transversal = true;
            if witness.is_none() {
                witness = Some((rays[i].origin, rays[k].origin));
            }
        }
    }
    Ok(ClassAResult {
        is_class_a: witness.is_some(),
        witness,
        rays,
        components: comps,
    })
}

fn same_line(a: &RayResult, b: &RayResult, tol: f64) -> bool {
    let dist = |p: Vec2| (p - a.origin).cross(a.direction).abs();
    dist(b.origin) < tol && dist(b.hit) < tol
}

fn coord(p: Vec2) -> Coord<f64> {
    Coord { x: p.x, y: p.y }
}

/// Intersection point of segments `ab` and `cd` when they cross at a single
/// point interior to both (exact orientation predicates).
fn proper_intersection(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> Option<Vec2> {
    let o1 = orient2d(coord(a), coord(b), coord(c));
    let o2 = orient2d(coord(a), coord(b), coord(d));
    let o3 = orient2d(coord(c), coord(d), coord(a));
    let o4 = orient2d(coord(c), coord(d), coord(b));
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        let r = b - a;
        let s = d - c;
        let t = (c - a).cross(s) / r.cross(s);
        Some(a + r * t)
    } else {
        None
    }
}
