use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{normal_ray_trace, validate_tubular_spec, DomainSpec, Vec2};
use crate::grid::RasterGrid;
use crate::patterns::LineField;

use super::lift::{lift_from, LiftSeed};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub seeds: usize,
    /// Largest angular distance mod π between any two constructed fields.
    pub max_distance: f64,
    pub pairwise: Vec<f64>,
    /// Whether every constructed field lifted from its seed.
    pub all_orientable: bool,
}

/// Builds the solution from `k` seeds and compares the results.
///
/// Seed `j` shifts the outer boundary samples by `j/k` of their spacing
/// (spacing `h/4`) and orients the boundary tangent by `(−1)ʲ`. Tangents are
/// carried inward along the normal rays, deposited at the nearest cell and
/// spread to the remaining cells breadth-first.
pub fn uniqueness_probe(spec: &DomainSpec, grid: &RasterGrid, k: usize) -> Result<UniquenessReport> {
    validate_tubular_spec(spec)?;
    if k < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 seeds, got {k}")));
    }
    let h = grid.h();
    let n = ((spec.boundary_length(0) / (0.25 * h)).ceil() as usize).max(64);
    let mut fields = Vec::with_capacity(k);
    let mut all_orientable = true;
    for j in 0..k {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let samples = spec.boundary_samples(0, n, j as f64 / (k * n) as f64);
        let rays = samples
            .par_iter()
            .map(|b| normal_ray_trace(spec, b.point, -b.normal, h).map(|r| (r, b.tangent * sign)))
            .collect::<Result<Vec<_>>>()?;
        let field = deposit(grid, &rays.iter().map(|(r, t)| (r.origin, r.direction, r.t_exit, *t)).collect::<Vec<_>>());
        let seed_cell = grid
            .lattice()
            .cell_containing(rays[0].0.origin + rays[0].0.direction * h)
            .filter(|&c| field.is_defined(c));
        let seeds: Vec<LiftSeed> = seed_cell
            .map(|cell| {
                let s = if Vec2::from_angle(field.theta(cell)).dot(rays[0].1) >= 0.0 { 1.0 } else { -1.0 };
                LiftSeed { cell, sign: s }
            })
            .into_iter()
            .collect();
        all_orientable &= lift_from(&field, &seeds).map(|r| r.is_orientable()).unwrap_or(false);
        fields.push(field);
    }
    let mut pairwise = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            pairwise.push(fields[a].max_angle_distance(&fields[b])?);
        }
    }
    Ok(UniquenessReport {
        seeds: k,
        max_distance: pairwise.iter().copied().fold(0.0, f64::max),
        pairwise,
        all_orientable,
    })
}

/// Line field from oriented tangents carried along rays `(origin, direction, length, tangent)`.
fn deposit(grid: &RasterGrid, rays: &[(Vec2, Vec2, f64, Vec2)]) -> LineField {
    let lat = *grid.lattice();
    let h = lat.h;
    let mut best = vec![f64::INFINITY; lat.len()];
    let mut theta = vec![0.0; lat.len()];
    let step = 0.25 * h;
    for &(o, d, t_exit, tangent) in rays {
        let steps = (t_exit / step).floor() as usize;
        let angle = tangent.angle();
        for s in 0..=steps {
            let p = o + d * (s as f64 * step);
            let Some(c) = lat.cell_containing(p) else { continue };
            if !grid.is_inside(c) {
                continue;
            }
            let dist = p.distance(lat.center(c));
            if dist < best[c] {
                best[c] = dist;
                theta[c] = angle;
            }
        }
    }
    let mut defined: Vec<bool> = best.iter().map(|b| b.is_finite()).collect();
    let mut queue: VecDeque<usize> = (0..lat.len()).filter(|&i| defined[i]).collect();
    while let Some(c) = queue.pop_front() {
        for nb in lat.neighbors4(c) {
            if grid.is_inside(nb) && !defined[nb] {
                defined[nb] = true;
                theta[nb] = theta[c];
                queue.push_back(nb);
            }
        }
    }
    LineField::new(lat, defined, theta).expect("sizes match the lattice")
}

impl UniquenessReport {
    pub fn agrees_within(&self, tol: f64) -> bool {
        self.max_distance <= tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ClosedCurve;
    use crate::grid::rasterize;

    #[test]
    fn annulus_seeds_agree() {
        let spec = DomainSpec::tubular(ClosedCurve::circle(Vec2::ZERO, 1.0).unwrap(), 0.4).unwrap();
        let h = 1.0 / 64.0;
        let grid = rasterize(&spec, h).unwrap();
        let r = uniqueness_probe(&spec, &grid, 4).unwrap();
        assert_eq!(r.pairwise.len(), 6);
        assert!(r.max_distance <= 5.0 * h, "{}", r.max_distance);
        assert!(r.all_orientable);
    }

    #[test]
    fn rejects_non_tubular() {
        let spec = DomainSpec::raw(ClosedCurve::circle(Vec2::ZERO, 1.0).unwrap(), vec![]);
        let grid = rasterize(&spec, 1.0 / 16.0).unwrap();
        assert!(uniqueness_probe(&spec, &grid, 4).is_err());
    }
}
