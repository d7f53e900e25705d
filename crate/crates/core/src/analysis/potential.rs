use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::grid::{evaluate_near_boundary, RasterGrid, ScalarField};
use crate::patterns::OrientedField;

/// Closed-loop integrals above this value mean `m⊥` is not a gradient.
pub const CURL_LIMIT: f64 = 0.1;

/// Values of `φ` extrapolated to one boundary component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryConstant {
    pub component: usize,
    pub is_outer: bool,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialResult {
    pub phi: ScalarField,
    /// Largest mismatch of the tree integral over the edges not in the tree.
    pub curl_residual: f64,
    pub boundary: Vec<BoundaryConstant>,
}

impl PotentialResult {
    /// `c_j − c_0` for every inner component `j`.
    pub fn gaps(&self) -> Vec<f64> {
        let Some(outer) = self.boundary.iter().find(|b| b.is_outer) else {
            return Vec::new();
        };
        self.boundary
            .iter()
            .filter(|b| !b.is_outer)
            .map(|b| b.mean - outer.mean)
            .collect()
    }
}

/// Integrates `∇φ = m⊥` along a breadth-first spanning tree of the defined
/// cells (trapezoid rule per edge) and normalizes `φ` so that its minimum over
/// the outer boundary component is 0.
pub fn potential(m: &OrientedField, grid: &RasterGrid) -> Result<PotentialResult> {
    let lat = *m.lattice();
    if &lat != grid.lattice() {
        return Err(Error::InvalidArgument("field and grid lattices differ".into()));
    }
    let h = lat.h;
    let perp = m.perp();
    let pv = |i: usize| {
        let v = perp.value(i);
        Vec2::new(v[0], v[1])
    };
    let step = |a: usize, b: usize| {
        let e = lat.center(b) - lat.center(a);
        0.5 * (pv(a) + pv(b)).dot(e)
    };
    let n = lat.len();
    let mut phi = vec![f64::NAN; n];
    let mut parent = vec![usize::MAX; n];
    for root in 0..n {
        if !m.is_defined(root) || !phi[root].is_nan() {
            continue;
        }
        phi[root] = 0.0;
        let mut queue = VecDeque::from([root]);
        while let Some(c) = queue.pop_front() {
            for nb in lat.neighbors4(c) {
                if m.is_defined(nb) && phi[nb].is_nan() {
                    phi[nb] = phi[c] + step(c, nb);
                    parent[nb] = c;
                    queue.push_back(nb);
                }
            }
        }
    }
    let mut curl_residual: f64 = 0.0;
    for c in 0..n {
        if !m.is_defined(c) {
            continue;
        }
        for (di, dj) in [(1isize, 0isize), (0, 1)] {
            let Some(nb) = lat.offset(c, di, dj) else { continue };
            if !m.is_defined(nb) || parent[nb] == c || parent[c] == nb {
                continue;
            }
            curl_residual = curl_residual.max((phi[nb] - phi[c] - step(c, nb)).abs());
        }
    }
    if curl_residual > CURL_LIMIT {
        return Err(Error::NotAGradient(curl_residual));
    }
    let mask = m.mask().to_vec();
    let phi_raw = ScalarField::new(lat, mask.clone(), phi.iter().map(|v| if v.is_nan() { 0.0 } else { *v }).collect())?;

    let mut values: Vec<Vec<f64>> = Vec::new();
    for comp in grid.components() {
        let vals = comp
            .samples
            .iter()
            .filter_map(|s| {
                let q = s.point - s.normal * h;
                let p = evaluate_near_boundary(&phi_raw, q)?;
                let w = evaluate_near_boundary(&perp, q)?;
                Some(p + h * Vec2::new(w[0], w[1]).dot(s.normal))
            })
            .collect();
        values.push(vals);
    }
    let shift = grid
        .components()
        .iter()
        .zip(&values)
        .find(|(c, _)| c.is_outer)
        .and_then(|(_, v)| v.iter().copied().reduce(f64::min))
        .unwrap_or(0.0);
    let boundary = grid
        .components()
        .iter()
        .zip(&values)
        .enumerate()
        .filter(|(_, (_, v))| !v.is_empty())
        .map(|(j, (c, v))| {
            let k = v.len() as f64;
            let mean = v.iter().sum::<f64>() / k - shift;
            let var = v.iter().map(|x| (x - shift - mean).powi(2)).sum::<f64>() / k;
            BoundaryConstant {
                component: j,
                is_outer: c.is_outer,
                mean,
                std: var.sqrt(),
                min: v.iter().copied().fold(f64::INFINITY, f64::min) - shift,
                max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max) - shift,
                samples: v.len(),
            }
        })
        .collect();
    let phi = phi_raw.map(|v| v - shift);
    Ok(PotentialResult {
        phi,
        curl_residual,
        boundary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::lift;
    use crate::geometry::{ClosedCurve, DomainSpec};
    use crate::grid::{gradient, rasterize, Lattice};
    use crate::patterns::{exact_tubular_solution, vortex_field};

    #[test]
    fn horizontal_field_gives_height() {
        let spec = DomainSpec::rect(Vec2::ZERO, Vec2::new(1.0, 1.0)).unwrap();
        let g = rasterize(&spec, 1.0 / 16.0).unwrap();
        let m = OrientedField::from_fn(*g.lattice(), g.inside_mask(), |_| Vec2::new(1.0, 0.0)).unwrap();
        let r = potential(&m, &g).unwrap();
        let lat = g.lattice();
        let first = (0..lat.len()).find(|&i| r.phi.is_defined(i)).unwrap();
        let c0 = r.phi.value(first) - lat.center(first).y;
        for i in 0..lat.len() {
            if r.phi.is_defined(i) {
                assert!((r.phi.value(i) - lat.center(i).y - c0).abs() < 1e-12);
            }
        }
        assert!(r.curl_residual < 1e-12);
    }

    #[test]
    fn annulus_constants_and_gap() {
        let spec = DomainSpec::tubular(ClosedCurve::circle(Vec2::ZERO, 1.0).unwrap(), 0.4).unwrap();
        let h = 1.0 / 64.0;
        let g = rasterize(&spec, h).unwrap();
        let f = exact_tubular_solution(&spec, &g).unwrap();
        let m = lift(&f).unwrap().oriented().unwrap().clone();
        let r = potential(&m, &g).unwrap();
        assert_eq!(r.boundary.len(), 2);
        for b in &r.boundary {
            assert!(b.std <= 5.0 * h, "{b:?}");
        }
        let gap = r.gaps()[0];
        assert!((gap.abs() - 0.8).abs() < 0.01, "{gap}");
        // ∇φ reproduces m⊥
        let grad = gradient(&r.phi);
        let perp = m.perp();
        let lat = g.lattice();
        let interior = g.interior_mask(3.0 * h);
        for i in 0..lat.len() {
            if interior[i] && grad.is_defined(i) {
                let (a, b) = (grad.value(i), perp.value(i));
                assert!((a[0] - b[0]).hypot(a[1] - b[1]) <= 10.0 * h);
            }
        }
    }

    #[test]
    fn rotational_field_is_rejected() {
        // m = e_r has m⊥ = e_θ, whose loop integral is 2πr
        let lat = Lattice::new(Vec2::new(-1.0, -1.0), 1.0 / 16.0, 32, 32).unwrap();
        let g = RasterGrid::from_mask(lat, &vec![true; lat.len()]).unwrap();
        let v = vortex_field(&g, Vec2::ZERO, 1.0).unwrap();
        let radial = OrientedField::from_fn(lat, v.mask().to_vec(), |p| p.normalized()).unwrap();
        let g2 = RasterGrid::from_mask(lat, v.mask()).unwrap();
        assert!(matches!(potential(&radial, &g2), Err(Error::NotAGradient(_))));
    }
}
