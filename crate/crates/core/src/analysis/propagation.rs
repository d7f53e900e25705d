use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::patterns::{angle_dist_mod_pi, LineField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationResult {
    pub origin: Vec2,
    /// Unit direction of `ker P(x₀)`.
    pub direction: Vec2,
    /// Largest angular distance mod π from `θ(x₀)` along the segment.
    pub variation: f64,
    /// Total length of the segment marched in both directions.
    pub length: f64,
    /// The segment left the field immediately on both sides.
    pub degenerate: bool,
}

/// Marches from the center of `cell` along `±ker P(x₀)` in steps of `h/2`
/// until the interpolation stencil leaves the field.
pub fn propagation_check(field: &LineField, cell: usize) -> Result<PropagationResult> {
    let lat = field.lattice();
    if cell >= lat.len() || !field.is_defined(cell) {
        return Err(Error::InvalidArgument(format!("cell {cell} is not in the field mask")));
    }
    let x0 = lat.center(cell);
    let t0 = field.theta(cell);
    let d = Vec2::from_angle(t0).perp();
    let step = 0.5 * lat.h;
    let max_steps = 2 * (lat.nx + lat.ny) + 4;
    let mut variation: f64 = 0.0;
    let mut length = 0.0;
    for sign in [1.0, -1.0] {
        for k in 1..=max_steps {
            let p = x0 + d * (sign * step * k as f64);
            let Some(t) = field.theta_near(p) else { break };
            variation = variation.max(angle_dist_mod_pi(t0, t));
            length += step;
        }
    }
    Ok(PropagationResult {
        origin: x0,
        direction: d,
        variation,
        length,
        degenerate: length == 0.0,
    })
}
