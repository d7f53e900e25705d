//! Line fields, oriented fields, and the analytic pattern catalog.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{validate_tubular_spec, DomainSpec, Vec2};
use crate::grid::{Lattice, RasterGrid, TensorField2, VectorField2};

/// Tolerance used for the nearest-point search of the exact solution.
pub const FOOT_TOLERANCE: f64 = 1e-8;

/// Canonical representative of `theta` in `[0, π)`.
pub fn canonical_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(PI);
    if t >= PI {
        0.0
    } else {
        t
    }
}

/// Signed difference `b − a` of two line directions, mapped into `(−π/2, π/2]`.
pub fn angle_diff_mod_pi(a: f64, b: f64) -> f64 {
    let d = (b - a).rem_euclid(PI);
    if d > FRAC_PI_2 {
        d - PI
    } else {
        d
    }
}

/// Unsigned distance between two line directions, in `[0, π/2]`.
pub fn angle_dist_mod_pi(a: f64, b: f64) -> f64 {
    angle_diff_mod_pi(a, b).abs()
}

/// Projection entries `(a, b, c)` of the direction `theta`.
#[inline]
pub fn projection_entries(theta: f64) -> [f64; 3] {
    let (s, c) = theta.sin_cos();
    let a = c * c;
    [a, s * c, 1.0 - a]
}

/// Largest defects of the projection identities over a field.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ProjectionDefects {
    /// `max |P² − P|` (entrywise).
    pub idempotence: f64,
    /// `max |P₁₂ − P₂₁|`.
    pub symmetry: f64,
    /// `max(|tr P − 1|, |det P|)`: distance from a rank-one projection.
    pub rank: f64,
}

/// Unoriented direction field: per defined cell an angle `θ ∈ [0, π)` and
/// the entries `a = cos²θ`, `b = sinθ cosθ`, `c = 1 − a` of `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineField {
    lattice: Lattice,
    mask: Vec<bool>,
    theta: Vec<f64>,
    abc: Vec<[f64; 3]>,
}

impl LineField {
    pub fn new(lattice: Lattice, mask: Vec<bool>, theta: Vec<f64>) -> Result<Self> {
        if mask.len() != lattice.len() || theta.len() != lattice.len() {
            return Err(Error::InvalidArgument("line field size mismatch".into()));
        }
        let theta: Vec<f64> = theta
            .iter()
            .zip(&mask)
            .map(|(&t, &m)| if m { canonical_angle(t) } else { 0.0 })
            .collect();
        if let Some(i) = (0..theta.len()).find(|&i| mask[i] && !theta[i].is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite angle at cell {i}")));
        }
        let abc = theta
            .iter()
            .zip(&mask)
            .map(|(&t, &m)| if m { projection_entries(t) } else { [0.0; 3] })
            .collect();
        Ok(Self {
            lattice,
            mask,
            theta,
            abc,
        })
    }

    /// Field from stored angles and entries, rejecting entries that do not
    /// match `θ` or violate `b² = ac`, `a + c = 1` beyond `tol`.
    pub fn from_parts(
        lattice: Lattice,
        mask: Vec<bool>,
        theta: Vec<f64>,
        abc: Vec<[f64; 3]>,
        tol: f64,
    ) -> Result<Self> {
        if abc.len() != lattice.len() {
            return Err(Error::InvalidArgument("line field size mismatch".into()));
        }
        let field = Self::new(lattice, mask, theta)?;
        for i in 0..lattice.len() {
            if !field.mask[i] {
                continue;
            }
            let [a, b, c] = abc[i];
            let [ea, eb, ec] = field.abc[i];
            let defect = (b * b - a * c)
                .abs()
                .max((a + c - 1.0).abs())
                .max((a - ea).abs())
                .max((b - eb).abs())
                .max((c - ec).abs());
            if !(defect <= tol) {
                return Err(Error::InvalidProjection { cell: i, defect });
            }
        }
        Ok(field)
    }

    /// Evaluates `theta(x)` at the centers of the masked cells.
    pub fn from_fn(lattice: Lattice, mask: Vec<bool>, theta: impl Fn(Vec2) -> f64 + Sync) -> Self {
        let values = (0..lattice.len())
            .into_par_iter()
            .map(|i| if mask[i] { theta(lattice.center(i)) } else { 0.0 })
            .collect();
        Self::new(lattice, mask, values).expect("sizes match the lattice")
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    #[inline]
    pub fn is_defined(&self, idx: usize) -> bool {
        self.mask[idx]
    }

    pub fn defined_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    #[inline]
    pub fn theta(&self, idx: usize) -> f64 {
        self.theta[idx]
    }

    pub fn thetas(&self) -> &[f64] {
        &self.theta
    }

    #[inline]
    pub fn abc(&self, idx: usize) -> [f64; 3] {
        self.abc[idx]
    }

    /// `P` at a cell, row-major.
    #[inline]
    pub fn tensor(&self, idx: usize) -> [f64; 4] {
        let [a, b, c] = self.abc[idx];
        [a, b, b, c]
    }

    pub fn to_tensor(&self) -> TensorField2 {
        let values = (0..self.lattice.len()).map(|i| self.tensor(i)).collect();
        TensorField2::new(self.lattice, self.mask.clone(), values).expect("sizes match the lattice")
    }

    pub fn restricted(&self, keep: &[bool]) -> Self {
        let mask = self.mask.iter().zip(keep).map(|(&a, &b)| a && b).collect();
        Self::new(self.lattice, mask, self.theta.clone()).expect("sizes match the lattice")
    }

    pub fn projection_defects(&self) -> ProjectionDefects {
        (0..self.lattice.len())
            .into_par_iter()
            .filter(|&i| self.mask[i])
            .map(|i| {
                let p = self.tensor(i);
                let sq = [
                    p[0] * p[0] + p[1] * p[2],
                    p[0] * p[1] + p[1] * p[3],
                    p[2] * p[0] + p[3] * p[2],
                    p[2] * p[1] + p[3] * p[3],
                ];
                let idem = (0..4).map(|k| (sq[k] - p[k]).abs()).fold(0.0, f64::max);
                let det = p[0] * p[3] - p[1] * p[2];
                ProjectionDefects {
                    idempotence: idem,
                    symmetry: (p[1] - p[2]).abs(),
                    rank: (p[0] + p[3] - 1.0).abs().max(det.abs()),
                }
            })
            .reduce(ProjectionDefects::default, |a, b| ProjectionDefects {
                idempotence: a.idempotence.max(b.idempotence),
                symmetry: a.symmetry.max(b.symmetry),
                rank: a.rank.max(b.rank),
            })
    }

    /// Bilinear interpolation of `θ` along the shortest angular path mod π.
    /// All four surrounding cells must be defined.
    pub fn theta_at(&self, p: Vec2) -> Result<f64> {
        self.interp(p, false).ok_or(Error::Interpolation(p.x, p.y))
    }

    /// Like [`LineField::theta_at`], but one missing corner is filled by affine completion.
    pub fn theta_near(&self, p: Vec2) -> Option<f64> {
        self.interp(p, true)
    }

    fn interp(&self, p: Vec2, complete: bool) -> Option<f64> {
        let lat = &self.lattice;
        let fx = (p.x - lat.origin.x) / lat.h - 0.5;
        let fy = (p.y - lat.origin.y) / lat.h - 0.5;
        let (i0, j0) = (fx.floor(), fy.floor());
        if !(i0 >= 0.0 && j0 >= 0.0) || i0 as usize + 1 >= lat.nx || j0 as usize + 1 >= lat.ny {
            return None;
        }
        let (i, j) = (i0 as usize, j0 as usize);
        let (tx, ty) = (fx - i0, fy - j0);
        let idx = [lat.index(i, j), lat.index(i + 1, j), lat.index(i, j + 1), lat.index(i + 1, j + 1)];
        let present = idx.map(|k| self.mask[k]);
        let reference = (0..4).find(|&k| present[k]).map(|k| self.theta[idx[k]])?;
        let mut v = idx.map(|k| reference + angle_diff_mod_pi(reference, self.theta[k]));
        let missing: Vec<usize> = (0..4).filter(|&k| !present[k]).collect();
        match missing.as_slice() {
            [] => {}
            [k] if complete => {
                let (a1, a2) = if *k == 0 || *k == 3 { (1, 2) } else { (0, 3) };
                v[*k] = v[a1] + v[a2] - v[3 - k];
            }
            _ => return None,
        }
        let t = v[0] * (1.0 - tx) * (1.0 - ty) + v[1] * tx * (1.0 - ty) + v[2] * (1.0 - tx) * ty + v[3] * tx * ty;
        Some(canonical_angle(t))
    }

    /// Largest angular distance mod π to another field on the common mask.
    pub fn max_angle_distance(&self, other: &LineField) -> Result<f64> {
        if self.lattice != other.lattice {
            return Err(Error::InvalidArgument("line fields live on different lattices".into()));
        }
        Ok((0..self.lattice.len())
            .filter(|&i| self.mask[i] && other.mask[i])
            .map(|i| angle_dist_mod_pi(self.theta[i], other.theta[i]))
            .fold(0.0, f64::max))
    }
}

/// Unit vector field `m` on the defined cells.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientedField {
    field: VectorField2,
}

impl OrientedField {
    /// Wraps `field`, normalizing each vector; zero vectors are rejected.
    pub fn new(field: VectorField2) -> Result<Self> {
        let lat = *field.lattice();
        let mut values = field.values().to_vec();
        for i in 0..lat.len() {
            if !field.is_defined(i) {
                continue;
            }
            let v = Vec2::new(values[i][0], values[i][1]);
            let n = v.norm();
            if !(n.is_finite() && n > 1e-12) {
                return Err(Error::InvalidArgument(format!("vector at cell {i} has no direction")));
            }
            values[i] = (v / n).to_array();
        }
        Ok(Self {
            field: VectorField2::new(lat, field.mask().to_vec(), values)?,
        })
    }

    pub fn from_fn(lattice: Lattice, mask: Vec<bool>, m: impl Fn(Vec2) -> Vec2 + Sync) -> Result<Self> {
        Self::new(VectorField2::from_fn(lattice, mask, |p| m(p).to_array()))
    }

    pub fn lattice(&self) -> &Lattice {
        self.field.lattice()
    }

    pub fn mask(&self) -> &[bool] {
        self.field.mask()
    }

    #[inline]
    pub fn is_defined(&self, idx: usize) -> bool {
        self.field.is_defined(idx)
    }

    #[inline]
    pub fn m(&self, idx: usize) -> Vec2 {
        let v = self.field.value(idx);
        Vec2::new(v[0], v[1])
    }

    pub fn as_field(&self) -> &VectorField2 {
        &self.field
    }

    /// `m⊥` (counterclockwise rotation).
    pub fn perp(&self) -> VectorField2 {
        self.field.map(|v| [-v[1], v[0]])
    }

    /// Global sign flip.
    pub fn negated(&self) -> Self {
        Self {
            field: self.field.map(|v| [-v[0], -v[1]]),
        }
    }

    /// The line field `m ⊗ m`.
    pub fn forget_orientation(&self) -> LineField {
        let lat = *self.lattice();
        let theta = (0..lat.len()).map(|i| self.m(i).angle()).collect();
        LineField::new(lat, self.mask().to_vec(), theta).expect("sizes match the lattice")
    }
}

/// Inside mask of `grid` with the closed disk of radius `2h` about `center` removed.
pub fn mask_without_core(grid: &RasterGrid, center: Vec2) -> Vec<bool> {
    let lat = grid.lattice();
    let r = 2.0 * lat.h;
    (0..lat.len())
        .map(|i| grid.is_inside(i) && lat.center(i).distance(center) > r)
        .collect()
}

/// Exact solution `P = γ'(s*) ⊗ γ'(s*)` of a tubular domain, `γ(s*)` being
/// the nearest point of the core curve.
pub fn exact_tubular_solution(spec: &DomainSpec, grid: &RasterGrid) -> Result<LineField> {
    validate_tubular_spec(spec)?;
    let DomainSpec::Tubular { core, .. } = spec else {
        unreachable!("validated as tubular");
    };
    let lat = *grid.lattice();
    let thetas: Vec<Result<f64>> = (0..lat.len())
        .into_par_iter()
        .map(|i| {
            if !grid.is_inside(i) {
                return Ok(0.0);
            }
            core.closest_point_unique(lat.center(i), FOOT_TOLERANCE)
                .map(|f| f.tangent.angle())
        })
        .collect();
    let theta = thetas.into_iter().collect::<Result<Vec<_>>>()?;
    LineField::new(lat, grid.inside_mask(), theta)
}

/// Oriented vortex `m = α (x − x₀)⊥ / |x − x₀|`, with a core of radius `2h` masked out.
pub fn vortex_field(grid: &RasterGrid, center: Vec2, alpha: f64) -> Result<OrientedField> {
    if alpha != 1.0 && alpha != -1.0 {
        return Err(Error::InvalidArgument(format!("vortex sign must be ±1, got {alpha}")));
    }
    OrientedField::from_fn(*grid.lattice(), mask_without_core(grid, center), |p| {
        (p - center).perp().normalized() * alpha
    })
}

/// Target pattern: concentric circles about `center` (the vortex without orientation).
pub fn target_field(grid: &RasterGrid, center: Vec2) -> LineField {
    LineField::from_fn(*grid.lattice(), mask_without_core(grid, center), |p| {
        (p - center).angle() + FRAC_PI_2
    })
}

/// U-turn: concentric arcs above the horizontal line through `center`,
/// vertical stripes below it. Carries a `+½` defect at `center`.
pub fn uturn_field(grid: &RasterGrid, center: Vec2) -> LineField {
    LineField::from_fn(*grid.lattice(), mask_without_core(grid, center), |p| {
        if p.y > center.y {
            (p - center).angle() + FRAC_PI_2
        } else {
            FRAC_PI_2
        }
    })
}

/// Piecewise-constant field: `theta_left` on the left of the oriented line
/// through `point` with direction `direction`, `theta_right` on the right.
pub fn grain_boundary_field(
    grid: &RasterGrid,
    theta_left: f64,
    theta_right: f64,
    point: Vec2,
    direction: Vec2,
) -> Result<LineField> {
    if angle_dist_mod_pi(theta_left, theta_right) == 0.0 {
        return Err(Error::InvalidArgument("grain boundary needs two distinct directions".into()));
    }
    if direction.norm() == 0.0 {
        return Err(Error::InvalidArgument("interface direction is zero".into()));
    }
    Ok(LineField::from_fn(*grid.lattice(), grid.inside_mask(), |p| {
        if direction.cross(p - point) > 0.0 {
            theta_left
        } else {
            theta_right
        }
    }))
}

pub fn constant_field(grid: &RasterGrid, theta: f64) -> LineField {
    LineField::from_fn(*grid.lattice(), grid.inside_mask(), |_| theta)
}

/// Reproducible description of a pattern, rebuilt on any raster of a domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum PatternSpec {
    /// Exact solution of the tubular domain.
    Tubular,
    Vortex { center: Vec2, alpha: f64 },
    Target { center: Vec2 },
    Uturn { center: Vec2 },
    Grain {
        theta_left: f64,
        theta_right: f64,
        point: Vec2,
        direction: Vec2,
    },
    Constant { theta: f64 },
}

impl PatternSpec {
    pub fn build(&self, spec: &DomainSpec, grid: &RasterGrid) -> Result<LineField> {
        match *self {
            PatternSpec::Tubular => exact_tubular_solution(spec, grid),
            PatternSpec::Vortex { center, alpha } => {
                Ok(vortex_field(grid, center, alpha)?.forget_orientation())
            }
            PatternSpec::Target { center } => Ok(target_field(grid, center)),
            PatternSpec::Uturn { center } => Ok(uturn_field(grid, center)),
            PatternSpec::Grain {
                theta_left,
                theta_right,
                point,
                direction,
            } => grain_boundary_field(grid, theta_left, theta_right, point, direction),
            PatternSpec::Constant { theta } => Ok(constant_field(grid, theta)),
        }
    }

    /// Point defect of the pattern, if any.
    pub fn defect_center(&self) -> Option<Vec2> {
        match *self {
            PatternSpec::Vortex { center, .. }
            | PatternSpec::Target { center }
            | PatternSpec::Uturn { center } => Some(center),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PatternSpec::Tubular => "tubular",
            PatternSpec::Vortex { .. } => "vortex",
            PatternSpec::Target { .. } => "target",
            PatternSpec::Uturn { .. } => "uturn",
            PatternSpec::Grain { .. } => "grain",
            PatternSpec::Constant { .. } => "constant",
        }
    }
}
