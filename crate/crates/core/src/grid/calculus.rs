use rayon::prelude::*;

use super::{CellField, FieldValue, Lattice, RasterGrid, ScalarField, TensorField2, VectorField2};
use crate::error::{Error, Result};
use crate::geometry::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    fn step(self) -> (isize, isize) {
        match self {
            Axis::X => (1, 0),
            Axis::Y => (0, 1),
        }
    }
}

/// How cells next to ∂Ω are treated by [`divergence_tensor`].
#[derive(Debug, Clone, Copy)]
pub enum DivergenceMode<'a> {
    /// One-sided stencils at the edge of the mask; no boundary contribution.
    Interior,
    /// Divergence of the field extended by zero outside Ω: the interior
    /// divergence plus the boundary layer `−(P n) ℓ / h²` on cells whose
    /// faces border the outside of `grid`, `ℓ` being the length of ∂Ω in the cell.
    Extended(&'a RasterGrid),
}

/// First derivative along `axis`: centered where both neighbors are defined,
/// second-order one-sided next to the edge of the mask, first-order when only
/// one neighbor exists. Cells with no defined neighbor along the axis drop out.
pub fn partial<T: FieldValue>(f: &CellField<T>, axis: Axis) -> CellField<T> {
    let lat = *f.lattice();
    let (dx, dy) = axis.step();
    let h = lat.h;
    let results: Vec<Option<T>> = (0..lat.len())
        .into_par_iter()
        .map(|idx| {
            if !f.is_defined(idx) {
                return None;
            }
            let at = |k: isize| lat.offset(idx, k * dx, k * dy).filter(|&n| f.is_defined(n));
            let v0 = f.value(idx);
            let val = |n: usize| f.value(n);
            let diff = |a: T, b: T| a.add(b.scale(-1.0));
            Some(match (at(1), at(-1)) {
                (Some(p), Some(m)) => val(p).add(val(m).scale(-1.0)).scale(0.5 / h),
                (Some(p), None) => match at(2) {
                    Some(p2) => diff(val(p), v0)
                        .scale(4.0)
                        .add(diff(val(p2), v0).scale(-1.0))
                        .scale(0.5 / h),
                    None => val(p).add(v0.scale(-1.0)).scale(1.0 / h),
                },
                (None, Some(m)) => match at(-2) {
                    Some(m2) => diff(v0, val(m))
                        .scale(4.0)
                        .add(diff(v0, val(m2)).scale(-1.0))
                        .scale(0.5 / h),
                    None => v0.add(val(m).scale(-1.0)).scale(1.0 / h),
                },
                (None, None) => return None,
            })
        })
        .collect();
    let mask = results.iter().map(Option::is_some).collect();
    let values = results.into_iter().map(|r| r.unwrap_or(T::ZERO)).collect();
    CellField::new(lat, mask, values).expect("sizes match the lattice")
}

pub fn gradient(f: &ScalarField) -> VectorField2 {
    let fx = partial(f, Axis::X);
    let fy = partial(f, Axis::Y);
    let lat = *f.lattice();
    let mask: Vec<bool> = (0..lat.len()).map(|i| fx.is_defined(i) && fy.is_defined(i)).collect();
    let values = (0..lat.len()).map(|i| [fx.value(i), fy.value(i)]).collect();
    CellField::new(lat, mask, values).expect("sizes match the lattice")
}

/// Row-wise divergence `(div P)ᵢ = Σⱼ ∂ⱼ Pᵢⱼ`.
pub fn divergence_tensor(p: &TensorField2, mode: DivergenceMode<'_>) -> Result<VectorField2> {
    let lat = *p.lattice();
    let px = partial(p, Axis::X);
    let py = partial(p, Axis::Y);
    let mut mask: Vec<bool> = (0..lat.len()).map(|i| px.is_defined(i) && py.is_defined(i)).collect();
    let mut values: Vec<[f64; 2]> = (0..lat.len())
        .map(|i| {
            let (a, b) = (px.value(i), py.value(i));
            [a[0] + b[1], a[2] + b[3]]
        })
        .collect();
    if let DivergenceMode::Extended(grid) = mode {
        if grid.lattice() != &lat {
            return Err(Error::InvalidArgument("field and grid lattices differ".into()));
        }
        let h = lat.h;
        for idx in 0..lat.len() {
            if !p.is_defined(idx) {
                continue;
            }
            let Some(n) = grid.wall_normal(idx) else { continue };
            let mut ell = 0.0;
            for (di, dj) in [(1isize, 0isize), (-1, 0), (0, 1), (0, -1)] {
                let outside = lat.offset(idx, di, dj).map_or(true, |k| !grid.is_inside(k));
                if outside {
                    ell += h * (di as f64 * n.x + dj as f64 * n.y).abs();
                }
            }
            let m = p.value(idx);
            let pn = [m[0] * n.x + m[1] * n.y, m[2] * n.x + m[3] * n.y];
            let w = ell / (h * h);
            if !mask[idx] {
                mask[idx] = true;
                values[idx] = [0.0; 2];
            }
            values[idx][0] -= pn[0] * w;
            values[idx][1] -= pn[1] * w;
        }
    }
    CellField::new(lat, mask, values)
}

/// `Σ |v|ᵖ h²` over `region ∧ mask`, with `|v|` the Euclidean norm of the channels.
pub fn lp_norm_pow<T: FieldValue>(field: &CellField<T>, p: f64, region: Option<&[bool]>) -> Result<f64> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::InvalidArgument(format!("exponent must be finite and at least 1, got {p}")));
    }
    let lat = field.lattice();
    if let Some(r) = region {
        if r.len() != lat.len() {
            return Err(Error::InvalidArgument("region size mismatch".into()));
        }
    }
    let terms: Vec<f64> = (0..lat.len())
        .into_par_iter()
        .map(|i| {
            if !field.is_defined(i) || region.is_some_and(|r| !r[i]) {
                return f64::NAN;
            }
            let v = field.value(i);
            let mag = v.channels().iter().map(|c| c * c).sum::<f64>().sqrt();
            mag.powf(p)
        })
        .collect();
    let mut count = 0usize;
    let mut sum = 0.0;
    for t in terms {
        if !t.is_nan() {
            count += 1;
            sum += t;
        }
    }
    if count == 0 {
        return Err(Error::ZeroMeasure);
    }
    Ok(sum * lat.h * lat.h)
}

/// `(Σ |v|ᵖ h²)^{1/p}` over `region ∧ mask`.
pub fn lp_norm<T: FieldValue>(field: &CellField<T>, p: f64, region: Option<&[bool]>) -> Result<f64> {
    lp_norm_pow(field, p, region).map(|s| s.powf(1.0 / p))
}

/// Surrounding cell centers of `p` and the bilinear weights `(tx, ty)`.
fn stencil(lat: &Lattice, p: Vec2) -> Option<([usize; 4], f64, f64)> {
    let fx = (p.x - lat.origin.x) / lat.h - 0.5;
    let fy = (p.y - lat.origin.y) / lat.h - 0.5;
    if !(fx.is_finite() && fy.is_finite()) {
        return None;
    }
    let (i0, j0) = (fx.floor(), fy.floor());
    if i0 < 0.0 || j0 < 0.0 || i0 as usize + 1 >= lat.nx || j0 as usize + 1 >= lat.ny {
        return None;
    }
    let (i, j) = (i0 as usize, j0 as usize);
    Some((
        [lat.index(i, j), lat.index(i + 1, j), lat.index(i, j + 1), lat.index(i + 1, j + 1)],
        fx - i0,
        fy - j0,
    ))
}

fn bilinear<T: FieldValue>(v: [T; 4], tx: f64, ty: f64) -> T {
    v[0].scale((1.0 - tx) * (1.0 - ty))
        .add(v[1].scale(tx * (1.0 - ty)))
        .add(v[2].scale((1.0 - tx) * ty))
        .add(v[3].scale(tx * ty))
}

/// Bilinear interpolation; all four surrounding cells must be defined.
pub fn interpolate<T: FieldValue>(field: &CellField<T>, p: Vec2) -> Result<T> {
    let (idx, tx, ty) = stencil(field.lattice(), p).ok_or(Error::Interpolation(p.x, p.y))?;
    if idx.iter().any(|&i| !field.is_defined(i)) {
        return Err(Error::Interpolation(p.x, p.y));
    }
    Ok(bilinear(idx.map(|i| field.value(i)), tx, ty))
}

/// Bilinear interpolation that tolerates one missing corner, filled by the
/// affine completion `f(a₁) + f(a₂) − f(opposite)`.
pub fn evaluate_near_boundary<T: FieldValue>(field: &CellField<T>, p: Vec2) -> Option<T> {
    let (idx, tx, ty) = stencil(field.lattice(), p)?;
    let present = idx.map(|i| field.is_defined(i));
    let missing: Vec<usize> = (0..4).filter(|&k| !present[k]).collect();
    let mut v = idx.map(|i| field.value(i));
    match missing.as_slice() {
        [] => {}
        [k] => {
            // corners are ordered (0,0), (1,0), (0,1), (1,1): opposite is 3 − k
            let o = 3 - k;
            let (a1, a2) = match k {
                0 | 3 => (1, 2),
                _ => (0, 3),
            };
            v[*k] = v[a1].add(v[a2]).add(v[o].scale(-1.0));
        }
        _ => return None,
    }
    Some(bilinear(v, tx, ty))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    pub component: usize,
    /// Boundary point.
    pub point: Vec2,
    /// Outward unit normal.
    pub normal: Vec2,
    /// `P n`, with `P` evaluated one cell inward.
    pub pn: Vec2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceReport {
    pub samples: Vec<TraceSample>,
    /// Samples whose interpolation stencil was not available.
    pub skipped: usize,
}

impl TraceReport {
    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|s| s.pn.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_on(&self, component: usize) -> f64 {
        self.samples
            .iter()
            .filter(|s| s.component == component)
            .map(|s| s.pn.norm())
            .fold(0.0, f64::max)
    }
}

/// `P n` at the boundary samples of every component of `grid`.
pub fn boundary_trace(p: &TensorField2, grid: &RasterGrid) -> Result<TraceReport> {
    if p.lattice() != grid.lattice() {
        return Err(Error::InvalidArgument("field and grid lattices differ".into()));
    }
    let h = grid.h();
    let evaluated: Vec<Option<TraceSample>> = grid
        .components()
        .iter()
        .enumerate()
        .flat_map(|(c, comp)| comp.samples.iter().map(move |s| (c, *s)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(c, s)| {
            let q = s.point - s.normal * h;
            evaluate_near_boundary(p, q).map(|m| TraceSample {
                component: c,
                point: s.point,
                normal: s.normal,
                pn: Vec2::new(m[0] * s.normal.x + m[1] * s.normal.y, m[2] * s.normal.x + m[3] * s.normal.y),
            })
        })
        .collect();
    let skipped = evaluated.iter().filter(|s| s.is_none()).count();
    Ok(TraceReport {
        samples: evaluated.into_iter().flatten().collect(),
        skipped,
    })
}
