//! Uniform Cartesian rasters of domains and discrete field calculus.

mod calculus;
mod field;

use std::collections::VecDeque;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use calculus::{
    boundary_trace, divergence_tensor, evaluate_near_boundary, gradient, interpolate, lp_norm,
    lp_norm_pow, partial, Axis, DivergenceMode, TraceReport, TraceSample,
};
pub use field::{CellField, FieldValue, ScalarField, TensorField2, VectorField2};

use crate::error::{Error, Result};
use crate::geometry::{BoundarySample, DomainSpec, Vec2};

/// Cell-centered uniform lattice. Cell `(i, j)` has center
/// `origin + h·(i + ½, j + ½)`; cells are stored row by row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    /// Lower-left corner of the bounding box.
    pub origin: Vec2,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Lattice {
    pub fn new(origin: Vec2, h: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidArgument(format!("grid spacing must be positive, got {h}")));
        }
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidArgument("empty lattice".into()));
        }
        Ok(Self { origin, h, nx, ny })
    }

    /// Lattice covering `[min, max]` with the given spacing.
    pub fn covering(min: Vec2, max: Vec2, h: f64) -> Result<Self> {
        let nx = ((max.x - min.x) / h).ceil().max(1.0) as usize;
        let ny = ((max.y - min.y) / h).ceil().max(1.0) as usize;
        Self::new(min, h, nx, ny)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    #[inline]
    pub fn center(&self, idx: usize) -> Vec2 {
        let (i, j) = self.coords(idx);
        Vec2::new(
            self.origin.x + (i as f64 + 0.5) * self.h,
            self.origin.y + (j as f64 + 0.5) * self.h,
        )
    }

    pub fn max_corner(&self) -> Vec2 {
        self.origin + Vec2::new(self.nx as f64 * self.h, self.ny as f64 * self.h)
    }

    /// Cell whose square contains `p`.
    pub fn cell_containing(&self, p: Vec2) -> Option<usize> {
        let fx = (p.x - self.origin.x) / self.h;
        let fy = (p.y - self.origin.y) / self.h;
        if fx < 0.0 || fy < 0.0 {
            return None;
        }
        let (i, j) = (fx as usize, fy as usize);
        (i < self.nx && j < self.ny).then(|| self.index(i, j))
    }

    /// Offset neighbor, if it stays on the lattice.
    #[inline]
    pub fn offset(&self, idx: usize, di: isize, dj: isize) -> Option<usize> {
        let (i, j) = self.coords(idx);
        let ni = i as isize + di;
        let nj = j as isize + dj;
        (ni >= 0 && nj >= 0 && (ni as usize) < self.nx && (nj as usize) < self.ny)
            .then(|| self.index(ni as usize, nj as usize))
    }

    pub fn neighbors4(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        [(1, 0), (-1, 0), (0, 1), (0, -1)]
            .into_iter()
            .filter_map(move |(a, b)| self.offset(idx, a, b))
    }

    pub fn neighbors8(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)]
            .into_iter()
            .filter_map(move |(a, b)| self.offset(idx, a, b))
    }

    pub fn on_edge(&self, idx: usize) -> bool {
        let (i, j) = self.coords(idx);
        i == 0 || j == 0 || i + 1 == self.nx || j + 1 == self.ny
    }
}

/// Classification of a raster cell by the sign of the signed distance at its center.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellKind {
    Outside,
    /// Inside, within `2h` of ∂Ω.
    Band,
    Interior,
}

impl CellKind {
    #[inline]
    pub fn is_inside(self) -> bool {
        self != CellKind::Outside
    }
}

/// One connected component of ∂Ω.
#[derive(Debug, Clone)]
pub struct BoundaryComponent {
    /// Label of the outside region this component separates from Ω.
    pub label: usize,
    /// Whether the outside region is the unbounded one (∂Ω⁰).
    pub is_outer: bool,
    /// Ordered samples with outward normals (empty when no domain is attached).
    pub samples: Vec<BoundarySample>,
}

/// A domain rasterized on a lattice.
#[derive(Debug, Clone)]
pub struct RasterGrid {
    lattice: Lattice,
    kinds: Vec<CellKind>,
    signed_distance: Option<Vec<f64>>,
    region: Vec<Option<usize>>,
    components: Vec<BoundaryComponent>,
    /// Outward normal of ∂Ω for inside cells with an outside 4-neighbor.
    wall_normals: Vec<Option<Vec2>>,
    domain: Option<Arc<DomainSpec>>,
}

/// Rasterizes Ω on a lattice of spacing `h` padded by `4h` around its bounding box.
pub fn rasterize(spec: &DomainSpec, h: f64) -> Result<RasterGrid> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidArgument(format!("grid spacing must be positive, got {h}")));
    }
    if let DomainSpec::Tubular { delta, .. } = spec {
        let across = 2.0 * delta / h;
        if across < 8.0 {
            return Err(Error::Resolution(format!(
                "h = {h} leaves {across:.2} cells across the tube width 2δ = {}; need at least 8",
                2.0 * delta
            )));
        }
    }
    let (lo, hi) = spec.bounding_box();
    let pad = Vec2::new(4.0 * h, 4.0 * h);
    let lattice = Lattice::covering(lo - pad, hi + pad, h)?;
    let sd: Vec<f64> = (0..lattice.len())
        .into_par_iter()
        .map(|i| spec.query(lattice.center(i)).signed_distance)
        .collect();
    let kinds: Vec<CellKind> = sd
        .iter()
        .map(|&d| {
            if d >= 0.0 {
                CellKind::Outside
            } else if d > -2.0 * h {
                CellKind::Band
            } else {
                CellKind::Interior
            }
        })
        .collect();
    if !kinds.iter().any(|k| k.is_inside()) {
        return Err(Error::Resolution(format!("no cell center of spacing {h} lies inside the domain")));
    }
    let wall_normals: Vec<Option<Vec2>> = (0..lattice.len())
        .into_par_iter()
        .map(|i| {
            if kinds[i].is_inside() && lattice.neighbors4(i).any(|n| !kinds[n].is_inside()) {
                Some(spec.query(lattice.center(i)).normal)
            } else {
                None
            }
        })
        .collect();

    let mut grid = RasterGrid::assemble(lattice, kinds, Some(sd), wall_normals, None);
    if grid.components.len() != spec.boundary_count() {
        return Err(Error::Resolution(format!(
            "raster at h = {h} shows {} boundary components, the domain has {}",
            grid.components.len(),
            spec.boundary_count()
        )));
    }
    // attach ordered boundary samples to the matching outside regions
    for j in 0..spec.boundary_count() {
        let n = ((spec.boundary_length(j) / h).ceil() as usize).max(16);
        let samples = spec.boundary_samples(j, n, 0.0);
        let probe = samples
            .iter()
            .find_map(|b| grid.region_near(b.point + b.normal * (0.75 * h)))
            .ok_or_else(|| Error::Resolution(format!("boundary component {j} is not resolved")))?;
        let comp = grid
            .components
            .iter_mut()
            .find(|c| c.label == probe)
            .expect("every region label has a component");
        if !comp.samples.is_empty() {
            return Err(Error::Resolution(format!(
                "two boundary components share outside region {probe} at h = {h}"
            )));
        }
        comp.samples = samples;
    }
    grid.domain = Some(Arc::new(spec.clone()));
    Ok(grid)
}

impl RasterGrid {
    /// Grid from an explicit inside mask (no domain geometry attached).
    ///
    /// Wall normals fall back to the staircase normal of the mask.
    pub fn from_mask(lattice: Lattice, inside: &[bool]) -> Result<Self> {
        if inside.len() != lattice.len() {
            return Err(Error::InvalidArgument("mask size mismatch".into()));
        }
        // band = inside cells within two steps of an outside cell
        let mut dist = vec![usize::MAX; lattice.len()];
        let mut queue = VecDeque::new();
        for i in 0..lattice.len() {
            if !inside[i] {
                dist[i] = 0;
                queue.push_back(i);
            }
        }
        while let Some(c) = queue.pop_front() {
            for n in lattice.neighbors8(c) {
                if dist[n] == usize::MAX {
                    dist[n] = dist[c] + 1;
                    queue.push_back(n);
                }
            }
        }
        let kinds: Vec<CellKind> = (0..lattice.len())
            .map(|i| {
                if !inside[i] {
                    CellKind::Outside
                } else if dist[i] <= 2 {
                    CellKind::Band
                } else {
                    CellKind::Interior
                }
            })
            .collect();
        let wall_normals = (0..lattice.len())
            .map(|i| {
                if !inside[i] {
                    return None;
                }
                let mut n = Vec2::ZERO;
                for (di, dj) in [(1isize, 0isize), (-1, 0), (0, 1), (0, -1)] {
                    let out = lattice.offset(i, di, dj).map_or(true, |k| !inside[k]);
                    if out {
                        n += Vec2::new(di as f64, dj as f64);
                    }
                }
                (n != Vec2::ZERO).then(|| n.normalized())
            })
            .collect();
        Ok(Self::assemble(lattice, kinds, None, wall_normals, None))
    }

    fn assemble(
        lattice: Lattice,
        kinds: Vec<CellKind>,
        signed_distance: Option<Vec<f64>>,
        wall_normals: Vec<Option<Vec2>>,
        domain: Option<Arc<DomainSpec>>,
    ) -> Self {
        let (region, count, outer) = label_outside(&lattice, &kinds);
        let components = (0..count)
            .map(|label| BoundaryComponent {
                label,
                is_outer: outer[label],
                samples: Vec::new(),
            })
            .collect();
        Self {
            lattice,
            kinds,
            signed_distance,
            region,
            components,
            wall_normals,
            domain,
        }
    }

    fn region_near(&self, p: Vec2) -> Option<usize> {
        let c = self.lattice.cell_containing(p)?;
        self.region[c].or_else(|| self.lattice.neighbors8(c).find_map(|n| self.region[n]))
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn h(&self) -> f64 {
        self.lattice.h
    }

    pub fn kinds(&self) -> &[CellKind] {
        &self.kinds
    }

    #[inline]
    pub fn is_inside(&self, idx: usize) -> bool {
        self.kinds[idx].is_inside()
    }

    pub fn inside_mask(&self) -> Vec<bool> {
        self.kinds.iter().map(|k| k.is_inside()).collect()
    }

    pub fn inside_count(&self) -> usize {
        self.kinds.iter().filter(|k| k.is_inside()).count()
    }

    /// Area of the inside cells.
    pub fn inside_area(&self) -> f64 {
        self.inside_count() as f64 * self.lattice.h * self.lattice.h
    }

    pub fn signed_distance(&self) -> Option<&[f64]> {
        self.signed_distance.as_deref()
    }

    /// Label of the outside region containing cell `idx`.
    pub fn region(&self, idx: usize) -> Option<usize> {
        self.region[idx]
    }

    pub fn components(&self) -> &[BoundaryComponent] {
        &self.components
    }

    /// ∂Ω⁰: the component bordering the unbounded outside region.
    pub fn outer_component(&self) -> Option<&BoundaryComponent> {
        self.components.iter().find(|c| c.is_outer)
    }

    #[inline]
    pub fn wall_normal(&self, idx: usize) -> Option<Vec2> {
        self.wall_normals[idx]
    }

    pub fn domain(&self) -> Option<&DomainSpec> {
        self.domain.as_deref()
    }

    /// Inside cells at distance at least `d` from ∂Ω.
    pub fn interior_mask(&self, d: f64) -> Vec<bool> {
        match &self.signed_distance {
            Some(sd) => sd.iter().map(|&v| v <= -d).collect(),
            None => {
                let steps = (d / self.lattice.h).ceil() as usize;
                erode(&self.lattice, &self.inside_mask(), steps)
            }
        }
    }
}

/// Removes `steps` layers (8-neighborhood) from a mask.
pub fn erode(lattice: &Lattice, mask: &[bool], steps: usize) -> Vec<bool> {
    let mut dist = vec![usize::MAX; lattice.len()];
    let mut queue = VecDeque::new();
    for i in 0..lattice.len() {
        if !mask[i] || lattice.on_edge(i) {
            dist[i] = if mask[i] { 1 } else { 0 };
            queue.push_back(i);
        }
    }
    while let Some(c) = queue.pop_front() {
        for n in lattice.neighbors8(c) {
            if dist[n] == usize::MAX {
                dist[n] = dist[c] + 1;
                queue.push_back(n);
            }
        }
    }
    (0..lattice.len())
        .map(|i| mask[i] && dist[i] > steps)
        .collect()
}

/// Flood fill of outside cells (8-connectivity). Returns per-cell labels,
/// the label count, and which labels touch the lattice edge.
fn label_outside(lattice: &Lattice, kinds: &[CellKind]) -> (Vec<Option<usize>>, usize, Vec<bool>) {
    let mut region = vec![None; lattice.len()];
    let mut outer = Vec::new();
    let mut count = 0;
    let mut queue = VecDeque::new();
    // seed the unbounded region first so that it receives label 0
    let mut seeds: Vec<usize> = (0..lattice.len())
        .filter(|&i| lattice.on_edge(i) && !kinds[i].is_inside())
        .collect();
    seeds.extend((0..lattice.len()).filter(|&i| !kinds[i].is_inside()));
    for start in seeds {
        if region[start].is_some() {
            continue;
        }
        let mut touches_edge = false;
        region[start] = Some(count);
        queue.push_back(start);
        while let Some(c) = queue.pop_front() {
            touches_edge |= lattice.on_edge(c);
            for n in lattice.neighbors8(c) {
                if region[n].is_none() && !kinds[n].is_inside() {
                    region[n] = Some(count);
                    queue.push_back(n);
                }
            }
        }
        outer.push(touches_edge);
        count += 1;
    }
    (region, count, outer)
}
