use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::grid::Lattice;
use crate::patterns::{LineField, PatternSpec};

pub const FIELD_HEADER: &str = "x,y,theta,a,b,c,inside";

/// Tolerance of the load-time projection checks.
const LOAD_TOLERANCE: f64 = 1e-12;

/// Grid metadata stored next to a field file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldMeta {
    pub lattice: Lattice,
    /// Corners of the raster bounding box.
    pub bbox: [Vec2; 2],
    pub h: f64,
    /// Outside-region labels of the raster and whether each is the unbounded one.
    #[serde(default)]
    pub components: Vec<ComponentMeta>,
    /// How the field was generated, when it is an analytic pattern.
    #[serde(default)]
    pub pattern: Option<PatternSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentMeta {
    pub label: usize,
    pub is_outer: bool,
}

impl FieldMeta {
    pub fn new(lattice: Lattice, pattern: Option<PatternSpec>) -> Self {
        Self {
            lattice,
            bbox: [lattice.origin, lattice.max_corner()],
            h: lattice.h,
            components: Vec::new(),
            pattern,
        }
    }

    pub fn with_components(mut self, grid: &crate::grid::RasterGrid) -> Self {
        self.components = grid
            .components()
            .iter()
            .map(|c| ComponentMeta {
                label: c.label,
                is_outer: c.is_outer,
            })
            .collect();
        self
    }
}

/// `F.csv` → `F.grid.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("grid.json")
}

/// Writes the CSV and its sidecar. Cells outside the mask are written as zeros.
pub fn save_field(path: impl AsRef<Path>, field: &LineField, meta: &FieldMeta) -> Result<()> {
    let path = path.as_ref();
    if meta.lattice != *field.lattice() {
        return Err(Error::InvalidArgument("sidecar lattice differs from the field lattice".into()));
    }
    let lat = field.lattice();
    let mut out = String::with_capacity(lat.len() * 64);
    out.push_str(FIELD_HEADER);
    out.push('\n');
    for i in 0..lat.len() {
        let c = lat.center(i);
        if field.is_defined(i) {
            let [a, b, cc] = field.abc(i);
            writeln!(out, "{},{},{},{},{},{},1", c.x, c.y, field.theta(i), a, b, cc).expect("string write");
        } else {
            writeln!(out, "{},{},0,0,0,0,0", c.x, c.y).expect("string write");
        }
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))?;
    let side = sidecar_path(path);
    let json = serde_json::to_string_pretty(meta).map_err(|e| Error::Schema(e.to_string()))?;
    std::fs::write(&side, json + "\n").map_err(|e| Error::io(&side, e))
}

/// Reads a field and its sidecar, re-deriving `(a, b, c)` from `θ` and
/// rejecting rows whose stored entries disagree beyond 1e-12.
pub fn load_field(path: impl AsRef<Path>) -> Result<(LineField, FieldMeta)> {
    let path = path.as_ref();
    let side = sidecar_path(path);
    let meta_text = std::fs::read_to_string(&side).map_err(|e| Error::io(&side, e))?;
    let meta: FieldMeta = serde_json::from_str(&meta_text)
        .map_err(|e| Error::parse(format!("{} line {}", side.display(), e.line()), e.to_string()))?;
    let lat = Lattice::new(meta.lattice.origin, meta.lattice.h, meta.lattice.nx, meta.lattice.ny)?;
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header.trim() != FIELD_HEADER {
        return Err(Error::parse(
            format!("{} line 1", path.display()),
            format!("expected header {FIELD_HEADER:?}, got {header:?}"),
        ));
    }
    let mut mask = Vec::with_capacity(lat.len());
    let mut theta = Vec::with_capacity(lat.len());
    let mut abc = Vec::with_capacity(lat.len());
    let scale = lat.h * 1e-9;
    for (k, line) in lines.enumerate() {
        let ctx = || format!("{} line {}", path.display(), k + 2);
        if k >= lat.len() {
            if line.trim().is_empty() {
                continue;
            }
            return Err(Error::parse(ctx(), format!("more rows than the {} cells of the grid", lat.len())));
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 7 {
            return Err(Error::parse(ctx(), format!("expected 7 columns, got {}", cols.len())));
        }
        let mut v = [0.0; 6];
        for (j, slot) in v.iter_mut().enumerate() {
            *slot = cols[j]
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::parse(ctx(), format!("column {}: {e}", j + 1)))?;
            if !slot.is_finite() {
                return Err(Error::parse(ctx(), format!("column {} is not finite", j + 1)));
            }
        }
        let inside = match cols[6].trim() {
            "1" => true,
            "0" => false,
            other => return Err(Error::parse(ctx(), format!("inside must be 0 or 1, got {other:?}"))),
        };
        let c = lat.center(k);
        if (v[0] - c.x).abs() > scale || (v[1] - c.y).abs() > scale {
            return Err(Error::parse(ctx(), "cell coordinates do not match the grid".to_string()));
        }
        if inside && !(0.0..std::f64::consts::PI).contains(&v[2]) {
            return Err(Error::parse(ctx(), format!("theta {} is not in [0, pi)", v[2])));
        }
        mask.push(inside);
        theta.push(v[2]);
        abc.push([v[3], v[4], v[5]]);
    }
    if mask.len() != lat.len() {
        return Err(Error::parse(
            path.display().to_string(),
            format!("expected {} rows, got {}", lat.len(), mask.len()),
        ));
    }
    let field = LineField::from_parts(lat, mask, theta, abc, LOAD_TOLERANCE)?;
    Ok((field, meta))
}
