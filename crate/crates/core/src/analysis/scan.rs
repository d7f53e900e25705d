use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{divergence_tensor, DivergenceMode};
use crate::patterns::LineField;

use super::lift::{lift, LiftOutcome};
use super::winding::{hole_windings, plaquette_windings, Defect};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LiftStatus {
    Orientable,
    NonOrientable { winding: f64, loop_length: usize },
    TooRough { jump: f64 },
}

/// Where the mass of `|div P|` sits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Concentration {
    pub l1: f64,
    pub l2_squared: f64,
    pub peak: f64,
    /// Cells with `|div P| ≥ 1/(4h)`, the signature of a line singularity.
    pub band_cells: usize,
    /// Share of the `L¹` mass carried by those cells.
    pub band_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub defects: Vec<Defect>,
    pub lift: LiftStatus,
    pub concentration: Concentration,
}

impl ScanReport {
    pub fn orientable(&self) -> bool {
        self.lift == LiftStatus::Orientable
    }
}

/// Plaquette and hole charges, a lifting attempt and the concentration of `|div P|`.
pub fn singularity_scan(field: &LineField) -> Result<ScanReport> {
    let mut defects = hole_windings(field);
    defects.extend(plaquette_windings(field));
    let lift = match lift(field) {
        Ok(r) => match r.outcome {
            LiftOutcome::Oriented(_) => LiftStatus::Orientable,
            LiftOutcome::NonOrientable(w) => LiftStatus::NonOrientable {
                winding: w.winding,
                loop_length: w.cells.len(),
            },
        },
        Err(Error::TooRough { jump, .. }) => LiftStatus::TooRough { jump },
        Err(e) => return Err(e),
    };
    let lat = field.lattice();
    let div = divergence_tensor(&field.to_tensor(), DivergenceMode::Interior)?.magnitude();
    let cutoff = 0.25 / lat.h;
    let area = lat.h * lat.h;
    let mut c = Concentration {
        l1: 0.0,
        l2_squared: 0.0,
        peak: 0.0,
        band_cells: 0,
        band_fraction: 0.0,
    };
    let mut band_mass = 0.0;
    for i in 0..lat.len() {
        if !div.is_defined(i) {
            continue;
        }
        let v = div.value(i);
        c.l1 += v * area;
        c.l2_squared += v * v * area;
        c.peak = c.peak.max(v);
        if v >= cutoff {
            c.band_cells += 1;
            band_mass += v * area;
        }
    }
    c.band_fraction = if c.l1 > 0.0 { band_mass / c.l1 } else { 0.0 };
    Ok(ScanReport {
        defects,
        lift,
        concentration: c,
    })
}
