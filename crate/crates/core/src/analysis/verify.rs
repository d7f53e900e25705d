use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DomainSpec;
use crate::grid::{
    boundary_trace, divergence_tensor, erode, lp_norm, lp_norm_pow, rasterize, DivergenceMode, RasterGrid,
};
use crate::patterns::{LineField, PatternSpec};

/// Thresholds of the verification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Largest accepted growth of `‖div P‖²_{L²}` per halving of `h`.
    pub growth_threshold: f64,
    /// Residual tolerance is `residual_factor · h · ‖div P‖_{L²}`.
    pub residual_factor: f64,
    /// Residual region: cells at least this many cells away from the mask edge.
    pub residual_margin: usize,
    /// Trace tolerance is `trace_factor · h`.
    pub trace_factor: f64,
    /// Tolerance of the pointwise projection identities.
    pub projection_tolerance: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            growth_threshold: 0.10,
            residual_factor: 10.0,
            residual_margin: 10,
            trace_factor: 5.0,
            projection_tolerance: 1e-12,
        }
    }
}

/// Where the field under test comes from.
#[derive(Debug, Clone, Copy)]
pub enum FieldSource<'a> {
    /// A pattern rebuilt on rasters of `domain` at each spacing (coarse to fine).
    Analytic {
        pattern: &'a PatternSpec,
        domain: &'a DomainSpec,
        h_levels: &'a [f64],
    },
    /// A single field on a single raster.
    Given { field: &'a LineField, grid: &'a RasterGrid },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Untested,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub status: Status,
    pub value: Option<f64>,
    pub tolerance: f64,
    pub detail: String,
}

impl Condition {
    fn check(value: f64, tolerance: f64, detail: String) -> Self {
        Self {
            status: if value <= tolerance { Status::Pass } else { Status::Fail },
            value: Some(value),
            tolerance,
            detail,
        }
    }
}

/// The solution conditions in problem order, plus the boundary trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conditions {
    /// `P² = P`.
    pub idempotent: Condition,
    /// `rank P = 1`.
    pub rank_one: Condition,
    /// `Pᵀ = P`.
    pub symmetric: Condition,
    /// `div P ∈ L²(ℝ²)` for the field extended by zero.
    pub divergence_l2: Condition,
    /// `P div P = 0` in the interior.
    pub residual: Condition,
    /// `P n = 0` on ∂Ω.
    pub trace: Condition,
}

impl Conditions {
    pub fn iter(&self) -> impl Iterator<Item = (&'static str, &Condition)> {
        [
            ("idempotent", &self.idempotent),
            ("rank_one", &self.rank_one),
            ("symmetric", &self.symmetric),
            ("divergence_l2", &self.divergence_l2),
            ("residual", &self.residual),
            ("trace", &self.trace),
        ]
        .into_iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelNorm {
    pub h: f64,
    pub div_l2_squared: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    pub h: f64,
    /// `‖div P‖_{L²}` of the zero extension on the finest raster.
    pub div_l2_extended: f64,
    /// `‖div P‖_{L²}` over the residual region.
    pub div_l2_interior: f64,
    pub residual_l2: f64,
    pub residual_max: f64,
    pub trace_max: f64,
    pub trace_samples: usize,
    pub trace_skipped: usize,
    pub growth_per_halving: Option<f64>,
    pub levels: Vec<LevelNorm>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictStatus {
    Pass,
    Fail,
    /// Everything tested passed, but some condition could not be tested.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: VerdictStatus,
    pub reasons: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub conditions: Conditions,
    pub norms: Norms,
    pub verdict: Verdict,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdict.status == VerdictStatus::Pass
    }

    pub fn failed(&self) -> bool {
        self.verdict.status == VerdictStatus::Fail
    }
}

/// Growth of `values` per halving of `h` (geometric mean over the sequence).
pub fn growth_per_halving(levels: &[LevelNorm]) -> Option<f64> {
    let (first, last) = (levels.first()?, levels.last()?);
    let halvings = (first.h / last.h).log2();
    if levels.len() < 2 || !(halvings > 0.0) {
        return None;
    }
    if first.div_l2_squared == 0.0 {
        return Some(if last.div_l2_squared == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Some((last.div_l2_squared / first.div_l2_squared).powf(1.0 / halvings) - 1.0)
}

/// Squared `L²` norm of the divergence of the zero extension.
pub fn extended_div_l2_squared(field: &LineField, grid: &RasterGrid) -> Result<f64> {
    let div = divergence_tensor(&field.to_tensor(), DivergenceMode::Extended(grid))?;
    match lp_norm_pow(&div, 2.0, None) {
        Err(Error::ZeroMeasure) => Ok(0.0),
        r => r,
    }
}

pub fn verify_solution(source: FieldSource<'_>, options: &VerifyOptions) -> Result<VerificationReport> {
    let mut levels = Vec::new();
    let (field, grid) = match source {
        FieldSource::Analytic {
            pattern,
            domain,
            h_levels,
        } => {
            if h_levels.is_empty() {
                return Err(Error::InvalidArgument("no grid spacing given".into()));
            }
            let mut finest = None;
            for &h in h_levels {
                let grid = rasterize(domain, h)?;
                let field = pattern.build(domain, &grid)?;
                levels.push(LevelNorm {
                    h,
                    div_l2_squared: extended_div_l2_squared(&field, &grid)?,
                });
                finest = Some((field, grid));
            }
            finest.expect("at least one level")
        }
        FieldSource::Given { field, grid } => {
            if field.lattice() != grid.lattice() {
                return Err(Error::InvalidArgument("field and grid lattices differ".into()));
            }
            levels.push(LevelNorm {
                h: grid.h(),
                div_l2_squared: extended_div_l2_squared(field, grid)?,
            });
            (field.clone(), grid.clone())
        }
    };
    let h = grid.h();
    let defects = field.projection_defects();
    let tol = options.projection_tolerance;

    let growth = growth_per_halving(&levels);
    let divergence_l2 = match growth {
        Some(g) => Condition::check(
            g,
            options.growth_threshold,
            format!("squared L2 norm of div P grows {:.1}% per halving of h", 100.0 * g),
        ),
        None => Condition {
            status: Status::Untested,
            value: None,
            tolerance: options.growth_threshold,
            detail: "a single resolution cannot decide L2 membership".into(),
        },
    };

    let p = field.to_tensor();
    let div = divergence_tensor(&p, DivergenceMode::Interior)?;
    let region = erode(field.lattice(), field.mask(), options.residual_margin);
    let residual_field = p.apply(&div);
    let residual_mag = residual_field.magnitude();
    let (residual_l2, div_l2_interior, residual_max) = match lp_norm(&residual_field, 2.0, Some(&region)) {
        Ok(r) => {
            let d = lp_norm(&div, 2.0, Some(&region))?;
            let max = (0..region.len())
                .filter(|&i| region[i] && residual_mag.is_defined(i))
                .map(|i| residual_mag.value(i))
                .fold(0.0, f64::max);
            (r, d, max)
        }
        Err(Error::ZeroMeasure) => {
            return Err(Error::Resolution(format!(
                "no cell lies {} cells inside the field mask at h = {h}",
                options.residual_margin
            )))
        }
        Err(e) => return Err(e),
    };
    let residual_tol = options.residual_factor * h * div_l2_interior;
    let residual = Condition::check(
        residual_l2,
        residual_tol,
        format!("interior L2 norm of P div P; pointwise max {residual_max:.3e}"),
    );

    let trace_report = boundary_trace(&p, &grid)?;
    let trace_max = trace_report.max_abs();
    let trace = if trace_report.samples.is_empty() {
        Condition {
            status: Status::Untested,
            value: None,
            tolerance: options.trace_factor * h,
            detail: "no boundary samples available".into(),
        }
    } else {
        Condition::check(
            trace_max,
            options.trace_factor * h,
            format!(
                "max |Pn| over {} boundary samples ({} skipped)",
                trace_report.samples.len(),
                trace_report.skipped
            ),
        )
    };

    let conditions = Conditions {
        idempotent: Condition::check(defects.idempotence, tol, "max |P² − P|".into()),
        rank_one: Condition::check(defects.rank, tol, "max of |tr P − 1| and |det P|".into()),
        symmetric: Condition::check(defects.symmetry, tol, "max |P12 − P21|".into()),
        divergence_l2,
        residual,
        trace,
    };
    let mut reasons = Vec::new();
    let mut untested = false;
    for (name, c) in conditions.iter() {
        match c.status {
            Status::Fail => reasons.push(match name {
                "divergence_l2" => format!("L2 growth of div P: {}", c.detail),
                _ => format!("{name}: {} = {:.6e} exceeds {:.6e}", c.detail, c.value.unwrap_or(f64::NAN), c.tolerance),
            }),
            Status::Untested => untested = true,
            Status::Pass => {}
        }
    }
    let status = if !reasons.is_empty() {
        VerdictStatus::Fail
    } else if untested {
        VerdictStatus::Inconclusive
    } else {
        VerdictStatus::Pass
    };
    Ok(VerificationReport {
        conditions,
        norms: Norms {
            h,
            div_l2_extended: levels.last().map_or(0.0, |l| l.div_l2_squared.sqrt()),
            div_l2_interior,
            residual_l2,
            residual_max,
            trace_max,
            trace_samples: trace_report.samples.len(),
            trace_skipped: trace_report.skipped,
            growth_per_halving: growth,
            levels,
        },
        verdict: Verdict { status, reasons },
    })
}

/// Spacings `h·2^k, …, 2h, h` for `k` refinements ending at `h`.
pub fn refinement_levels(h: f64, k: usize) -> Vec<f64> {
    (0..=k).rev().map(|j| h * 2f64.powi(j as i32)).collect()
}
