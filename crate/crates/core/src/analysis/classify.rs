use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{class_a_test_with_step, normal_ray_trace, DomainSpec, RayResult, Vec2};
use crate::grid::RasterGrid;

/// Largest coefficient of variation of `T` accepted as constant.
pub const CV_THRESHOLD: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TStats {
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    /// `std / mean`.
    pub cv: f64,
    pub samples: usize,
}

impl TStats {
    pub fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self::default();
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = (values.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / n).sqrt();
        Self {
            mean,
            std,
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            cv: if mean > 0.0 { std / mean } else { f64::INFINITY },
            samples: values.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FailureReason {
    /// Two normal segments meet inside Ω.
    ClassA { y: Vec2, z: Vec2 },
    /// `∂Ω` does not have exactly two components.
    ComponentCount { found: usize },
    /// `T` varies along the outer component.
    NonConstantT { cv: f64 },
}

impl std::fmt::Display for FailureReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FailureReason::ClassA { y, z } => write!(
                f,
                "class-A witness: normals from ({:.6}, {:.6}) and ({:.6}, {:.6}) meet inside the domain",
                y.x, y.y, z.x, z.y
            ),
            FailureReason::ComponentCount { found } => {
                write!(f, "boundary has {found} components, a tube has 2")
            }
            FailureReason::NonConstantT { cv } => write!(
                f,
                "T is not constant: coefficient of variation {:.2}% exceeds {:.0}%",
                100.0 * cv,
                100.0 * CV_THRESHOLD
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TubularityVerdict {
    pub is_tubular: bool,
    #[serde(rename = "T_stats")]
    pub t_stats: TStats,
    pub components: usize,
    /// Reconstructed core curve `x − (T(x)/2) n(x)` over the outer samples.
    pub gamma: Option<Vec<Vec2>>,
    /// Reconstructed half-width `mean T / 2`.
    pub delta: Option<f64>,
    #[serde(rename = "reason")]
    pub reasons: Vec<FailureReason>,
}

/// Decides whether Ω is a tube from its boundary alone.
///
/// Counts boundary components on `grid`, runs the class-𝒜 test with `n`
/// normals per component, traces `T(x)` from `n` points of the outer
/// component, and accepts when there are two components, no class-𝒜 witness
/// and `T` is constant up to [`CV_THRESHOLD`].
pub fn classify_domain(spec: &DomainSpec, grid: &RasterGrid, n: usize) -> Result<TubularityVerdict> {
    if n < 64 {
        return Err(Error::InvalidArgument(format!("classification needs at least 64 samples, got {n}")));
    }
    let h = grid.h();
    let components = grid.components().len();
    let class_a = class_a_test_with_step(spec, n, h)?;

    let outer = spec.boundary_samples(0, n, 0.0);
    let rays: Vec<RayResult> = outer
        .par_iter()
        .map(|b| normal_ray_trace(spec, b.point, -b.normal, h))
        .collect::<Result<_>>()?;
    let t: Vec<f64> = rays.iter().map(|r| r.t_exit).collect();
    let t_stats = TStats::of(&t);

    let mut reasons = Vec::new();
    if let Some((y, z)) = class_a.witness.filter(|_| class_a.is_class_a) {
        reasons.push(FailureReason::ClassA { y, z });
    }
    if components != 2 {
        reasons.push(FailureReason::ComponentCount { found: components });
    }
    if !(t_stats.cv < CV_THRESHOLD) {
        reasons.push(FailureReason::NonConstantT { cv: t_stats.cv });
    }
    let is_tubular = reasons.is_empty();
    let (gamma, delta) = if is_tubular {
        let gamma = outer
            .iter()
            .zip(&t)
            .map(|(b, &tx)| b.point - b.normal * (0.5 * tx))
            .collect();
        (Some(gamma), Some(0.5 * t_stats.mean))
    } else {
        (None, None)
    };
    Ok(TubularityVerdict {
        is_tubular,
        t_stats,
        components,
        gamma,
        delta,
        reasons,
    })
}
