use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::grid::{divergence_tensor, lp_norm_pow, DivergenceMode};
use crate::patterns::LineField;

/// `∫ |div P|^p` over one annulus `ε < |x − c| < R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusNorm {
    pub eps: f64,
    pub value: f64,
    pub cells: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormTable {
    pub center: Vec2,
    pub outer_radius: f64,
    pub p: f64,
    pub rows: Vec<AnnulusNorm>,
    /// Least-squares slope of the values against `ln(1/ε)`; `None` with fewer than two radii.
    pub log_slope: Option<f64>,
}

/// `∫_{ε<|x−c|<R} |div P|^p dx` for each `ε`, with the interior divergence
/// restricted to cells whose centers lie in the annulus.
pub fn annular_norms(field: &LineField, center: Vec2, outer: f64, p: f64, eps: &[f64]) -> Result<NormTable> {
    if eps.is_empty() {
        return Err(Error::InvalidArgument("empty list of inner radii".into()));
    }
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!("exponent p must be a finite number ≥ 1, got {p}")));
    }
    if let Some(&bad) = eps.iter().find(|&&e| !(e > 0.0 && e < outer)) {
        return Err(Error::InvalidArgument(format!(
            "inner radius {bad} is not in (0, {outer})"
        )));
    }
    let lat = field.lattice();
    let div = divergence_tensor(&field.to_tensor(), DivergenceMode::Interior)?;
    let mut rows = Vec::with_capacity(eps.len());
    for &e in eps {
        let region: Vec<bool> = (0..lat.len())
            .map(|i| {
                let r = lat.center(i).distance(center);
                r > e && r < outer
            })
            .collect();
        let cells = region.iter().zip(field.mask()).filter(|(a, b)| **a && **b).count();
        let value = match lp_norm_pow(&div, p, Some(&region)) {
            Ok(v) => v,
            Err(Error::ZeroMeasure) => 0.0,
            Err(err) => return Err(err),
        };
        rows.push(AnnulusNorm { eps: e, value, cells });
    }
    let log_slope = log_slope(&rows);
    Ok(NormTable {
        center,
        outer_radius: outer,
        p,
        rows,
        log_slope,
    })
}

fn log_slope(rows: &[AnnulusNorm]) -> Option<f64> {
    if rows.len() < 2 {
        return None;
    }
    let n = rows.len() as f64;
    let xs: Vec<f64> = rows.iter().map(|r| (1.0 / r.eps).ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = rows.iter().map(|r| r.value).sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(rows).map(|(x, r)| (x - mx) * (r.value - my)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ClosedCurve, DomainSpec};
    use crate::grid::rasterize;
    use crate::patterns::vortex_field;
    use std::f64::consts::PI;

    #[test]
    fn vortex_l2_grows_like_two_pi_log() {
        let disk = DomainSpec::raw(ClosedCurve::circle(Vec2::ZERO, 1.05).unwrap(), vec![]);
        let grid = rasterize(&disk, 1.0 / 256.0).unwrap();
        let f = vortex_field(&grid, Vec2::ZERO, 1.0).unwrap().forget_orientation();
        let eps = [0.2, 0.1, 0.05, 0.025];
        let t = annular_norms(&f, Vec2::ZERO, 1.0, 2.0, &eps).unwrap();
        for row in &t.rows {
            let oracle = 2.0 * PI * (1.0 / row.eps).ln();
            assert!((row.value / oracle - 1.0).abs() < 0.05, "{row:?} vs {oracle}");
        }
        let slope = t.log_slope.unwrap();
        assert!((slope / (2.0 * PI) - 1.0).abs() < 0.05, "slope {slope}");
        // p = 1 stays below 2π(1 − ε)
        let t1 = annular_norms(&f, Vec2::ZERO, 1.0, 1.0, &[0.1, 0.01]).unwrap();
        assert!(t1.rows.iter().all(|r| r.value < 2.0 * PI * 1.05));
    }

    #[test]
    fn bad_arguments() {
        let disk = DomainSpec::raw(ClosedCurve::circle(Vec2::ZERO, 1.0).unwrap(), vec![]);
        let grid = rasterize(&disk, 1.0 / 16.0).unwrap();
        let f = crate::patterns::constant_field(&grid, 0.0);
        assert!(annular_norms(&f, Vec2::ZERO, 1.0, 2.0, &[]).is_err());
        assert!(annular_norms(&f, Vec2::ZERO, 1.0, 0.5, &[0.1]).is_err());
        assert!(annular_norms(&f, Vec2::ZERO, 1.0, 2.0, &[1.5]).is_err());
    }
}
