use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::ScalarField;

/// `(½ − a)² + b²`, equal to ¼ whenever `b² = a(1 − a)`.
#[inline]
pub fn recovery_determinant(a: f64, b: f64) -> f64 {
    (0.5 - a) * (0.5 - a) + b * b
}

/// Tolerance on `b² = a(1 − a)` before the inputs are rejected.
pub const PROJECTION_TOLERANCE: f64 = 1e-6;
/// Tolerance on the determinant identity.
pub const DETERMINANT_TOLERANCE: f64 = 1e-9;

/// Solves, per cell,
///
/// ```text
/// (½ − a) a₁ − b a₂ = r₁ − a f
///  b a₁ + (½ − a) a₂ = r₂ + (a − 1) g
/// ```
///
/// for `(a₁, a₂) = ∇a`, where `(f, g) = div P` and `r = P div P`. Solutions
/// have `r = 0`, which is [`gradient_recovery`].
pub fn gradient_recovery_general(
    a: &ScalarField,
    b: &ScalarField,
    f: &ScalarField,
    g: &ScalarField,
    residual: Option<(&ScalarField, &ScalarField)>,
) -> Result<(ScalarField, ScalarField)> {
    let lat = *a.lattice();
    let fields = [b, f, g];
    if fields.iter().any(|x| x.lattice() != &lat)
        || residual.is_some_and(|(r1, r2)| r1.lattice() != &lat || r2.lattice() != &lat)
    {
        return Err(Error::InvalidArgument("fields live on different lattices".into()));
    }
    let mask: Vec<bool> = (0..lat.len())
        .map(|i| {
            fields.iter().all(|x| x.is_defined(i))
                && a.is_defined(i)
                && residual.map_or(true, |(r1, r2)| r1.is_defined(i) && r2.is_defined(i))
        })
        .collect();
    let solved: Vec<Result<(f64, f64)>> = (0..lat.len())
        .into_par_iter()
        .map(|i| {
            if !mask[i] {
                return Ok((0.0, 0.0));
            }
            let (av, bv) = (a.value(i), b.value(i));
            let defect = (bv * bv - av * (1.0 - av)).abs();
            if !(defect <= PROJECTION_TOLERANCE) {
                return Err(Error::InvalidProjection { cell: i, defect });
            }
            let det = recovery_determinant(av, bv);
            if !((det - 0.25).abs() <= DETERMINANT_TOLERANCE) {
                return Err(Error::InvalidProjection {
                    cell: i,
                    defect: (det - 0.25).abs(),
                });
            }
            let (r1, r2) = residual.map_or((0.0, 0.0), |(x, y)| (x.value(i), y.value(i)));
            let rhs1 = r1 - av * f.value(i);
            let rhs2 = r2 + (av - 1.0) * g.value(i);
            let d = 0.5 - av;
            Ok(((d * rhs1 + bv * rhs2) / det, (d * rhs2 - bv * rhs1) / det))
        })
        .collect();
    let solved = solved.into_iter().collect::<Result<Vec<_>>>()?;
    let a1 = ScalarField::new(lat, mask.clone(), solved.iter().map(|s| s.0).collect())?;
    let a2 = ScalarField::new(lat, mask, solved.iter().map(|s| s.1).collect())?;
    Ok((a1, a2))
}

/// Recovers `∇a` from `(a, b)` and `div P = (f, g)` for a solution of `P div P = 0`.
pub fn gradient_recovery(
    a: &ScalarField,
    b: &ScalarField,
    f: &ScalarField,
    g: &ScalarField,
) -> Result<(ScalarField, ScalarField)> {
    gradient_recovery_general(a, b, f, g, None)
}
