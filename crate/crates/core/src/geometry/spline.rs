//! Periodic cubic spline through a closed sequence of planar points.

use super::Vec2;
use crate::error::{Error, Result};

/// Periodic cubic interpolant parameterized by cumulative chord length.
#[derive(Debug, Clone)]
pub struct PeriodicSpline {
    /// Knot parameters, `knots.len() == points.len() + 1`, last entry is the period.
    knots: Vec<f64>,
    points: Vec<Vec2>,
    /// Second derivatives at the knots.
    moments: Vec<Vec2>,
}

impl PeriodicSpline {
    pub fn new(points: &[Vec2]) -> Result<Self> {
        let mut pts = points.to_vec();
        // a repeated closing point is accepted and dropped
        if pts.len() > 1 && pts[0].distance(pts[pts.len() - 1]) < 1e-12 {
            pts.pop();
        }
        let n = pts.len();
        if n < 3 {
            return Err(Error::InvalidCurve(format!(
                "closed polyline needs at least 3 distinct points, got {n}"
            )));
        }
        let mut knots = Vec::with_capacity(n + 1);
        knots.push(0.0);
        for i in 0..n {
            let seg = pts[i].distance(pts[(i + 1) % n]);
            if seg < 1e-12 {
                return Err(Error::InvalidCurve(format!(
                    "zero-length segment between points {i} and {}",
                    (i + 1) % n
                )));
            }
            knots.push(knots[i] + seg);
        }
        let h: Vec<f64> = (0..n).map(|i| knots[i + 1] - knots[i]).collect();

        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs_x = vec![0.0; n];
        let mut rhs_y = vec![0.0; n];
        for i in 0..n {
            let hp = h[(i + n - 1) % n];
            let hn = h[i];
            sub[i] = hp;
            diag[i] = 2.0 * (hp + hn);
            sup[i] = hn;
            let prev = pts[(i + n - 1) % n];
            let next = pts[(i + 1) % n];
            let d = (next - pts[i]) / hn - (pts[i] - prev) / hp;
            rhs_x[i] = 6.0 * d.x;
            rhs_y[i] = 6.0 * d.y;
        }
        let mx = solve_cyclic(&sub, &diag, &sup, &rhs_x);
        let my = solve_cyclic(&sub, &diag, &sup, &rhs_y);
        let moments = mx.into_iter().zip(my).map(|(x, y)| Vec2::new(x, y)).collect();
        Ok(Self {
            knots,
            points: pts,
            moments,
        })
    }

    pub fn period(&self) -> f64 {
        self.knots[self.knots.len() - 1]
    }

    pub fn points(&self) -> &[Vec2] {
        &self.points
    }

    pub fn segment_count(&self) -> usize {
        self.points.len()
    }

    /// Position, first and second derivative at parameter `t` (wrapped periodically).
    pub fn eval(&self, t: f64) -> (Vec2, Vec2, Vec2) {
        let period = self.period();
        let t = t.rem_euclid(period);
        let n = self.points.len();
        let i = match self.knots.binary_search_by(|k| k.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(n - 1),
            Err(i) => i.saturating_sub(1).min(n - 1),
        };
        let j = (i + 1) % n;
        let h = self.knots[i + 1] - self.knots[i];
        let a = self.knots[i + 1] - t;
        let b = t - self.knots[i];
        let (yi, yj) = (self.points[i], self.points[j]);
        let (mi, mj) = (self.moments[i], self.moments[j]);
        let ci = yi / h - mi * (h / 6.0);
        let cj = yj / h - mj * (h / 6.0);
        let p = mi * (a * a * a / (6.0 * h)) + mj * (b * b * b / (6.0 * h)) + ci * a + cj * b;
        let d1 = mj * (b * b / (2.0 * h)) - mi * (a * a / (2.0 * h)) - ci + cj;
        let d2 = mi * (a / h) + mj * (b / h);
        (p, d1, d2)
    }

    pub fn map_points(&self, f: impl Fn(Vec2) -> Vec2) -> Result<Self> {
        let pts: Vec<Vec2> = self.points.iter().map(|&p| f(p)).collect();
        Self::new(&pts)
    }
}

/// Solves a cyclic tridiagonal system (Sherman–Morrison on the Thomas algorithm).
///
/// Row `i` reads `sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i]` with
/// indices taken modulo `n`.
fn solve_cyclic(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let alpha = sup[n - 1]; // A[n-1][0]
    let beta = sub[0]; // A[0][n-1]
    let gamma = -diag[0];
    let mut b = diag.to_vec();
    b[0] -= gamma;
    b[n - 1] -= alpha * beta / gamma;
    let x = solve_tridiagonal(sub, &b, sup, rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = alpha;
    let z = solve_tridiagonal(sub, &b, sup, &u);
    let fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect()
}

fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / m;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_knots() {
        let pts: Vec<Vec2> = (0..12)
            .map(|k| Vec2::from_angle(k as f64 * std::f64::consts::TAU / 12.0) * 2.0)
            .collect();
        let s = PeriodicSpline::new(&pts).unwrap();
        let mut t = 0.0;
        for i in 0..pts.len() {
            let (p, _, _) = s.eval(t);
            assert!(p.distance(pts[i]) < 1e-12);
            t += pts[i].distance(pts[(i + 1) % pts.len()]);
        }
    }

    #[test]
    fn cyclic_solver_matches_dense_product() {
        let n = 7;
        let sub: Vec<f64> = (0..n).map(|i| 0.5 + i as f64 * 0.1).collect();
        let sup: Vec<f64> = (0..n).map(|i| 0.3 + i as f64 * 0.05).collect();
        let diag: Vec<f64> = (0..n).map(|i| 4.0 + i as f64).collect();
        let rhs: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let x = solve_cyclic(&sub, &diag, &sup, &rhs);
        for i in 0..n {
            let r = sub[i] * x[(i + n - 1) % n] + diag[i] * x[i] + sup[i] * x[(i + 1) % n];
            assert!((r - rhs[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_duplicate_points() {
        let pts = [
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0),
        ];
        assert!(matches!(
            PeriodicSpline::new(&pts),
            Err(Error::InvalidCurve(_))
        ));
    }
}
