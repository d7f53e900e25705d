//! Shared fixtures for the criterion benchmarks.

use linefield::geometry::{ClosedCurve, DomainSpec, Vec2};

/// Annulus of core radius 1 and half-width 0.4.
pub fn annulus() -> DomainSpec {
    DomainSpec::tubular(ClosedCurve::circle(Vec2::ZERO, 1.0).unwrap(), 0.4).unwrap()
}

/// Tube around an ellipse with semi-axes 1.2 and 1.
pub fn ellipse_tube() -> DomainSpec {
    DomainSpec::tubular(ClosedCurve::ellipse(Vec2::ZERO, 1.2, 1.0).unwrap(), 0.3).unwrap()
}
