//! Closed curves, domains, signed distance and normal-ray tracing.

mod curve;
mod domain;
mod rays;
mod spline;
mod vec2;

pub use curve::{arclength_reparam, ClosedCurve, CurvePoint, FourierCurve, Foot, ParamCurve};
pub use domain::{
    signed_distance, validate_tubular_spec, BoundaryQuery, BoundarySample, CurvatureReport,
    DomainMode, DomainSpec,
};
pub use rays::{class_a_test, class_a_test_with_step, normal_ray_trace, ClassAResult, RayResult};
pub use spline::PeriodicSpline;
pub use vec2::Vec2;
