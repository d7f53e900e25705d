//! Domain files, field files, reports and raster images.

mod domain;
mod field;
mod raster;
mod report;

pub use domain::{load_domain, parse_domain, DomainFile};
pub use field::{load_field, save_field, sidecar_path, FieldMeta, FIELD_HEADER};
pub use raster::{save_raster_line, save_raster_scalar, line_color};
pub use report::{report_json, round_significant, save_report};
