//! Construction, verification and classification of unoriented eikonal line
//! fields `P div P = 0` on planar domains.

pub mod error;
pub mod geometry;
pub mod grid;
pub mod patterns;
pub mod analysis;
pub mod io;

pub use error::{Error, Result};
