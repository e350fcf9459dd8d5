//! Order-of-magnitude relation checking, gamma-matrix verification and a
//! fluctuational particle-creation simulator in cgs-Gaussian units.

pub mod algebra;
pub mod cli;
pub mod cosmology;
pub mod particles;
pub mod quantities;
pub mod relations;

mod fields;
