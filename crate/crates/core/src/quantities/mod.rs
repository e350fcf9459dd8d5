//! Dimensional arithmetic over cgs-Gaussian units and the constants table.

mod constants;
mod dimension;
mod quantity;

use num_rational::Rational64;
use thiserror::Error;

pub use constants::{
    parse_constants, ConstantEntry, ConstantsError, ConstantsTable, Provenance, DEFAULT_CONSTANTS,
    REQUIRED_KEYS,
};
pub use dimension::{parse_rational, parse_unit_expr, Dimension, MAX_DENOMINATOR};
pub use quantity::{decade_gap, magnitude_gap, Quantity};

pub(crate) use constants::sha256_hex;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantityError {
    #[error("magnitude overflow")]
    Overflow,
    #[error("magnitude is not a number")]
    NotFinite,
    #[error("non-real result")]
    NonReal,
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch {
        left: Box<Dimension>,
        right: Box<Dimension>,
    },
    #[error("decade gap needs nonzero magnitudes of the same sign")]
    IncomparableSigns,
    #[error("exponent {0} has a denominator above {MAX_DENOMINATOR}")]
    DenominatorTooLarge(Rational64),
}
