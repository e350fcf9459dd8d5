//! Exact gamma-matrix algebra, the on-shell Dirac operator and the
//! deformed commutator factor.

mod dirac;
mod matrix;

use thiserror::Error;

pub use dirac::{
    determinant_closed_form, determinant_scale, dirac_operator, nullspace_basis,
    nullspace_dimension, onshell_determinant, onshell_trials, random_spatial_momentum,
    snyder_deformation, FourMomentum, OnshellSummary, SpinorVector,
};
pub use matrix::{
    build_dirac_set, build_eq9_set, pauli, signature_string, verify_clifford, CliffordRecord,
    CliffordSet, ComplexMatrix, PairDeviation, Sign,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("Pauli index {0} out of range 1..=3")]
    PauliIndex(usize),
    #[error("matrix is {0}x{1}, not square")]
    NotSquare(usize, usize),
    #[error("matrix entries must be finite")]
    NotFinite,
    #[error("size mismatch within set: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("{matrices} matrices but {metric} metric entries")]
    MetricLength { matrices: usize, metric: usize },
    #[error("metric entry {0} is not +1 or -1")]
    MetricEntry(f64),
    #[error("{0}")]
    Domain(&'static str),
}
