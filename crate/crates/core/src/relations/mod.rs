//! The registry of order-of-magnitude relations and their checking.

mod expr;
mod registry;
mod report;

use thiserror::Error;

pub use expr::{parse_expression, EvalError, Expression, ParseError, UnaryFn, MAX_DEPTH};
pub use registry::{
    builtin_registry, check_relation, parse_relation_file, parse_relation_line, run_registry,
    run_relations, CheckResult, DimensionPolicy, Relation,
};
pub use report::{Report, Summary, CSV_HEADER};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RelationError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown relation id {0}")]
    UnknownId(String),
    #[error("tolerance for {0} must be a non-negative number")]
    BadTolerance(String),
}
