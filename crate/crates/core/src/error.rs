use thiserror::Error;

use crate::context::TypeSymbol;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown type symbol `{0}`")]
    UnknownType(TypeSymbol),
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("support violation: {0}")]
    SupportViolation(String),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("boundary mismatch: {0}")]
    BoundaryMismatch(String),
    #[error("malformed value: {0}")]
    Malformed(String),
    #[error("model mismatch: {0}")]
    ModelMismatch(String),
    #[error("not an internal relation: {0}")]
    NotInternalRelation(String),
    #[error("not an internal function: {0}")]
    NotFunction(String),
}
