use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("not order preserving: {0}")]
    NotOrderPreserving(String),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("axiom violated: {0}")]
    AxiomViolated(String),
    #[error("nodes are not related in the tree: {0}")]
    NotRelated(String),
    #[error("variant mismatch")]
    VariantMismatch,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("lemma violation: {0}")]
    LemmaViolation(String),
    #[error("unrealizable dense set {spec} below {blocking}")]
    Unrealizable { spec: String, blocking: String },
    #[error("inconsistent filter: {0}")]
    InconsistentFilter(String),
    #[error("parse error at `{path}`: {message}")]
    Parse { path: String, message: String },
}
