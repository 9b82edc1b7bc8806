use thiserror::Error;

/// Rejected identifier token (box id, port id or link label).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdentError {
    #[error("identifier must not be empty")]
    Empty,
    #[error("identifier {token:?} contains reserved character {ch:?}")]
    ReservedChar { token: String, ch: char },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("dimension mismatch: left has columns [{left}], right has rows [{right}]")]
    DimensionMismatch { left: String, right: String },
    #[error("block ({row}, {col}) does not match its row/column group: {detail}")]
    ShapeMismatch { row: usize, col: usize, detail: String },
    #[error("port {0} appears in more than one group")]
    DuplicatePort(String),
}

/// Violations of the box/arrow rules and failures of the categorical
/// operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("invalid identifier: {0}")]
    Ident(#[from] IdentError),
    #[error("matrix error: {0}")]
    Matrix(#[from] MatrixError),
    #[error("box {box_id}: port {port} is both an input and an output")]
    InOutOverlap { box_id: String, port: String },
    #[error("box {box_id}: port {port} already belongs to box {owner}")]
    PortCollision {
        box_id: String,
        port: String,
        owner: String,
    },
    #[error("box id {0} is already registered")]
    DuplicateBox(String),
    #[error("arrow id {0} is already registered")]
    DuplicateArrow(String),
    #[error("unknown box {0}")]
    UnknownBox(String),
    #[error("unknown arrow {0}")]
    UnknownArrow(String),
    #[error("link {label}: port {port} belongs to neither the domain nor the codomain")]
    UnknownPort { label: String, port: String },
    #[error("link {label}: goes from output {source_port} of the codomain back to its input {target}")]
    FeedbackProhibited {
        label: String,
        source_port: String,
        target: String,
    },
    #[error("link {label}: goes directly from codomain input {source_port} to codomain output {target}")]
    PassthroughProhibited {
        label: String,
        source_port: String,
        target: String,
    },
    #[error("link {label}: {source_port} -> {target} is not an allowed {kind} link")]
    BadEndpoint {
        label: String,
        source_port: String,
        target: String,
        kind: &'static str,
    },
    #[error("link label {0} is used for both an input link and an output link")]
    LinkInOutOverlap(String),
    #[error("link label {label} is already used by arrow {owner}")]
    LabelCollision { label: String, owner: String },
    #[error("cannot compose: codomain of the inner arrow is {inner} but the outer arrow starts at {outer}")]
    CodomainMismatch { inner: String, outer: String },
    #[error("domain mismatch: expected {expected}, found {found}")]
    DomainMismatch { expected: String, found: String },
    #[error("not a permutation of 0..{arity}: {perm:?}")]
    BadPermutation { arity: usize, perm: Vec<usize> },
    #[error("malformed matrix arrow: {0}")]
    MalformedMatrix(String),
}
