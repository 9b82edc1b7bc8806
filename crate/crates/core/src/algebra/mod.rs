//! Interpretations and instances of the structure.
//!
//! An [`Algebra`] assigns to every multi-arrow `a₁, …, aₙ → a` an operation
//! from the carriers of the `aᵢ` to the carrier of `a`. Whether the
//! assignment respects identities and composition is checked by
//! [`check_functor_laws`](crate::laws::check_functor_laws), never assumed.

mod dataflow;
mod instance;
mod mass;

use thiserror::Error;

use crate::error::StructureError;
use crate::structure::{BoxShape, MultiArrow};

pub use dataflow::{dataflow_algebra, Behavior, DataflowAlgebra, Valuation};
pub use instance::{instance_eval, instance_new, Instance, Usage, UsageTable};
pub use mass::{mass_algebra, MassAlgebra, MassAssignment, MassVariant, MASS_TOLERANCE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("no operation assigned to arrow {0}")]
    MissingAction(String),
    #[error("no mass assigned to {0}")]
    MissingMass(String),
    #[error("mass of {what} must be {bound}, got {value}")]
    InvalidMass {
        what: String,
        bound: &'static str,
        value: f64,
    },
    #[error("no sample values for box {0}")]
    MissingSample(String),
    #[error("arrow {arrow} takes {expected} arguments, got {found}")]
    Arity {
        arrow: String,
        expected: usize,
        found: usize,
    },
    #[error("dependency cycle through {0:?}; this arrow has a feedback path")]
    CyclicDependency(Vec<String>),
    #[error("port {0} receives no value and has no default")]
    UnderdeterminedPort(String),
    #[error("port {port} receives conflicting values {values:?}")]
    AmbiguousConvergence { port: String, values: Vec<i64> },
    #[error("behavior of {box_id} is undefined on {input}")]
    UndefinedInput { box_id: String, input: String },
    #[error("unknown arrow {0}")]
    UnknownArrow(String),
    #[error("value {value:?} is not a usage of {box_id}")]
    ArgOutOfSet { value: String, box_id: String },
    #[error("usage function of {arrow} is not total: missing {missing:?}")]
    NotTotal { arrow: String, missing: Vec<String> },
}

/// An assignment of carriers to boxes and operations to arrows.
pub trait Algebra {
    type Value: Clone + std::fmt::Debug;

    /// Applies the operation of `arrow` to one value per constituent.
    fn act(&self, arrow: &MultiArrow, args: &[Self::Value]) -> Result<Self::Value, AlgebraError>;

    /// Equality on the carrier of `b`.
    fn same(&self, b: &BoxShape, x: &Self::Value, y: &Self::Value) -> bool;
}

pub(crate) fn check_arity<T>(arrow: &MultiArrow, args: &[T]) -> Result<(), AlgebraError> {
    if args.len() != arrow.arity() {
        return Err(AlgebraError::Arity {
            arrow: arrow.name().to_string(),
            expected: arrow.arity(),
            found: args.len(),
        });
    }
    Ok(())
}

/// True for `1_a` viewed as a unary multi-arrow.
pub fn is_identity(arrow: &MultiArrow) -> bool {
    arrow.arity() == 1
        && arrow.domains()[0] == *arrow.codomain()
        && *arrow.body() == crate::structure::MatArrow::identity(arrow.codomain())
}
