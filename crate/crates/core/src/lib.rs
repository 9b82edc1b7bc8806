//! Compositional modeling kernel.
//!
//! Boxes expose input and output ports; a wiring arrow `b → a` describes
//! how box `a` is built from box `b`. Arrows are composed as matrices over
//! the semiring of finite languages of link labels, so every composite link
//! remembers the chain of wires it was made from. Interpretations and
//! instances ([`algebra`]) attach meaning and data to the same structure,
//! and [`io`] exchanges it as JSON and renders it as DOT.

pub mod algebra;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod laws;
pub mod matrix;
pub mod semiring;
pub mod structure;

pub use algebra::{Algebra, AlgebraError};
pub use error::{IdentError, MatrixError, StructureError};
pub use matrix::{PortIndex, SemiringMatrix};
pub use semiring::{Lang, LinkLabel, Word};
pub use structure::{BoxShape, MatArrow, MultiArrow, PortId, Registry, WiringArrow};
