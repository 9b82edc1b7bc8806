//! Boxes, wiring arrows and the registry that scopes their uniqueness rules.
//!
//! A [`BoxShape`] is an interface: disjoint sets of input and output ports.
//! A [`WiringArrow`] `b → a` says how the composite box `a` is built from
//! the constituent box `b`. [`MatArrow`] is the same arrow as a pair of
//! matrices over [`Lang`](crate::semiring::Lang); composition happens there.

mod arrow;
mod mat_arrow;
mod multi;
mod registry;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{IdentError, StructureError};
use crate::semiring::{check_token, WORD_SEPARATOR};

pub use arrow::{arrow_identity, arrow_new, tensor_arrow, Link, LinkMap, WiringArrow};
pub use mat_arrow::{compose, compose_blocks, from_mat, to_mat, CompositionBlocks, Group, MatArrow, Slot};
pub use multi::{multi_arrow, multi_compose, symmetry_apply, MultiArrow};
pub use registry::{clone_with_rename, freshen, MultiArrowDecl, Registry};

/// Joins component box ids in the id of a tensor product.
pub const TENSOR_SEPARATOR: char = '*';

const RESERVED: &[char] = &[WORD_SEPARATOR, TENSOR_SEPARATOR, ',', '='];

/// Identifier of a port. Ports are unique across a whole registry.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PortId(String);

impl PortId {
    pub fn new(id: impl Into<String>) -> Result<Self, IdentError> {
        let id = id.into();
        check_token(&id, RESERVED)?;
        Ok(PortId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for PortId {
    type Error = IdentError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        PortId::new(value)
    }
}

impl From<PortId> for String {
    fn from(p: PortId) -> String {
        p.0
    }
}

impl fmt::Display for PortId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for PortId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Checks a box id: a token without the reserved characters.
pub fn check_box_id(id: &str) -> Result<(), IdentError> {
    check_token(id, RESERVED)
}

/// Shorthand for building port sets in tests and examples.
pub fn ports<'a>(names: impl IntoIterator<Item = &'a str>) -> Result<BTreeSet<PortId>, IdentError> {
    names.into_iter().map(PortId::new).collect()
}

/// An object of the structure: a box with input and output ports.
///
/// The id of a tensor product lists its components, sorted and joined by
/// `*`, so that `⊗` is literally associative and commutative.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoxShape {
    id: String,
    in_ports: BTreeSet<PortId>,
    out_ports: BTreeSet<PortId>,
}

impl BoxShape {
    pub fn new(
        id: impl Into<String>,
        in_ports: BTreeSet<PortId>,
        out_ports: BTreeSet<PortId>,
    ) -> Result<Self, StructureError> {
        let id = id.into();
        check_box_id(&id)?;
        if let Some(p) = in_ports.intersection(&out_ports).next() {
            return Err(StructureError::InOutOverlap {
                box_id: id,
                port: p.to_string(),
            });
        }
        Ok(BoxShape {
            id,
            in_ports,
            out_ports,
        })
    }

    /// The unit `I = (∅, ∅)`.
    pub fn unit() -> Self {
        BoxShape {
            id: "I".to_string(),
            in_ports: BTreeSet::new(),
            out_ports: BTreeSet::new(),
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn in_ports(&self) -> &BTreeSet<PortId> {
        &self.in_ports
    }

    pub fn out_ports(&self) -> &BTreeSet<PortId> {
        &self.out_ports
    }

    pub fn has_no_ports(&self) -> bool {
        self.in_ports.is_empty() && self.out_ports.is_empty()
    }

    pub fn all_ports(&self) -> impl Iterator<Item = &PortId> {
        self.in_ports.iter().chain(self.out_ports.iter())
    }

    pub fn has_port(&self, p: &PortId) -> bool {
        self.in_ports.contains(p) || self.out_ports.contains(p)
    }

    /// Ids of the atomic boxes this box is a tensor of.
    pub fn components(&self) -> Vec<&str> {
        if self.has_no_ports() {
            return Vec::new();
        }
        self.id.split(TENSOR_SEPARATOR).collect()
    }

    /// Same ports, ignoring the id.
    pub fn same_interface(&self, other: &BoxShape) -> bool {
        self.in_ports == other.in_ports && self.out_ports == other.out_ports
    }
}

impl fmt::Display for BoxShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |s: &BTreeSet<PortId>| s.iter().map(PortId::as_str).collect::<Vec<_>>().join(",");
        write!(
            f,
            "{}({{{}}},{{{}}})",
            self.id,
            join(&self.in_ports),
            join(&self.out_ports)
        )
    }
}

impl fmt::Debug for BoxShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `X₁ ⊗ X₂`: union of the port sets.
///
/// A portless operand is absorbed, and a box tensored with itself is
/// returned unchanged. Two portless boxes other than `I` keep the one with
/// the smaller id, which keeps `⊗` literally associative and commutative.
pub fn tensor_box(x1: &BoxShape, x2: &BoxShape) -> BoxShape {
    match (x1.has_no_ports(), x2.has_no_ports()) {
        (true, true) if x1.id == "I" => return x2.clone(),
        (true, true) if x2.id == "I" => return x1.clone(),
        (true, true) => return x1.min(x2).clone(),
        (true, false) => return x2.clone(),
        (false, true) => return x1.clone(),
        (false, false) if x1 == x2 => return x1.clone(),
        (false, false) => {}
    }
    let ids: BTreeSet<&str> = x1.components().into_iter().chain(x2.components()).collect();
    BoxShape {
        id: ids.into_iter().collect::<Vec<_>>().join(&TENSOR_SEPARATOR.to_string()),
        in_ports: x1.in_ports.union(&x2.in_ports).cloned().collect(),
        out_ports: x1.out_ports.union(&x2.out_ports).cloned().collect(),
    }
}

/// Tensor of a sequence of boxes; the empty sequence gives the unit.
pub fn tensor_all<'a>(boxes: impl IntoIterator<Item = &'a BoxShape>) -> BoxShape {
    boxes.into_iter().fold(BoxShape::unit(), |acc, b| tensor_box(&acc, b))
}
