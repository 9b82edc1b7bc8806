use std::collections::{BTreeMap, BTreeSet};

use crate::error::StructureError;
use crate::semiring::{LinkLabel, Word};

use super::arrow::{Link, LinkMap, WiringArrow};
use super::multi::{multi_arrow, MultiArrow};
use super::{check_box_id, BoxShape, PortId};

/// A named view of a registered arrow as a multi-arrow with an explicit
/// constituent order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiArrowDecl {
    pub arrow: String,
    pub domains: Vec<String>,
}

/// The scope in which ports (R1) and link labels (R3) must be unique.
///
/// Mutation needs `&mut`; shared reads are free.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Registry {
    boxes: BTreeMap<String, BoxShape>,
    port_owner: BTreeMap<PortId, String>,
    arrows: BTreeMap<String, WiringArrow>,
    label_owner: BTreeMap<Word, String>,
    multi_arrows: BTreeMap<String, MultiArrowDecl>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an atomic box. Its ports must be new to the registry.
    pub fn box_new(
        &mut self,
        id: &str,
        in_ports: BTreeSet<PortId>,
        out_ports: BTreeSet<PortId>,
    ) -> Result<BoxShape, StructureError> {
        let b = BoxShape::new(id, in_ports, out_ports)?;
        self.insert_box(b.clone())?;
        Ok(b)
    }

    pub fn insert_box(&mut self, b: BoxShape) -> Result<(), StructureError> {
        check_box_id(b.id())?;
        if self.boxes.contains_key(b.id()) {
            return Err(StructureError::DuplicateBox(b.id().to_string()));
        }
        for p in b.all_ports() {
            if let Some(owner) = self.port_owner.get(p) {
                return Err(StructureError::PortCollision {
                    box_id: b.id().to_string(),
                    port: p.to_string(),
                    owner: owner.clone(),
                });
            }
        }
        for p in b.all_ports() {
            self.port_owner.insert(p.clone(), b.id().to_string());
        }
        self.boxes.insert(b.id().to_string(), b);
        Ok(())
    }

    /// Validates and adds an arrow. Both ends must be registered boxes or
    /// tensors of registered boxes, and every label must be new (R3).
    pub fn arrow_new(
        &mut self,
        id: &str,
        domain: &BoxShape,
        codomain: &BoxShape,
        theta_in: LinkMap,
        theta_out: LinkMap,
    ) -> Result<WiringArrow, StructureError> {
        let arrow = WiringArrow::new(domain.clone(), codomain.clone(), theta_in, theta_out)?;
        self.insert_arrow(id, arrow.clone())?;
        Ok(arrow)
    }

    pub fn insert_arrow(&mut self, id: &str, arrow: WiringArrow) -> Result<(), StructureError> {
        check_box_id(id)?;
        if self.arrows.contains_key(id) {
            return Err(StructureError::DuplicateArrow(id.to_string()));
        }
        for b in [arrow.domain(), arrow.codomain()] {
            self.resolve_tensor(b)?;
        }
        for label in arrow.labels() {
            if let Some(owner) = self.label_owner.get(label) {
                return Err(StructureError::LabelCollision {
                    label: label.to_string(),
                    owner: owner.clone(),
                });
            }
        }
        for label in arrow.labels() {
            self.label_owner.insert(label.clone(), id.to_string());
        }
        self.arrows.insert(id.to_string(), arrow);
        Ok(())
    }

    /// Checks that `b` is a registered box or a tensor of registered boxes
    /// with exactly their ports, and returns the components.
    pub fn resolve_tensor(&self, b: &BoxShape) -> Result<Vec<&BoxShape>, StructureError> {
        let parts = b
            .components()
            .into_iter()
            .map(|c| self.get_box(c))
            .collect::<Result<Vec<_>, _>>()?;
        if !super::tensor_all(parts.iter().copied()).same_interface(b) {
            return Err(StructureError::DomainMismatch {
                expected: super::tensor_all(parts.iter().copied()).to_string(),
                found: b.to_string(),
            });
        }
        Ok(parts)
    }

    /// Declares a named constituent order for a registered arrow.
    pub fn declare_multi(&mut self, id: &str, arrow: &str, domains: Vec<String>) -> Result<MultiArrow, StructureError> {
        check_box_id(id)?;
        if self.multi_arrows.contains_key(id) {
            return Err(StructureError::DuplicateArrow(id.to_string()));
        }
        let decl = MultiArrowDecl {
            arrow: arrow.to_string(),
            domains,
        };
        let ma = self.build_multi(id, &decl)?;
        self.multi_arrows.insert(id.to_string(), decl);
        Ok(ma)
    }

    fn build_multi(&self, id: &str, decl: &MultiArrowDecl) -> Result<MultiArrow, StructureError> {
        let wiring = self.get_arrow(&decl.arrow)?;
        let domains = decl
            .domains
            .iter()
            .map(|d| self.get_box(d).cloned())
            .collect::<Result<Vec<_>, _>>()?;
        multi_arrow(id, domains, wiring.codomain(), wiring)
    }

    pub fn get_box(&self, id: &str) -> Result<&BoxShape, StructureError> {
        self.boxes
            .get(id)
            .ok_or_else(|| StructureError::UnknownBox(id.to_string()))
    }

    pub fn get_arrow(&self, id: &str) -> Result<&WiringArrow, StructureError> {
        self.arrows
            .get(id)
            .ok_or_else(|| StructureError::UnknownArrow(id.to_string()))
    }

    pub fn boxes(&self) -> impl Iterator<Item = &BoxShape> {
        self.boxes.values()
    }

    pub fn arrows(&self) -> impl Iterator<Item = (&str, &WiringArrow)> {
        self.arrows.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn multi_decls(&self) -> impl Iterator<Item = (&str, &MultiArrowDecl)> {
        self.multi_arrows.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Box owning `port`, if any.
    pub fn owner_of(&self, port: &PortId) -> Option<&str> {
        self.port_owner.get(port).map(String::as_str)
    }

    /// The arrow `id` as a multi-arrow: a declared multi-arrow of that
    /// name, or else the arrow with its components in id order.
    pub fn multi(&self, id: &str) -> Result<MultiArrow, StructureError> {
        if let Some(decl) = self.multi_arrows.get(id) {
            return self.build_multi(id, decl);
        }
        let wiring = self.get_arrow(id)?;
        let domains = self.resolve_tensor(wiring.domain())?.into_iter().cloned().collect();
        multi_arrow(id, domains, wiring.codomain(), wiring)
    }

    /// Every declared multi-arrow, plus the default view of each arrow no
    /// declaration refers to.
    pub fn all_multi(&self) -> Result<Vec<MultiArrow>, StructureError> {
        let declared: BTreeSet<&str> = self.multi_arrows.values().map(|d| d.arrow.as_str()).collect();
        let mut out = Vec::new();
        for id in self.multi_arrows.keys() {
            out.push(self.multi(id)?);
        }
        for id in self.arrows.keys() {
            if !declared.contains(id.as_str()) && !self.multi_arrows.contains_key(id) {
                out.push(self.multi(id)?);
            }
        }
        Ok(out)
    }

    /// Adds every box, arrow and declaration of `other`. Fails on the first
    /// collision; see [`freshen`] to avoid them.
    pub fn merge(&mut self, other: &Registry) -> Result<(), StructureError> {
        for b in other.boxes.values() {
            self.insert_box(b.clone())?;
        }
        for (id, a) in &other.arrows {
            self.insert_arrow(id, a.clone())?;
        }
        for (id, d) in &other.multi_arrows {
            self.declare_multi(id, &d.arrow, d.domains.clone())?;
        }
        Ok(())
    }
}

/// Copy of `b` under a new id, with every port `p` renamed `<new_id>_<p>`.
pub fn clone_with_rename(b: &BoxShape, new_id: &str) -> Result<BoxShape, StructureError> {
    let rename = |ports: &BTreeSet<PortId>| -> Result<BTreeSet<PortId>, StructureError> {
        ports
            .iter()
            .map(|p| PortId::new(format!("{new_id}_{p}")).map_err(Into::into))
            .collect()
    };
    BoxShape::new(new_id, rename(b.in_ports())?, rename(b.out_ports())?)
}

/// Renames every port `p` of box `B` to `B_p` and every atomic label `l`
/// of arrow `A` to `A_l`, so that independently authored registries can be
/// merged. Deterministic: the same input always yields the same names.
pub fn freshen(reg: &Registry) -> Result<Registry, StructureError> {
    let mut port_map: BTreeMap<PortId, PortId> = BTreeMap::new();
    let mut out = Registry::new();
    for b in reg.boxes.values() {
        let fresh = clone_with_rename(b, b.id())?;
        for (old, new) in b.all_ports().zip(fresh.all_ports()) {
            port_map.insert(old.clone(), new.clone());
        }
        out.insert_box(fresh)?;
    }
    let rename_box = |b: &BoxShape| -> Result<BoxShape, StructureError> {
        let parts = reg.resolve_tensor(b)?;
        let fresh = parts
            .into_iter()
            .map(|p| out.get_box(p.id()).cloned())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(super::tensor_all(&fresh))
    };
    let mut arrows = Vec::new();
    for (id, a) in &reg.arrows {
        let relabel = |links: &LinkMap| -> Result<LinkMap, StructureError> {
            links
                .iter()
                .map(|(w, l)| {
                    let word = w
                        .labels()
                        .iter()
                        .map(|x| LinkLabel::new(format!("{id}_{x}")))
                        .collect::<Result<Vec<_>, _>>()?;
                    let link = Link {
                        target: port_map[&l.target].clone(),
                        source: port_map[&l.source].clone(),
                        unit: l.unit,
                    };
                    Ok((Word::from_labels(word), link))
                })
                .collect()
        };
        let arrow = WiringArrow::new(
            rename_box(a.domain())?,
            rename_box(a.codomain())?,
            relabel(a.theta_in())?,
            relabel(a.theta_out())?,
        )?;
        arrows.push((id.clone(), arrow));
    }
    for (id, a) in arrows {
        out.insert_arrow(&id, a)?;
    }
    for (id, d) in &reg.multi_arrows {
        out.declare_multi(id, &d.arrow, d.domains.clone())?;
    }
    Ok(out)
}
