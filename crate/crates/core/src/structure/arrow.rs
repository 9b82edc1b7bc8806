use std::collections::BTreeMap;

use crate::error::StructureError;
use crate::semiring::{LinkLabel, Word};

use super::{BoxShape, PortId, Registry};

/// One wire: data flows from `source` into `target`.
///
/// A `unit` link carries the empty word `ε` in matrix form. Identity arrows
/// are made of unit links.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Link {
    pub target: PortId,
    pub source: PortId,
    pub unit: bool,
}

impl Link {
    pub fn new(target: PortId, source: PortId) -> Self {
        Link {
            target,
            source,
            unit: false,
        }
    }

    pub fn unit(target: PortId, source: PortId) -> Self {
        Link {
            target,
            source,
            unit: true,
        }
    }

    /// The matrix entry this link contributes under `label`.
    pub fn word(&self, label: &Word) -> Word {
        if self.unit {
            Word::epsilon()
        } else {
            label.clone()
        }
    }
}

/// Link label → link. Atomic arrows use one-letter words as labels;
/// arrows read back from composed matrices use the composite words.
pub type LinkMap = BTreeMap<Word, Link>;

/// An arrow `domain → codomain` in function form: `θ^in` holds the links
/// entering an input port of the domain, `θ^out` those entering an output
/// port of the codomain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WiringArrow {
    domain: BoxShape,
    codomain: BoxShape,
    theta_in: LinkMap,
    theta_out: LinkMap,
}

enum LinkKind {
    In,
    Out,
}

impl WiringArrow {
    /// Validates and builds an arrow. Registry-wide label freshness is
    /// checked separately by [`Registry::arrow_new`].
    pub fn new(
        domain: BoxShape,
        codomain: BoxShape,
        theta_in: LinkMap,
        theta_out: LinkMap,
    ) -> Result<Self, StructureError> {
        let arrow = WiringArrow {
            domain,
            codomain,
            theta_in,
            theta_out,
        };
        arrow.validate()?;
        Ok(arrow)
    }

    fn validate(&self) -> Result<(), StructureError> {
        for label in self.theta_in.keys().chain(self.theta_out.keys()) {
            if label.is_epsilon() {
                return Err(StructureError::Ident(crate::error::IdentError::Empty));
            }
        }
        if let Some(label) = self.theta_in.keys().find(|l| self.theta_out.contains_key(l)) {
            return Err(StructureError::LinkInOutOverlap(label.to_string()));
        }
        for (label, link) in &self.theta_in {
            self.check_link(label, link, LinkKind::In)?;
        }
        for (label, link) in &self.theta_out {
            self.check_link(label, link, LinkKind::Out)?;
        }
        Ok(())
    }

    fn check_link(&self, label: &Word, link: &Link, kind: LinkKind) -> Result<(), StructureError> {
        let (b, a) = (&self.domain, &self.codomain);
        let (t, s) = (&link.target, &link.source);
        let allowed = match kind {
            LinkKind::In => b.in_ports().contains(t) && (b.out_ports().contains(s) || a.in_ports().contains(s)),
            LinkKind::Out => a.out_ports().contains(t) && b.out_ports().contains(s),
        };
        if allowed {
            return Ok(());
        }
        let label = label.to_string();
        for p in [t, s] {
            if !a.has_port(p) && !b.has_port(p) {
                return Err(StructureError::UnknownPort {
                    label,
                    port: p.to_string(),
                });
            }
        }
        let (source_port, target) = (s.to_string(), t.to_string());
        if a.out_ports().contains(s) && a.in_ports().contains(t) {
            return Err(StructureError::FeedbackProhibited {
                label,
                source_port,
                target,
            });
        }
        if a.in_ports().contains(s) && a.out_ports().contains(t) {
            return Err(StructureError::PassthroughProhibited {
                label,
                source_port,
                target,
            });
        }
        Err(StructureError::BadEndpoint {
            label,
            source_port,
            target,
            kind: match kind {
                LinkKind::In => "input",
                LinkKind::Out => "output",
            },
        })
    }

    pub fn domain(&self) -> &BoxShape {
        &self.domain
    }

    pub fn codomain(&self) -> &BoxShape {
        &self.codomain
    }

    pub fn theta_in(&self) -> &LinkMap {
        &self.theta_in
    }

    pub fn theta_out(&self) -> &LinkMap {
        &self.theta_out
    }

    /// All link labels, `L^in ∪ L^out`.
    pub fn labels(&self) -> impl Iterator<Item = &Word> {
        self.theta_in.keys().chain(self.theta_out.keys())
    }

    /// Every link with its label, input links first.
    pub fn links(&self) -> impl Iterator<Item = (&Word, &Link)> {
        self.theta_in.iter().chain(self.theta_out.iter())
    }

    pub fn is_empty(&self) -> bool {
        self.theta_in.is_empty() && self.theta_out.is_empty()
    }
}

/// Registers a new arrow in `registry`.
pub fn arrow_new(
    registry: &mut Registry,
    id: &str,
    domain: &BoxShape,
    codomain: &BoxShape,
    theta_in: LinkMap,
    theta_out: LinkMap,
) -> Result<WiringArrow, StructureError> {
    registry.arrow_new(id, domain, codomain, theta_in, theta_out)
}

/// Label of the identity link on `port` of box `box_id`.
pub(crate) fn identity_label(box_id: &str, dir: &str, port: &PortId) -> Word {
    let label =
        LinkLabel::new(format!("{box_id}_{dir}_{port}")).expect("box and port ids never contain the word separator");
    Word::atom(label)
}

/// `1_a`: one unit link per port, connecting it to itself.
pub fn arrow_identity(b: &BoxShape) -> WiringArrow {
    let theta_in = b
        .in_ports()
        .iter()
        .map(|p| (identity_label(b.id(), "lin", p), Link::unit(p.clone(), p.clone())))
        .collect();
    let theta_out = b
        .out_ports()
        .iter()
        .map(|p| (identity_label(b.id(), "lout", p), Link::unit(p.clone(), p.clone())))
        .collect();
    WiringArrow {
        domain: b.clone(),
        codomain: b.clone(),
        theta_in,
        theta_out,
    }
}

/// `θ₁ ⊗ θ₂ := θ₁ ∪ θ₂` on tensored boxes.
pub fn tensor_arrow(t1: &WiringArrow, t2: &WiringArrow) -> Result<WiringArrow, StructureError> {
    let merge = |a: &LinkMap, b: &LinkMap| -> Result<LinkMap, StructureError> {
        let mut out = a.clone();
        for (label, link) in b {
            match out.get(label) {
                Some(existing) if existing != link => {
                    return Err(StructureError::LabelCollision {
                        label: label.to_string(),
                        owner: "left operand".to_string(),
                    })
                }
                _ => {
                    out.insert(label.clone(), link.clone());
                }
            }
        }
        Ok(out)
    };
    WiringArrow::new(
        super::tensor_box(&t1.domain, &t2.domain),
        super::tensor_box(&t1.codomain, &t2.codomain),
        merge(&t1.theta_in, &t2.theta_in)?,
        merge(&t1.theta_out, &t2.theta_out)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{ports, tensor_box};

    fn bx(id: &str, ins: &[&str], outs: &[&str]) -> BoxShape {
        BoxShape::new(
            id,
            ports(ins.iter().copied()).unwrap(),
            ports(outs.iter().copied()).unwrap(),
        )
        .unwrap()
    }

    fn links(spec: &[(&str, &str, &str)]) -> LinkMap {
        spec.iter()
            .map(|(l, t, s)| {
                (
                    l.parse().unwrap(),
                    Link::new(PortId::new(*t).unwrap(), PortId::new(*s).unwrap()),
                )
            })
            .collect()
    }

    fn self_loop() -> (BoxShape, BoxShape) {
        (bx("X", &["a", "b"], &["c", "d"]), bx("Z", &["i", "j"], &["k", "l"]))
    }

    #[test]
    fn self_loop_arrow_is_valid() {
        let (x, z) = self_loop();
        let arrow = WiringArrow::new(
            x,
            z,
            links(&[("l1", "a", "c"), ("l2", "b", "i"), ("l3", "b", "j")]),
            links(&[("l4", "k", "c"), ("l5", "l", "d")]),
        )
        .unwrap();
        assert_eq!(arrow.labels().count(), 5);
    }

    #[test]
    fn rejects_feedback_on_codomain() {
        let (x, z) = self_loop();
        let err = WiringArrow::new(x, z, links(&[("l1", "i", "k")]), LinkMap::new()).unwrap_err();
        assert!(matches!(err, StructureError::FeedbackProhibited { .. }), "{err}");
    }

    #[test]
    fn rejects_passthrough() {
        let (x, z) = self_loop();
        let err = WiringArrow::new(x.clone(), z.clone(), LinkMap::new(), links(&[("l1", "k", "i")])).unwrap_err();
        assert!(matches!(err, StructureError::PassthroughProhibited { .. }), "{err}");
        let err = WiringArrow::new(x, z, links(&[("l1", "k", "i")]), LinkMap::new()).unwrap_err();
        assert!(matches!(err, StructureError::PassthroughProhibited { .. }), "{err}");
    }

    #[test]
    fn rejects_in_out_label_overlap() {
        let (x, z) = self_loop();
        let err = WiringArrow::new(x, z, links(&[("l1", "a", "c")]), links(&[("l1", "k", "c")])).unwrap_err();
        assert_eq!(err, StructureError::LinkInOutOverlap("l1".into()));
    }

    #[test]
    fn rejects_unknown_and_bad_endpoints() {
        let (x, z) = self_loop();
        let err = WiringArrow::new(x.clone(), z.clone(), links(&[("l1", "a", "q")]), LinkMap::new()).unwrap_err();
        assert!(matches!(err, StructureError::UnknownPort { .. }));
        // output link whose source is a domain input
        let err = WiringArrow::new(x.clone(), z.clone(), LinkMap::new(), links(&[("l1", "k", "a")])).unwrap_err();
        assert!(
            matches!(err, StructureError::BadEndpoint { kind: "output", .. }),
            "{err}"
        );
        // input link targeting a domain output
        let err = WiringArrow::new(x, z, links(&[("l1", "c", "i")]), LinkMap::new()).unwrap_err();
        assert!(
            matches!(err, StructureError::BadEndpoint { kind: "input", .. }),
            "{err}"
        );
    }

    #[test]
    fn parallel_and_unconnected_links_are_fine() {
        let (x, z) = self_loop();
        WiringArrow::new(
            x,
            z,
            links(&[("l1", "a", "i"), ("l2", "a", "i"), ("l3", "b", "i")]),
            LinkMap::new(),
        )
        .unwrap();
    }

    #[test]
    fn identity_links() {
        let (x, _) = self_loop();
        let id = arrow_identity(&x);
        let labels: Vec<String> = id.labels().map(ToString::to_string).collect();
        assert_eq!(labels, vec!["X_lin_a", "X_lin_b", "X_lout_c", "X_lout_d"]);
        assert!(id.links().all(|(_, l)| l.unit && l.source == l.target));
        assert!(arrow_identity(&BoxShape::unit()).is_empty());
    }

    #[test]
    fn tensor_with_self_and_unit() {
        let (x, z) = self_loop();
        let t = WiringArrow::new(x, z, links(&[("l1", "a", "c")]), links(&[("l4", "k", "c")])).unwrap();
        assert_eq!(tensor_arrow(&t, &t).unwrap(), t);
        assert_eq!(tensor_arrow(&t, &arrow_identity(&BoxShape::unit())).unwrap(), t);

        let y = bx("Y", &["p"], &["q"]);
        let w = bx("W", &["r"], &["s"]);
        let u = WiringArrow::new(
            y.clone(),
            w.clone(),
            links(&[("m1", "p", "r")]),
            links(&[("m2", "s", "q")]),
        )
        .unwrap();
        let tu = tensor_arrow(&t, &u).unwrap();
        assert_eq!(tu.domain(), &tensor_box(t.domain(), &y));
        assert_eq!(tu.codomain(), &tensor_box(t.codomain(), &w));
        assert_eq!(tu.labels().count(), 4);
    }
}
