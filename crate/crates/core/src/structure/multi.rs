use crate::error::StructureError;

use super::mat_arrow::{compose, to_mat, MatArrow};
use super::{tensor_all, BoxShape, WiringArrow};

/// An arrow `a₁, …, aₙ → a`: a matrix arrow out of `a₁ ⊗ … ⊗ aₙ` together
/// with the ordered list of constituents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiArrow {
    name: String,
    domains: Vec<BoxShape>,
    body: MatArrow,
}

impl MultiArrow {
    /// Checks that `body` starts at the tensor of `domains`.
    pub fn from_body(name: impl Into<String>, domains: Vec<BoxShape>, body: MatArrow) -> Result<Self, StructureError> {
        let tensor = tensor_all(&domains);
        if !tensor.same_interface(body.domain()) {
            return Err(StructureError::DomainMismatch {
                expected: body.domain().to_string(),
                found: tensor.to_string(),
            });
        }
        Ok(MultiArrow {
            name: name.into(),
            domains,
            body,
        })
    }

    /// `1_a` as a unary arrow.
    pub fn identity(a: &BoxShape) -> Self {
        MultiArrow {
            name: format!("id_{}", a.id()),
            domains: vec![a.clone()],
            body: MatArrow::identity(a),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domains(&self) -> &[BoxShape] {
        &self.domains
    }

    pub fn arity(&self) -> usize {
        self.domains.len()
    }

    pub fn codomain(&self) -> &BoxShape {
        self.body.codomain()
    }

    pub fn body(&self) -> &MatArrow {
        &self.body
    }

    /// Same constituents, codomain and matrices; the name is ignored.
    pub fn same_arrow(&self, other: &MultiArrow) -> bool {
        self.domains == other.domains && self.body == other.body
    }
}

/// Records `wiring` as an arrow from the sequence `domains` into `codomain`.
pub fn multi_arrow(
    name: &str,
    domains: Vec<BoxShape>,
    codomain: &BoxShape,
    wiring: &WiringArrow,
) -> Result<MultiArrow, StructureError> {
    if wiring.codomain() != codomain {
        return Err(StructureError::DomainMismatch {
            expected: wiring.codomain().to_string(),
            found: codomain.to_string(),
        });
    }
    MultiArrow::from_body(name, domains, to_mat(wiring))
}

/// Reorders the constituents: position `i` of the result holds
/// `domains[sigma[i]]`. The body is unchanged since the braiding of a
/// union-based tensor is the identity.
pub fn symmetry_apply(ma: &MultiArrow, sigma: &[usize]) -> Result<MultiArrow, StructureError> {
    let n = ma.domains.len();
    let mut seen = vec![false; n];
    let is_perm = sigma.len() == n && sigma.iter().all(|&i| i < n && !std::mem::replace(&mut seen[i], true));
    if !is_perm {
        return Err(StructureError::BadPermutation {
            arity: n,
            perm: sigma.to_vec(),
        });
    }
    Ok(MultiArrow {
        name: ma.name.clone(),
        domains: sigma.iter().map(|&i| ma.domains[i].clone()).collect(),
        body: ma.body.clone(),
    })
}

/// Partial composition `m ∘ᵢ n`: plugs `n` into the `i`-th input of `m`.
///
/// This is `m ∘ (1 ⊗ … ⊗ n ⊗ … ⊗ 1)` in the monoidal category; the
/// constituents of `n` replace `m.domains[i]` in place.
pub fn multi_compose(m: &MultiArrow, i: usize, n: &MultiArrow) -> Result<MultiArrow, StructureError> {
    let Some(slot) = m.domains.get(i) else {
        return Err(StructureError::DomainMismatch {
            expected: format!("an input position below {}", m.arity()),
            found: i.to_string(),
        });
    };
    if slot != n.codomain() {
        return Err(StructureError::CodomainMismatch {
            inner: n.codomain().to_string(),
            outer: slot.to_string(),
        });
    }
    let mut inner = n.body.clone();
    for (j, d) in m.domains.iter().enumerate() {
        if j != i {
            inner = inner.tensor(&MatArrow::identity(d))?;
        }
    }
    // Tensor ids are canonical, but the domain box of `m.body` may carry a
    // user-chosen id; compare interfaces and re-anchor on `m`'s domain.
    if !inner.codomain().same_interface(m.body.domain()) {
        return Err(StructureError::CodomainMismatch {
            inner: inner.codomain().to_string(),
            outer: m.body.domain().to_string(),
        });
    }
    let inner = MatArrow::new(
        inner.domain().clone(),
        m.body.domain().clone(),
        inner.m_in().clone(),
        inner.m_out().clone(),
    )?;
    let body = compose(&m.body, &inner)?;
    let mut domains = Vec::with_capacity(m.arity() + n.arity());
    domains.extend_from_slice(&m.domains[..i]);
    domains.extend_from_slice(&n.domains);
    domains.extend_from_slice(&m.domains[i + 1..]);
    MultiArrow::from_body(format!("{}∘{}{}", m.name, i, n.name), domains, body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn two_parts_as_two_place_arrow() {
        let reg = fixtures::two_parts().unwrap();
        let ma = reg.multi("theta").unwrap();
        let ids: Vec<_> = ma.domains().iter().map(BoxShape::id).collect();
        assert_eq!(ids, ["X1", "X2"]);
        assert_eq!(ma.codomain().id(), "Y");
    }

    #[test]
    fn swap_keeps_body() {
        let reg = fixtures::two_parts().unwrap();
        let ma = reg.multi("theta").unwrap();
        let swapped = symmetry_apply(&ma, &[1, 0]).unwrap();
        assert_eq!(swapped.domains()[0].id(), "X2");
        assert_eq!(swapped.body(), ma.body());
        assert_eq!(symmetry_apply(&swapped, &[1, 0]).unwrap(), ma);
        assert_eq!(symmetry_apply(&ma, &[0, 1]).unwrap(), ma);
        assert!(matches!(
            symmetry_apply(&ma, &[0, 0]),
            Err(StructureError::BadPermutation { .. })
        ));
    }

    #[test]
    fn domain_mismatch() {
        let reg = fixtures::two_parts().unwrap();
        let wiring = reg.get_arrow("theta").unwrap();
        let x1 = reg.get_box("X1").unwrap().clone();
        assert!(matches!(
            multi_arrow("bad", vec![x1], wiring.codomain(), wiring),
            Err(StructureError::DomainMismatch { .. })
        ));
    }

    #[test]
    fn plugging_low_into_high_flattens_the_adder() {
        let reg = fixtures::adder_hier().unwrap();
        let flat = multi_compose(&reg.multi("high").unwrap(), 0, &reg.multi("low").unwrap()).unwrap();
        let ids: Vec<_> = flat.domains().iter().map(BoxShape::id).collect();
        assert_eq!(ids, ["X1", "X2", "X3", "X4"]);
        let direct = fixtures::adder().unwrap().multi("adder").unwrap();
        let shape = |m: &MultiArrow| -> Vec<(String, String)> {
            m.body()
                .m_in()
                .nonzero()
                .chain(m.body().m_out().nonzero())
                .map(|(t, s, _)| (t.to_string(), s.to_string()))
                .collect()
        };
        // Same connectivity as the hand-flattened adder; the words differ.
        let low_ports = ["m_a0", "m_b0", "m_a1", "m_b1", "m_s0", "m_c0", "m_s1", "m_c1"];
        assert!(shape(&flat)
            .iter()
            .all(|(t, s)| !low_ports.contains(&t.as_str()) && !low_ports.contains(&s.as_str())));
        assert_eq!(shape(&flat), shape(&direct));
    }

    #[test]
    fn identity_is_neutral_for_plugging() {
        let reg = fixtures::chain().unwrap();
        let theta = reg.multi("theta").unwrap();
        let id = MultiArrow::identity(theta.codomain());
        assert!(multi_compose(&id, 0, &theta).unwrap().same_arrow(&theta));
        let id = MultiArrow::identity(&theta.domains()[0]);
        assert!(multi_compose(&theta, 0, &id).unwrap().same_arrow(&theta));
    }
}
