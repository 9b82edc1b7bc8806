use std::collections::BTreeSet;
use std::fmt;

use crate::error::{MatrixError, StructureError};
use crate::matrix::{mat_block, PortIndex, SemiringMatrix};
use crate::semiring::{Lang, LinkLabel, Word};

use super::arrow::{identity_label, Link, LinkMap, WiringArrow};
use super::{tensor_box, BoxShape, PortId};

/// An arrow `X → Y` in matrix form.
///
/// `m_in` is indexed by `X^in × (Y^in ∪ X^out)`, `m_out` by
/// `Y^out × X^out`. Entry `(t, s)` holds the words of the links from `s`
/// into `t`.
#[derive(Clone, PartialEq, Eq)]
pub struct MatArrow {
    domain: BoxShape,
    codomain: BoxShape,
    m_in: SemiringMatrix,
    m_out: SemiringMatrix,
}

fn in_rows(domain: &BoxShape) -> PortIndex {
    PortIndex::sorted(domain.in_ports().iter().cloned())
}

fn in_cols(domain: &BoxShape, codomain: &BoxShape) -> Result<PortIndex, MatrixError> {
    PortIndex::grouped([codomain.in_ports().iter().cloned(), domain.out_ports().iter().cloned()])
}

fn out_rows(codomain: &BoxShape) -> PortIndex {
    PortIndex::sorted(codomain.out_ports().iter().cloned())
}

fn out_cols(domain: &BoxShape) -> PortIndex {
    PortIndex::sorted(domain.out_ports().iter().cloned())
}

impl MatArrow {
    pub fn new(
        domain: BoxShape,
        codomain: BoxShape,
        m_in: SemiringMatrix,
        m_out: SemiringMatrix,
    ) -> Result<Self, StructureError> {
        let cols = in_cols(&domain, &codomain)?;
        if *m_in.rows() != in_rows(&domain) || *m_in.cols() != cols {
            return Err(StructureError::MalformedMatrix(format!(
                "input matrix must be indexed by {:?} x {:?}",
                in_rows(&domain),
                cols
            )));
        }
        if *m_out.rows() != out_rows(&codomain) || *m_out.cols() != out_cols(&domain) {
            return Err(StructureError::MalformedMatrix(format!(
                "output matrix must be indexed by {:?} x {:?}",
                out_rows(&codomain),
                out_cols(&domain)
            )));
        }
        Ok(MatArrow {
            domain,
            codomain,
            m_in,
            m_out,
        })
    }

    /// `1_X`: identity blocks `[𝕀 | ∅]` and `𝕀`.
    pub fn identity(x: &BoxShape) -> Self {
        let mut m_in = SemiringMatrix::zero(
            in_rows(x),
            in_cols(x, x).expect("in and out ports of a box are disjoint"),
        );
        for p in x.in_ports() {
            m_in.set(p.clone(), p.clone(), Lang::one());
        }
        MatArrow {
            domain: x.clone(),
            codomain: x.clone(),
            m_in,
            m_out: SemiringMatrix::identity(out_rows(x)),
        }
    }

    pub fn domain(&self) -> &BoxShape {
        &self.domain
    }

    pub fn codomain(&self) -> &BoxShape {
        &self.codomain
    }

    pub fn m_in(&self) -> &SemiringMatrix {
        &self.m_in
    }

    pub fn m_out(&self) -> &SemiringMatrix {
        &self.m_out
    }

    /// Every word in either matrix.
    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.m_in
            .nonzero()
            .chain(self.m_out.nonzero())
            .flat_map(|(_, _, l)| l.words())
    }

    /// `θ₁ ⊗ θ₂` in matrix form: both arrows' entries on the union index.
    pub fn tensor(&self, other: &MatArrow) -> Result<MatArrow, StructureError> {
        let domain = tensor_box(&self.domain, &other.domain);
        let codomain = tensor_box(&self.codomain, &other.codomain);
        let mut m_in = SemiringMatrix::zero(in_rows(&domain), in_cols(&domain, &codomain)?);
        let mut m_out = SemiringMatrix::zero(out_rows(&codomain), out_cols(&domain));
        for src in [self, other] {
            for (r, c, v) in src.m_in.nonzero() {
                let merged = m_in.get(r, c).add(v);
                m_in.set(r.clone(), c.clone(), merged);
            }
            for (r, c, v) in src.m_out.nonzero() {
                let merged = m_out.get(r, c).add(v);
                m_out.set(r.clone(), c.clone(), merged);
            }
        }
        MatArrow::new(domain, codomain, m_in, m_out)
    }
}

impl fmt::Debug for MatArrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "MatArrow {} -> {}\nin:\n{}out:\n{}",
            self.domain, self.codomain, self.m_in, self.m_out
        )
    }
}

/// Matrix form of a wiring arrow: entry `(t, s)` collects the words of all
/// links from `s` into `t`.
pub fn to_mat(arrow: &WiringArrow) -> MatArrow {
    let (b, a) = (arrow.domain(), arrow.codomain());
    let mut m_in = SemiringMatrix::zero(
        in_rows(b),
        in_cols(b, a).expect("validated arrows have disjoint column groups"),
    );
    let mut m_out = SemiringMatrix::zero(out_rows(a), out_cols(b));
    let fill = |m: &mut SemiringMatrix, links: &LinkMap| {
        for (label, link) in links {
            let entry = m
                .get(&link.target, &link.source)
                .add(&Lang::from_words([link.word(label)]));
            m.set(link.target.clone(), link.source.clone(), entry);
        }
    };
    fill(&mut m_in, arrow.theta_in());
    fill(&mut m_out, arrow.theta_out());
    MatArrow {
        domain: b.clone(),
        codomain: a.clone(),
        m_in,
        m_out,
    }
}

/// Function form of a matrix arrow: one link per word. Composite words
/// become opaque composite labels; `ε` becomes a unit link.
pub fn from_mat(m: &MatArrow) -> Result<WiringArrow, StructureError> {
    let collect = |matrix: &SemiringMatrix, dir: &str| -> Result<LinkMap, StructureError> {
        let mut out = LinkMap::new();
        for (t, s, lang) in matrix.nonzero() {
            for w in lang.words() {
                let (label, link) = if w.is_epsilon() {
                    let label = if t == s {
                        identity_label(m.domain.id(), dir, t)
                    } else {
                        Word::atom(LinkLabel::new(format!("{}_{dir}_{t}_{s}", m.domain.id()))?)
                    };
                    (label, Link::unit(t.clone(), s.clone()))
                } else {
                    (w.clone(), Link::new(t.clone(), s.clone()))
                };
                if out.insert(label.clone(), link).is_some() {
                    return Err(StructureError::LabelCollision {
                        label: label.to_string(),
                        owner: "the same arrow".to_string(),
                    });
                }
            }
        }
        Ok(out)
    };
    WiringArrow::new(
        m.domain.clone(),
        m.codomain.clone(),
        collect(&m.m_in, "lin")?,
        collect(&m.m_out, "lout")?,
    )
}

/// Which port set of a composition a block index belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Group {
    XIn,
    XOut,
    YIn,
    YOut,
    ZIn,
}

/// A port tagged with its group, so that the block matrices of a
/// composition stay well-indexed when two of `X`, `Y`, `Z` coincide.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Slot {
    pub group: Group,
    pub port: PortId,
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.port)
    }
}

/// The five matrices entering `m ∘ n` for `n: X → Y`, `m: Y → Z`.
#[derive(Debug, Clone)]
pub struct CompositionBlocks {
    /// `X^in × (Y^in | X^out)`
    pub n_in: SemiringMatrix<Slot>,
    /// `(Y^in | X^out) × (Z^in ∪ Y^out | X^out)`
    pub m_prime_in: SemiringMatrix<Slot>,
    /// `(Z^in | Y^out | X^out) × (Z^in | X^out)`
    pub n_prime_out: SemiringMatrix<Slot>,
    /// `Z^out × Y^out`
    pub m_out: SemiringMatrix,
    /// `Y^out × X^out`
    pub n_out: SemiringMatrix,
}

fn group_index(group: Group, ports: &BTreeSet<PortId>) -> PortIndex<Slot> {
    PortIndex::sorted(ports.iter().map(|p| Slot { group, port: p.clone() }))
}

/// Builds the block matrices of `m ∘ n`.
pub fn compose_blocks(m: &MatArrow, n: &MatArrow) -> Result<CompositionBlocks, StructureError> {
    if n.codomain != m.domain {
        return Err(StructureError::CodomainMismatch {
            inner: n.codomain.to_string(),
            outer: m.domain.to_string(),
        });
    }
    let (x, y, z) = (&n.domain, &n.codomain, &m.codomain);

    let x_in = group_index(Group::XIn, x.in_ports());
    let x_out = group_index(Group::XOut, x.out_ports());
    let y_in = group_index(Group::YIn, y.in_ports());
    let y_out = group_index(Group::YOut, y.out_ports());
    let z_in = group_index(Group::ZIn, z.in_ports());

    let n_in = tag_matrix(
        &n.m_in,
        Group::XIn,
        &[(Group::YIn, y.in_ports()), (Group::XOut, x.out_ports())],
    )?;
    let m_in = tag_matrix(
        &m.m_in,
        Group::YIn,
        &[(Group::ZIn, z.in_ports()), (Group::YOut, y.out_ports())],
    )?;
    let n_out = tag_matrix(&n.m_out, Group::YOut, &[(Group::XOut, x.out_ports())])?;

    let z_in_y_out = PortIndex::grouped([z_in.iter().cloned(), y_out.iter().cloned()])?;
    let m_prime_in = mat_block(
        &[
            vec![Some(m_in), None],
            vec![None, Some(SemiringMatrix::identity(x_out.clone()))],
        ],
        &[y_in.clone(), x_out.clone()],
        &[z_in_y_out, x_out.clone()],
    )?;
    let n_prime_out = mat_block(
        &[
            vec![Some(SemiringMatrix::identity(z_in.clone())), None],
            vec![None, Some(n_out)],
            vec![None, Some(SemiringMatrix::identity(x_out.clone()))],
        ],
        &[z_in.clone(), y_out, x_out.clone()],
        &[z_in, x_out],
    )?;
    debug_assert_eq!(*n_in.rows(), x_in);

    Ok(CompositionBlocks {
        n_in,
        m_prime_in,
        n_prime_out,
        m_out: m.m_out.clone(),
        n_out: n.m_out.clone(),
    })
}

/// Tags row ports with `row_group`; each column port goes to the first
/// of `col_groups` that contains it.
fn tag_matrix(
    m: &SemiringMatrix,
    row_group: Group,
    col_groups: &[(Group, &BTreeSet<PortId>)],
) -> Result<SemiringMatrix<Slot>, StructureError> {
    let col_group = |p: &PortId| {
        col_groups
            .iter()
            .find(|(_, ports)| ports.contains(p))
            .map(|(g, _)| *g)
            .ok_or_else(|| StructureError::MalformedMatrix(format!("column {p} in no group")))
    };
    let rows = PortIndex::sorted(m.rows().iter().map(|p| Slot {
        group: row_group,
        port: p.clone(),
    }));
    let cols = PortIndex::grouped(col_groups.iter().map(|(g, ports)| {
        ports
            .iter()
            .filter(|p| m.cols().contains(p))
            .map(|p| Slot {
                group: *g,
                port: p.clone(),
            })
            .collect::<Vec<_>>()
    }))?;
    let mut out = SemiringMatrix::zero(rows, cols);
    for (r, c, v) in m.nonzero() {
        let col = Slot {
            group: col_group(c)?,
            port: c.clone(),
        };
        out.set(
            Slot {
                group: row_group,
                port: r.clone(),
            },
            col,
            v.clone(),
        );
    }
    Ok(out)
}

/// `m ∘ n` for `n: X → Y` and `m: Y → Z`:
/// `O^out = M^out × N^out`, `O^in = N^in × M'^in × N'^out`.
pub fn compose(m: &MatArrow, n: &MatArrow) -> Result<MatArrow, StructureError> {
    let blocks = compose_blocks(m, n)?;
    let o_in = blocks.n_in.mul(&blocks.m_prime_in)?.mul(&blocks.n_prime_out)?;
    let o_in = o_in.reindex(|s| s.port.clone())?;
    let o_out = blocks.m_out.mul(&blocks.n_out)?;
    MatArrow::new(n.domain.clone(), m.codomain.clone(), o_in, o_out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, lang_matrix};
    use crate::structure::arrow_identity;

    fn chain_mats() -> (MatArrow, MatArrow) {
        let reg = fixtures::chain().unwrap();
        (
            to_mat(reg.get_arrow("theta").unwrap()),
            to_mat(reg.get_arrow("theta1").unwrap()),
        )
    }

    #[test]
    fn chain_composite() {
        let (theta, theta1) = chain_mats();
        let o = compose(&theta, &theta1).unwrap();
        let o_out = lang_matrix(&["k", "l"], &["c", "d"], &[&["l1.l3", ""], &["", "l2.l4"]]);
        let o_in = lang_matrix(
            &["a", "b"],
            &["i", "j", "c", "d"],
            &[&["", "", "l5", ""], &["l6.l7", "l6.l8", "", ""]],
        );
        assert_eq!(o.m_out(), &o_out);
        assert_eq!(o.m_in(), &o_in);
        assert!(o.words().all(|w| !w.to_string().contains("l9")));
    }

    #[test]
    fn chain_blocks_have_expected_shapes() {
        let (theta, theta1) = chain_mats();
        let b = compose_blocks(&theta, &theta1).unwrap();
        assert_eq!((b.n_in.rows().len(), b.n_in.cols().len()), (2, 4));
        assert_eq!((b.m_prime_in.rows().len(), b.m_prime_in.cols().len()), (4, 6));
        assert_eq!((b.n_prime_out.rows().len(), b.n_prime_out.cols().len()), (6, 4));
    }

    #[test]
    fn codomain_mismatch() {
        let (theta, theta1) = chain_mats();
        assert!(matches!(
            compose(&theta1, &theta),
            Err(StructureError::CodomainMismatch { .. })
        ));
    }

    #[test]
    fn identity_matrices_are_units() {
        let (theta, _) = chain_mats();
        let id_y = MatArrow::identity(theta.domain());
        assert_eq!(to_mat(&arrow_identity(theta.domain())), id_y);
        assert_eq!(compose(&theta, &id_y).unwrap(), theta);
        assert_eq!(compose(&MatArrow::identity(theta.codomain()), &theta).unwrap(), theta);
    }

    #[test]
    fn from_mat_inverts_to_mat() {
        let reg = fixtures::two_parts().unwrap();
        let a = reg.get_arrow("theta").unwrap();
        assert_eq!(&from_mat(&to_mat(a)).unwrap(), a);
    }

    #[test]
    fn composite_words_become_labels() {
        let (theta, theta1) = chain_mats();
        let o = compose(&theta, &theta1).unwrap();
        let back = from_mat(&o).unwrap();
        assert_eq!(back.labels().count(), 5);
        assert_eq!(to_mat(&back), o);
    }
}
