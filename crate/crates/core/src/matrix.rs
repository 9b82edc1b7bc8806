//! Port-indexed matrices over [`Lang`].
//!
//! Rows and columns are indexed by finite sets of ports rather than by
//! integer positions. Storage is sparse: an absent `(row, col)` key means
//! `∅`, and `∅` values are never stored.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::MatrixError;
use crate::semiring::Lang;
use crate::structure::PortId;

/// Ordered set of distinct row or column indices.
///
/// The order only affects display; equality compares the index sets.
#[derive(Clone)]
pub struct PortIndex<P = PortId> {
    order: Vec<P>,
    members: BTreeSet<P>,
}

impl<P: Ord + Clone> PortIndex<P> {
    pub fn empty() -> Self {
        PortIndex {
            order: Vec::new(),
            members: BTreeSet::new(),
        }
    }

    /// Canonical index of a single group: sorted, deduplicated.
    pub fn sorted(ports: impl IntoIterator<Item = P>) -> Self {
        let members: BTreeSet<P> = ports.into_iter().collect();
        PortIndex {
            order: members.iter().cloned().collect(),
            members,
        }
    }

    /// Groups in declaration order, each sorted; groups must be disjoint.
    pub fn grouped<I, G>(groups: G) -> Result<Self, MatrixError>
    where
        G: IntoIterator<Item = I>,
        I: IntoIterator<Item = P>,
        P: fmt::Debug,
    {
        let mut out = PortIndex::empty();
        for group in groups {
            let sorted: BTreeSet<P> = group.into_iter().collect();
            for p in sorted {
                out.push(p)?;
            }
        }
        Ok(out)
    }

    fn push(&mut self, p: P) -> Result<(), MatrixError>
    where
        P: fmt::Debug,
    {
        if !self.members.insert(p.clone()) {
            return Err(MatrixError::DuplicatePort(format!("{p:?}")));
        }
        self.order.push(p);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn contains(&self, p: &P) -> bool {
        self.members.contains(p)
    }

    pub fn iter(&self) -> impl Iterator<Item = &P> {
        self.order.iter()
    }

    pub fn as_set(&self) -> &BTreeSet<P> {
        &self.members
    }
}

impl<P: Ord> PartialEq for PortIndex<P> {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members
    }
}

impl<P: Ord> Eq for PortIndex<P> {}

impl<P: fmt::Display> fmt::Display for PortIndex<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.order.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl<P: fmt::Debug> fmt::Debug for PortIndex<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.order.iter()).finish()
    }
}

/// A matrix with `Lang` entries and port-indexed rows and columns.
#[derive(Clone)]
pub struct SemiringMatrix<P = PortId> {
    rows: PortIndex<P>,
    cols: PortIndex<P>,
    entries: BTreeMap<(P, P), Lang>,
}

impl<P: Ord + Clone + fmt::Debug> SemiringMatrix<P> {
    pub fn zero(rows: PortIndex<P>, cols: PortIndex<P>) -> Self {
        SemiringMatrix {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(idx: PortIndex<P>) -> Self {
        let entries = idx.iter().map(|p| ((p.clone(), p.clone()), Lang::one())).collect();
        SemiringMatrix {
            rows: idx.clone(),
            cols: idx,
            entries,
        }
    }

    /// Builds a matrix from a function on `rows × cols`.
    pub fn from_fn(rows: PortIndex<P>, cols: PortIndex<P>, f: impl Fn(&P, &P) -> Lang) -> Self {
        let mut m = SemiringMatrix::zero(rows, cols);
        let cells: Vec<(P, P)> = m
            .rows
            .iter()
            .flat_map(|r| m.cols.iter().map(move |c| (r.clone(), c.clone())))
            .collect();
        for (r, c) in cells {
            let v = f(&r, &c);
            m.set_unchecked(r, c, v);
        }
        m
    }

    /// The total function `rows × cols → Lang` this matrix denotes.
    pub fn to_fn(&self) -> BTreeMap<(P, P), Lang> {
        let mut out = BTreeMap::new();
        for r in self.rows.iter() {
            for c in self.cols.iter() {
                out.insert((r.clone(), c.clone()), self.get(r, c));
            }
        }
        out
    }

    pub fn rows(&self) -> &PortIndex<P> {
        &self.rows
    }

    pub fn cols(&self) -> &PortIndex<P> {
        &self.cols
    }

    pub fn get(&self, r: &P, c: &P) -> Lang {
        self.entries.get(&(r.clone(), c.clone())).cloned().unwrap_or_default()
    }

    /// Sets an entry. Panics if `r` or `c` is not an index of the matrix.
    pub fn set(&mut self, r: P, c: P, v: Lang) {
        assert!(
            self.rows.contains(&r) && self.cols.contains(&c),
            "entry ({r:?}, {c:?}) outside the matrix index"
        );
        self.set_unchecked(r, c, v);
    }

    fn set_unchecked(&mut self, r: P, c: P, v: Lang) {
        if v.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), v);
        }
    }

    /// Iterates the non-`∅` entries.
    pub fn nonzero(&self) -> impl Iterator<Item = (&P, &P, &Lang)> {
        self.entries.iter().map(|((r, c), v)| (r, c, v))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn mul(&self, rhs: &SemiringMatrix<P>) -> Result<SemiringMatrix<P>, MatrixError>
    where
        P: fmt::Display,
    {
        if self.cols != rhs.rows {
            return Err(MatrixError::DimensionMismatch {
                left: self.cols.to_string(),
                right: rhs.rows.to_string(),
            });
        }
        let mut by_row: BTreeMap<&P, Vec<(&P, &Lang)>> = BTreeMap::new();
        for ((k, j), v) in &rhs.entries {
            by_row.entry(k).or_default().push((j, v));
        }
        let mut entries: BTreeMap<(P, P), Lang> = BTreeMap::new();
        for ((i, k), a) in &self.entries {
            let Some(row) = by_row.get(k) else { continue };
            for (j, b) in row {
                let prod = a.mul(b);
                if !prod.is_zero() {
                    entries.entry((i.clone(), (*j).clone())).or_default().absorb(prod);
                }
            }
        }
        Ok(SemiringMatrix {
            rows: self.rows.clone(),
            cols: rhs.cols.clone(),
            entries,
        })
    }

    /// Entrywise union. Both operands must have the same index sets.
    pub fn add(&self, rhs: &SemiringMatrix<P>) -> Result<SemiringMatrix<P>, MatrixError>
    where
        P: fmt::Display,
    {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(MatrixError::DimensionMismatch {
                left: format!("{} x {}", self.rows, self.cols),
                right: format!("{} x {}", rhs.rows, rhs.cols),
            });
        }
        let mut entries = self.entries.clone();
        for (k, v) in &rhs.entries {
            entries.entry(k.clone()).or_default().absorb(v.clone());
        }
        Ok(SemiringMatrix {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            entries,
        })
    }

    /// Restriction to a subset of rows and columns.
    pub fn submatrix(&self, rows: PortIndex<P>, cols: PortIndex<P>) -> SemiringMatrix<P> {
        let entries = self
            .entries
            .iter()
            .filter(|((r, c), _)| rows.contains(r) && cols.contains(c))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        SemiringMatrix { rows, cols, entries }
    }

    /// Renames every row and column index. `f` must be injective on each
    /// index set.
    pub fn reindex<Q: Ord + Clone + fmt::Debug>(
        &self,
        mut f: impl FnMut(&P) -> Q,
    ) -> Result<SemiringMatrix<Q>, MatrixError> {
        let mut rows = PortIndex::empty();
        for p in self.rows.iter() {
            rows.push(f(p))?;
        }
        let mut cols = PortIndex::empty();
        for p in self.cols.iter() {
            cols.push(f(p))?;
        }
        let entries = self
            .entries
            .iter()
            .map(|((r, c), v)| ((f(r), f(c)), v.clone()))
            .collect();
        Ok(SemiringMatrix { rows, cols, entries })
    }
}

impl<P: Ord> PartialEq for SemiringMatrix<P> {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.entries == other.entries
    }
}

impl<P: Ord> Eq for SemiringMatrix<P> {}

pub fn mat_zero<P: Ord + Clone + fmt::Debug>(rows: PortIndex<P>, cols: PortIndex<P>) -> SemiringMatrix<P> {
    SemiringMatrix::zero(rows, cols)
}

pub fn mat_identity<P: Ord + Clone + fmt::Debug>(idx: PortIndex<P>) -> SemiringMatrix<P> {
    SemiringMatrix::identity(idx)
}

pub fn mat_mul<P: Ord + Clone + fmt::Debug + fmt::Display>(
    a: &SemiringMatrix<P>,
    b: &SemiringMatrix<P>,
) -> Result<SemiringMatrix<P>, MatrixError> {
    a.mul(b)
}

/// Assembles a block matrix. `blocks[i][j]` must be indexed by
/// `row_groups[i] × col_groups[j]`; `None` stands for an all-`∅` block.
pub fn mat_block<P: Ord + Clone + fmt::Debug>(
    blocks: &[Vec<Option<SemiringMatrix<P>>>],
    row_groups: &[PortIndex<P>],
    col_groups: &[PortIndex<P>],
) -> Result<SemiringMatrix<P>, MatrixError> {
    if blocks.len() != row_groups.len() {
        return Err(MatrixError::ShapeMismatch {
            row: blocks.len(),
            col: 0,
            detail: format!("{} block rows for {} row groups", blocks.len(), row_groups.len()),
        });
    }
    let rows = concat_groups(row_groups)?;
    let cols = concat_groups(col_groups)?;
    let mut out = SemiringMatrix::zero(rows, cols);
    for (i, block_row) in blocks.iter().enumerate() {
        if block_row.len() != col_groups.len() {
            return Err(MatrixError::ShapeMismatch {
                row: i,
                col: block_row.len(),
                detail: format!("{} blocks for {} column groups", block_row.len(), col_groups.len()),
            });
        }
        for (j, block) in block_row.iter().enumerate() {
            let Some(block) = block else { continue };
            if block.rows != row_groups[i] || block.cols != col_groups[j] {
                return Err(MatrixError::ShapeMismatch {
                    row: i,
                    col: j,
                    detail: format!(
                        "block is {:?} x {:?}, group is {:?} x {:?}",
                        block.rows, block.cols, row_groups[i], col_groups[j]
                    ),
                });
            }
            for ((r, c), v) in &block.entries {
                out.entries.insert((r.clone(), c.clone()), v.clone());
            }
        }
    }
    Ok(out)
}

fn concat_groups<P: Ord + Clone + fmt::Debug>(groups: &[PortIndex<P>]) -> Result<PortIndex<P>, MatrixError> {
    let mut out = PortIndex::empty();
    for g in groups {
        for p in g.iter() {
            out.push(p.clone())?;
        }
    }
    Ok(out)
}

pub fn fn_to_mat<P: Ord + Clone + fmt::Debug>(
    f: impl Fn(&P, &P) -> Lang,
    rows: PortIndex<P>,
    cols: PortIndex<P>,
) -> SemiringMatrix<P> {
    SemiringMatrix::from_fn(rows, cols, f)
}

pub fn mat_to_fn<P: Ord + Clone + fmt::Debug>(m: &SemiringMatrix<P>) -> BTreeMap<(P, P), Lang> {
    m.to_fn()
}

/// Block-array layout: a header of column ports, then one line per row
/// port with its entries. Columns are padded to a common width.
impl<P: Ord + Clone + fmt::Debug + fmt::Display> fmt::Display for SemiringMatrix<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row_names: Vec<String> = self.rows.iter().map(ToString::to_string).collect();
        let col_names: Vec<String> = self.cols.iter().map(ToString::to_string).collect();
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| self.cols.iter().map(|c| self.get(r, c).to_string()).collect())
            .collect();
        let lead = row_names.iter().map(|s| s.chars().count()).max().unwrap_or(0);
        let widths: Vec<usize> = (0..col_names.len())
            .map(|j| {
                cells
                    .iter()
                    .map(|row| row[j].chars().count())
                    .chain(std::iter::once(col_names[j].chars().count()))
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let pad = |s: &str, w: usize| format!("{s}{}", " ".repeat(w - s.chars().count()));

        let mut header = pad("", lead);
        for (name, w) in col_names.iter().zip(&widths) {
            header.push_str("  ");
            header.push_str(&pad(name, *w));
        }
        writeln!(f, "{}", header.trim_end())?;
        for (name, row) in row_names.iter().zip(&cells) {
            let mut line = pad(name, lead);
            for (cell, w) in row.iter().zip(&widths) {
                line.push_str("  ");
                line.push_str(&pad(cell, *w));
            }
            writeln!(f, "{}", line.trim_end())?;
        }
        Ok(())
    }
}

impl<P: fmt::Debug> fmt::Debug for SemiringMatrix<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SemiringMatrix")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("entries", &self.entries)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::parse_lang;

    fn idx(ports: &[&str]) -> PortIndex<String> {
        PortIndex::sorted(ports.iter().map(|s| s.to_string()))
    }

    fn mat(rows: &[&str], cols: &[&str], cells: &[&[&str]]) -> SemiringMatrix<String> {
        let mut m = SemiringMatrix::zero(
            PortIndex::grouped([rows.iter().map(|s| s.to_string())]).unwrap(),
            PortIndex::grouped([cols.iter().map(|s| s.to_string())]).unwrap(),
        );
        for (r, row) in rows.iter().zip(cells) {
            for (c, cell) in cols.iter().zip(row.iter()) {
                m.set(r.to_string(), c.to_string(), parse_lang(cell).unwrap());
            }
        }
        m
    }

    #[test]
    fn zero_and_identity() {
        let z = mat_zero(idx(&["a"]), idx(&["b"]));
        assert_eq!(z.get(&"a".into(), &"b".into()), Lang::zero());
        let z0 = mat_zero(idx(&[]), idx(&["b"]));
        assert_eq!(z0.rows().len(), 0);
        assert_eq!(z0.to_fn().len(), 0);

        let id = mat_identity(idx(&["c", "d"]));
        assert_eq!(id, mat(&["c", "d"], &["c", "d"], &[&["ε", ""], &["", "ε"]]));
        assert_eq!(mat_identity(idx(&[])).rows().len(), 0);
    }

    #[test]
    fn product_expected() {
        let a = mat(&["a", "b"], &["c", "d"], &[&["w1", ""], &["w2,w3", ""]]);
        let b = mat(&["c", "d"], &["e", "f"], &[&["w5", ""], &["", ""]]);
        let ab = mat_mul(&a, &b).unwrap();
        let expected = mat(&["a", "b"], &["e", "f"], &[&["w1.w5", ""], &["w2.w5,w3.w5", ""]]);
        assert_eq!(ab, expected);
        assert_eq!(mat_mul(&a, &mat_identity(idx(&["c", "d"]))).unwrap(), a);
        assert!(mat_mul(&mat_zero(idx(&["x"]), idx(&["c", "d"])), &b).unwrap().is_zero());
    }

    #[test]
    fn mul_rejects_mismatch() {
        let a = mat_zero(idx(&["a"]), idx(&["c"]));
        let b = mat_zero(idx(&["d"]), idx(&["e"]));
        assert!(matches!(mat_mul(&a, &b), Err(MatrixError::DimensionMismatch { .. })));
    }

    #[test]
    fn block_assembly() {
        let m = mat(&["a"], &["b"], &[&["x"]]);
        let one = mat_block(&[vec![Some(m.clone())]], &[idx(&["a"])], &[idx(&["b"])]).unwrap();
        assert_eq!(one, m);

        let (gi, gj) = (idx(&["i"]), idx(&["j"]));
        let grid = vec![
            vec![Some(mat_identity(gi.clone())), None],
            vec![None, Some(mat_identity(gj.clone()))],
        ];
        let id = mat_block(&grid, &[gi.clone(), gj.clone()], &[gi.clone(), gj.clone()]).unwrap();
        assert_eq!(id, mat_identity(idx(&["i", "j"])));

        let dup = mat_block(
            &[vec![None], vec![None]],
            &[gi.clone(), gi.clone()],
            std::slice::from_ref(&gj),
        );
        assert!(matches!(dup, Err(MatrixError::DuplicatePort(_))));

        let bad = mat_block(&[vec![Some(m)]], &[gi], &[gj]);
        assert!(matches!(bad, Err(MatrixError::ShapeMismatch { .. })));
    }

    #[test]
    fn function_view() {
        let a = mat(&["a", "b"], &["c", "d"], &[&["w1", ""], &["w2,w3", ""]]);
        let f = mat_to_fn(&a);
        assert_eq!(f.len(), 4);
        let back = fn_to_mat(
            |r, c| f[&(r.clone(), c.clone())].clone(),
            idx(&["a", "b"]),
            idx(&["c", "d"]),
        );
        assert_eq!(back, a);
        let z = fn_to_mat(|_, _| Lang::zero(), idx(&["a"]), idx(&["b", "c"]));
        assert_eq!(z, mat_zero(idx(&["a"]), idx(&["b", "c"])));
    }

    #[test]
    fn equality_ignores_order() {
        let a = mat(&["b", "a"], &["c"], &[&["x"], &[""]]);
        let b = mat(&["a", "b"], &["c"], &[&[""], &["x"]]);
        assert_eq!(a, b);
    }

    #[test]
    fn pretty_print() {
        let m = mat(&["a", "b"], &["c", "d"], &[&["w1", ""], &["w2,w3", ""]]);
        let text = m.to_string();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "   c        d");
        assert_eq!(lines[1], "a  {w1}     ∅");
        assert_eq!(lines[2], "b  {w2,w3}  ∅");
    }
}
