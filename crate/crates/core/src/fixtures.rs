//! Worked examples shipped with the crate.
//!
//! `two_parts`, `self_loop` and `chain` are the small diagrams used in the
//! tests and docs. The adders come in a flat four-box form, a two-box
//! full-adder form and a two-level form whose flattening is the flat one.

use std::collections::BTreeMap;

use crate::algebra::{Behavior, Valuation};
use crate::error::StructureError;
use crate::matrix::{PortIndex, SemiringMatrix};
use crate::semiring::{parse_lang, LinkLabel, Word};
use crate::structure::{ports, BoxShape, Link, LinkMap, PortId, Registry};

fn port(p: &str) -> PortId {
    PortId::new(p).expect("fixture port ids are valid")
}

/// `(label, target, source)` triples as a link map.
pub fn links(triples: &[(&str, &str, &str)]) -> Result<LinkMap, StructureError> {
    triples
        .iter()
        .map(|(l, t, s)| {
            let w = Word::atom(LinkLabel::new(*l)?);
            Ok((w, Link::new(PortId::new(*t)?, PortId::new(*s)?)))
        })
        .collect()
}

fn add_box(reg: &mut Registry, id: &str, ins: &[&str], outs: &[&str]) -> Result<BoxShape, StructureError> {
    reg.box_new(id, ports(ins.iter().copied())?, ports(outs.iter().copied())?)
}

fn tensor_of(reg: &Registry, ids: &[&str]) -> Result<BoxShape, StructureError> {
    let parts = ids
        .iter()
        .map(|id| reg.get_box(id).cloned())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(crate::structure::tensor_all(&parts))
}

/// Two constituents `X1`, `X2` wired into `Y` by the arrow `theta`.
pub fn two_parts() -> Result<Registry, StructureError> {
    let mut reg = Registry::new();
    add_box(&mut reg, "X1", &["p1", "p2"], &["q1"])?;
    add_box(&mut reg, "X2", &["p3"], &["q2", "q3"])?;
    let y = add_box(&mut reg, "Y", &["y1", "y2"], &["z1", "z2"])?;
    let x = tensor_of(&reg, &["X1", "X2"])?;
    reg.arrow_new(
        "theta",
        &x,
        &y,
        links(&[
            ("w1", "p1", "y1"),
            ("w2", "p2", "y1"),
            ("w3", "p3", "q1"),
            ("w6", "p3", "y2"),
        ])?,
        links(&[("w4", "z1", "q2"), ("w5", "z2", "q2")])?,
    )?;
    Ok(reg)
}

/// `X` inside `Z`, with one feedback-shaped link `c → a`.
pub fn self_loop() -> Result<Registry, StructureError> {
    let mut reg = Registry::new();
    let x = add_box(&mut reg, "X", &["a", "b"], &["c", "d"])?;
    let z = add_box(&mut reg, "Z", &["i", "j"], &["k", "l"])?;
    reg.arrow_new(
        "theta",
        &x,
        &z,
        links(&[("l1", "a", "c"), ("l2", "b", "i"), ("l3", "b", "j")])?,
        links(&[("l4", "k", "c"), ("l5", "l", "d")])?,
    )?;
    Ok(reg)
}

/// The chain `X --theta1--> Y --theta--> Z`.
pub fn chain() -> Result<Registry, StructureError> {
    let mut reg = Registry::new();
    let x = add_box(&mut reg, "X", &["a", "b"], &["c", "d"])?;
    let y = add_box(&mut reg, "Y", &["e", "f"], &["g", "h"])?;
    let z = add_box(&mut reg, "Z", &["i", "j"], &["k", "l"])?;
    reg.arrow_new(
        "theta1",
        &x,
        &y,
        links(&[("l5", "a", "c"), ("l6", "b", "e")])?,
        links(&[("l3", "g", "c"), ("l4", "h", "d")])?,
    )?;
    reg.arrow_new(
        "theta",
        &y,
        &z,
        links(&[("l7", "e", "i"), ("l8", "e", "j"), ("l9", "f", "h")])?,
        links(&[("l1", "k", "g"), ("l2", "l", "h")])?,
    )?;
    Ok(reg)
}

fn half_adder_box(reg: &mut Registry, k: usize) -> Result<BoxShape, StructureError> {
    let p = |s: &str| format!("x{k}_{s}");
    add_box(reg, &format!("X{k}"), &[&p("d0"), &p("d1")], &[&p("s"), &p("c")])
}

/// Ripple-carry two-bit adder `Y` built from four half adders.
///
/// `X1` adds the low bits, `X2` the high bits, `X3` adds the low carry to
/// the high sum and `X4` merges the two carries.
pub fn adder() -> Result<Registry, StructureError> {
    let mut reg = Registry::new();
    for k in 1..=4 {
        half_adder_box(&mut reg, k)?;
    }
    let y = add_box(&mut reg, "Y", &["a0", "a1", "b0", "b1"], &["c0", "c1", "c2"])?;
    let x = tensor_of(&reg, &["X1", "X2", "X3", "X4"])?;
    reg.arrow_new(
        "adder",
        &x,
        &y,
        links(&[
            ("w1", "x1_d0", "a0"),
            ("w2", "x1_d1", "b0"),
            ("w3", "x2_d0", "a1"),
            ("w4", "x2_d1", "b1"),
            ("w5", "x3_d0", "x2_s"),
            ("w6", "x3_d1", "x1_c"),
            ("w7", "x4_d0", "x2_c"),
            ("w8", "x4_d1", "x3_c"),
        ])?,
        links(&[("w9", "c0", "x1_s"), ("w10", "c1", "x3_s"), ("w11", "c2", "x4_s")])?,
    )?;
    Ok(reg)
}

/// The same adder from two full adders `F1`, `F2`. The carry-in of `F1`
/// is left unconnected and needs a default of 0, see [`adder2_defaults`].
pub fn adder2() -> Result<Registry, StructureError> {
    let mut reg = Registry::new();
    for k in 1..=2 {
        let p = |s: &str| format!("f{k}_{s}");
        add_box(
            &mut reg,
            &format!("F{k}"),
            &[&p("a"), &p("b"), &p("cin")],
            &[&p("s"), &p("cout")],
        )?;
    }
    let y = add_box(&mut reg, "Y", &["a0", "a1", "b0", "b1"], &["c0", "c1", "c2"])?;
    let x = tensor_of(&reg, &["F1", "F2"])?;
    reg.arrow_new(
        "adder",
        &x,
        &y,
        links(&[
            ("v1", "f1_a", "a0"),
            ("v2", "f1_b", "b0"),
            ("v3", "f2_a", "a1"),
            ("v4", "f2_b", "b1"),
            ("v5", "f2_cin", "f1_cout"),
        ])?,
        links(&[("v6", "c0", "f1_s"), ("v7", "c1", "f2_s"), ("v8", "c2", "f2_cout")])?,
    )?;
    Ok(reg)
}

pub fn adder2_defaults() -> Valuation {
    [(port("f1_cin"), 0)].into_iter().collect()
}

/// The four-box adder in two levels: `low` packs `X1`, `X2` into `M`, and
/// `high` wires `M`, `X3`, `X4` into `Y`. Plugging `low` into `high`
/// gives the flat [`adder`] wiring, with composite labels.
pub fn adder_hier() -> Result<Registry, StructureError> {
    let mut reg = Registry::new();
    for k in 1..=4 {
        half_adder_box(&mut reg, k)?;
    }
    let m = add_box(
        &mut reg,
        "M",
        &["m_a0", "m_b0", "m_a1", "m_b1"],
        &["m_s0", "m_c0", "m_s1", "m_c1"],
    )?;
    let y = add_box(&mut reg, "Y", &["a0", "a1", "b0", "b1"], &["c0", "c1", "c2"])?;
    let low = tensor_of(&reg, &["X1", "X2"])?;
    reg.arrow_new(
        "low",
        &low,
        &m,
        links(&[
            ("u1", "x1_d0", "m_a0"),
            ("u2", "x1_d1", "m_b0"),
            ("u3", "x2_d0", "m_a1"),
            ("u4", "x2_d1", "m_b1"),
        ])?,
        links(&[
            ("u5", "m_s0", "x1_s"),
            ("u6", "m_c0", "x1_c"),
            ("u7", "m_s1", "x2_s"),
            ("u8", "m_c1", "x2_c"),
        ])?,
    )?;
    let high = tensor_of(&reg, &["M", "X3", "X4"])?;
    reg.arrow_new(
        "high",
        &high,
        &y,
        links(&[
            ("h1", "m_a0", "a0"),
            ("h2", "m_b0", "b0"),
            ("h3", "m_a1", "a1"),
            ("h4", "m_b1", "b1"),
            ("h5", "x3_d0", "m_s1"),
            ("h6", "x3_d1", "m_c0"),
            ("h7", "x4_d0", "m_c1"),
            ("h8", "x4_d1", "x3_c"),
        ])?,
        links(&[("h9", "c0", "m_s0"), ("h10", "c1", "x3_s"), ("h11", "c2", "x4_s")])?,
    )?;
    Ok(reg)
}

/// `d0 + d1 = 2c + s` on bits.
pub fn half_adder(b: &BoxShape) -> Behavior {
    let ins: Vec<PortId> = b.in_ports().iter().cloned().collect();
    let id = b.id().to_lowercase();
    let (s, c) = (port(&format!("{id}_s")), port(&format!("{id}_c")));
    Behavior::new(b, move |v| {
        let total: i64 = ins.iter().map(|p| v[p]).sum();
        Ok([(s.clone(), total % 2), (c.clone(), total / 2)].into_iter().collect())
    })
}

/// `a + b + cin = 2cout + s` on bits.
pub fn full_adder(b: &BoxShape) -> Behavior {
    let ins: Vec<PortId> = b.in_ports().iter().cloned().collect();
    let id = b.id().to_lowercase();
    let (s, c) = (port(&format!("{id}_s")), port(&format!("{id}_cout")));
    Behavior::new(b, move |v| {
        let total: i64 = ins.iter().map(|p| v[p]).sum();
        Ok([(s.clone(), total % 2), (c.clone(), total / 2)].into_iter().collect())
    })
}

/// Behaviors for every box of `reg` whose id starts with `X` (half adder)
/// or `F` (full adder).
pub fn adder_behaviors(reg: &Registry) -> BTreeMap<String, Behavior> {
    reg.boxes()
        .filter_map(|b| match b.id().chars().next() {
            Some('X') => Some((b.id().to_string(), half_adder(b))),
            Some('F') => Some((b.id().to_string(), full_adder(b))),
            _ => None,
        })
        .collect()
}

/// Inputs of the two-bit adder for `a = a1a0` and `b = b1b0`.
pub fn adder_inputs(a: i64, b: i64) -> Valuation {
    [("a0", a & 1), ("a1", a >> 1), ("b0", b & 1), ("b1", b >> 1)]
        .into_iter()
        .map(|(p, x)| (port(p), x))
        .collect()
}

/// Reads `c2c1c0` back as an integer.
pub fn adder_output(v: &Valuation) -> i64 {
    v[&port("c0")] + 2 * v[&port("c1")] + 4 * v[&port("c2")]
}

/// Builds a matrix from row-major cells in [`parse_lang`] syntax.
pub fn lang_matrix(rows: &[&str], cols: &[&str], cells: &[&[&str]]) -> SemiringMatrix {
    let idx = |xs: &[&str]| PortIndex::sorted(xs.iter().map(|p| port(p)));
    let mut m = SemiringMatrix::zero(idx(rows), idx(cols));
    for (r, row) in rows.iter().zip(cells) {
        for (c, cell) in cols.iter().zip(row.iter()) {
            m.set(port(r), port(c), parse_lang(cell).expect("fixture cells parse"));
        }
    }
    m
}

/// The pair `A`, `B` with `A : {a,b} × {c,d}` and `B : {c,d} × {e,f}`.
pub fn product_operands() -> (SemiringMatrix, SemiringMatrix) {
    let a = lang_matrix(&["a", "b"], &["c", "d"], &[&["w1", ""], &["w2,w3", ""]]);
    let b = lang_matrix(&["c", "d"], &["e", "f"], &[&["w5", ""], &["", ""]]);
    (a, b)
}

/// The expected product `A × B`.
pub fn product_expected() -> SemiringMatrix {
    lang_matrix(&["a", "b"], &["e", "f"], &[&["w1.w5", ""], &["w2.w5,w3.w5", ""]])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        for reg in [two_parts(), self_loop(), chain(), adder(), adder2(), adder_hier()] {
            reg.unwrap();
        }
    }

    #[test]
    fn adder_io_roundtrip() {
        for a in 0..4 {
            for b in 0..4 {
                let mut v = adder_inputs(a, b);
                v.insert(port("c0"), a & 1);
                v.insert(port("c1"), a >> 1);
                v.insert(port("c2"), 0);
                assert_eq!(adder_output(&v), a);
            }
        }
    }
}
