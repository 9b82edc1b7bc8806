//! Browser demo: compose two arrows, render one as DOT, and run the
//! two-bit adder. The functions here are plain Rust so they can be tested
//! natively; the `wasm` module wraps them for JavaScript.

use std::collections::BTreeMap;

use boxwire::algebra::Valuation;
use boxwire::io::{self, Model};
use boxwire::structure::{compose, PortId};

pub const CHAIN_MODEL: &str = include_str!("../../core/fixtures/chain.model");
pub const ADDER_MODEL: &str = include_str!("../../core/fixtures/adder.model");

fn load(text: &str) -> Result<Model, String> {
    io::load_str(text).map_err(|e| e.to_string())
}

/// `outer ∘ inner` as the two text matrices.
pub fn compose_text(model: &str, outer: &str, inner: &str) -> Result<String, String> {
    let m = load(model)?;
    let o = m.registry.multi(outer).map_err(|e| e.to_string())?;
    let i = m.registry.multi(inner).map_err(|e| e.to_string())?;
    let c = compose(o.body(), i.body()).map_err(|e| e.to_string())?;
    Ok(format!("O^in =\n{}\nO^out =\n{}", c.m_in(), c.m_out()))
}

pub fn render_text(model: &str, arrow: &str) -> Result<String, String> {
    let m = load(model)?;
    let a = m.registry.multi(arrow).map_err(|e| e.to_string())?;
    Ok(io::render_dot(&a))
}

/// Runs the single arrow of a dataflow model on `inputs`, returning
/// output port → value.
pub fn evaluate(model: &str, inputs: &BTreeMap<String, i64>) -> Result<BTreeMap<String, i64>, String> {
    let m = load(model)?;
    let b = m.bindings.as_ref().ok_or("the model has no algebra bindings")?;
    let alg = b.dataflow(&m.registry).map_err(|e| e.to_string())?;
    let arrows = m.registry.all_multi().map_err(|e| e.to_string())?;
    let [arrow] = arrows.as_slice() else {
        return Err(format!("expected one arrow, found {}", arrows.len()));
    };
    let mut v = Valuation::new();
    for (k, x) in inputs {
        v.insert(PortId::new(k).map_err(|e| e.to_string())?, *x);
    }
    let out = alg.evaluate(arrow, &v).map_err(|e| e.to_string())?;
    Ok(out.into_iter().map(|(p, x)| (p.to_string(), x)).collect())
}

/// The bundled adder on two 2-bit numbers.
pub fn add(a: u8, b: u8) -> Result<u8, String> {
    let bits = [("a0", a & 1), ("a1", a >> 1 & 1), ("b0", b & 1), ("b1", b >> 1 & 1)];
    let inputs = bits.iter().map(|(k, x)| (k.to_string(), i64::from(*x))).collect();
    let out = evaluate(ADDER_MODEL, &inputs)?;
    Ok((0..3).map(|k| (out[&format!("c{k}")] as u8) << k).sum())
}

#[cfg(target_arch = "wasm32")]
mod wasm {
    use wasm_bindgen::prelude::*;

    #[wasm_bindgen]
    pub fn chain_model() -> String {
        super::CHAIN_MODEL.to_string()
    }

    #[wasm_bindgen]
    pub fn compose(model: &str, outer: &str, inner: &str) -> Result<String, JsError> {
        super::compose_text(model, outer, inner).map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen]
    pub fn render(model: &str, arrow: &str) -> Result<String, JsError> {
        super::render_text(model, arrow).map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen]
    pub fn add(a: u8, b: u8) -> Result<u8, JsError> {
        super::add(a, b).map_err(|e| JsError::new(&e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composes_chain() {
        let out = compose_text(CHAIN_MODEL, "theta", "theta1").unwrap();
        assert!(out.contains("{l1.l3}") && out.contains("{l6.l8}"));
        assert!(compose_text(CHAIN_MODEL, "theta1", "nope").is_err());
    }

    #[test]
    fn renders() {
        assert!(render_text(CHAIN_MODEL, "theta").unwrap().starts_with("digraph"));
    }

    #[test]
    fn adds_every_pair() {
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(add(a, b).unwrap(), a + b);
            }
        }
    }

    #[test]
    fn bad_model_text() {
        assert!(compose_text("{", "a", "b").is_err());
    }
}
