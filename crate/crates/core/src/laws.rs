//! Law checking for the structure and for algebras over it.
//!
//! The structure laws are theorems, so a failure here is a bug in the
//! kernel. The functor laws are properties of a particular algebra and
//! fail whenever that algebra does not respect composition.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::algebra::{Algebra, AlgebraError};
use crate::error::StructureError;
use crate::structure::{compose, multi_compose, tensor_box, BoxShape, MatArrow, MultiArrow, Registry};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawOutcome {
    pub law: String,
    pub subject: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub outcomes: Vec<LawOutcome>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LawOutcome> {
        self.outcomes.iter().filter(|o| !o.passed)
    }

    pub fn extend(&mut self, other: LawReport) {
        self.outcomes.extend(other.outcomes);
    }

    fn record(&mut self, law: &str, subject: String, failure: Option<String>) {
        self.outcomes.push(LawOutcome {
            law: law.to_string(),
            subject,
            passed: failure.is_none(),
            detail: failure,
        });
    }
}

/// Identity and composition laws of `alg` over the arrows of `reg`.
///
/// `samples` lists carrier values per box id. The identity law is checked
/// on every sample of every box; the composition law on every plug-in
/// `m ∘ᵢ n` of registered multi-arrows, with the k-th trial drawing the
/// k-th sample (cyclically) of each constituent.
pub fn check_functor_laws<A: Algebra>(
    alg: &A,
    reg: &Registry,
    samples: &BTreeMap<String, Vec<A::Value>>,
) -> Result<LawReport, AlgebraError> {
    let mut report = LawReport::default();
    let sample = |b: &BoxShape| -> Result<&Vec<A::Value>, AlgebraError> {
        samples
            .get(b.id())
            .filter(|xs| !xs.is_empty())
            .ok_or_else(|| AlgebraError::MissingSample(b.id().to_string()))
    };

    for b in reg.boxes() {
        let Some(xs) = samples.get(b.id()) else { continue };
        let id = MultiArrow::identity(b);
        let mut failure = None;
        for (k, x) in xs.iter().enumerate() {
            let y = alg.act(&id, std::slice::from_ref(x))?;
            if !alg.same(b, x, &y) {
                failure = Some(format!("sample {k}: {x:?} became {y:?}"));
                break;
            }
        }
        report.record("identity", b.id().to_string(), failure);
    }

    let arrows = reg.all_multi()?;
    for m in &arrows {
        for n in &arrows {
            for i in 0..m.arity() {
                if m.domains()[i] != *n.codomain() {
                    continue;
                }
                let mn = multi_compose(m, i, n)?;
                let trials = mn
                    .domains()
                    .iter()
                    .map(|d| sample(d).map(Vec::len))
                    .collect::<Result<Vec<_>, _>>()?
                    .into_iter()
                    .max()
                    .unwrap_or(1);
                let mut failure = None;
                for k in 0..trials {
                    let args = mn
                        .domains()
                        .iter()
                        .map(|d| sample(d).map(|xs| xs[k % xs.len()].clone()))
                        .collect::<Result<Vec<_>, _>>()?;
                    let whole = alg.act(&mn, &args)?;
                    let inner = alg.act(n, &args[i..i + n.arity()])?;
                    let mut outer_args = args[..i].to_vec();
                    outer_args.push(inner);
                    outer_args.extend_from_slice(&args[i + n.arity()..]);
                    let staged = alg.act(m, &outer_args)?;
                    if !alg.same(m.codomain(), &whole, &staged) {
                        failure = Some(format!("trial {k}: {whole:?} != {staged:?}"));
                        break;
                    }
                }
                report.record("composition", format!("{} ∘{i} {}", m.name(), n.name()), failure);
            }
        }
    }
    Ok(report)
}

/// Identity, associativity and interchange on the registered arrows.
pub fn check_structure_laws(reg: &Registry) -> Result<LawReport, StructureError> {
    let mut report = LawReport::default();
    let mats: Vec<(String, MatArrow)> = reg
        .arrows()
        .map(|(id, a)| (id.to_string(), crate::structure::to_mat(a)))
        .collect();

    for (id, m) in &mats {
        let left = compose(&MatArrow::identity(m.codomain()), m)?;
        let right = compose(m, &MatArrow::identity(m.domain()))?;
        let failure = (left != *m || right != *m).then(|| "identity composite differs".to_string());
        report.record("identity", id.clone(), failure);
    }

    let composable = |outer: &MatArrow, inner: &MatArrow| inner.codomain() == outer.domain();
    for (pi, p) in &mats {
        for (mi, m) in &mats {
            if !composable(p, m) {
                continue;
            }
            for (ni, n) in &mats {
                if !composable(m, n) {
                    continue;
                }
                let a = compose(p, &compose(m, n)?)?;
                let b = compose(&compose(p, m)?, n)?;
                let failure = (a != b).then(|| format!("{a:?}\n!=\n{b:?}"));
                report.record("associativity", format!("{pi}, {mi}, {ni}"), failure);
            }
        }
    }

    // Interchange on pairs of composable chains over disjoint boxes.
    let chains: Vec<(String, &MatArrow, &MatArrow)> = mats
        .iter()
        .flat_map(|(ai, a)| {
            mats.iter()
                .filter(move |(_, t)| composable(a, t))
                .map(move |(ti, t)| (format!("{ai}∘{ti}"), a, t))
        })
        .collect();
    for (i, (n1, a1, t1)) in chains.iter().enumerate() {
        for (n2, a2, t2) in &chains[i + 1..] {
            let disjoint = |x: &BoxShape, y: &BoxShape| !x.all_ports().any(|p| y.has_port(p));
            if !disjoint(t1.domain(), t2.domain())
                || !disjoint(a1.domain(), a2.domain())
                || !disjoint(a1.codomain(), a2.codomain())
            {
                continue;
            }
            let lhs = compose(a1, t1)?.tensor(&compose(a2, t2)?)?;
            let rhs = compose(&a1.tensor(a2)?, &t1.tensor(t2)?)?;
            let failure = (lhs != rhs).then(|| format!("{lhs:?}\n!=\n{rhs:?}"));
            report.record("interchange", format!("{n1} ⊗ {n2}"), failure);
        }
    }

    for b in reg.boxes() {
        let unit = BoxShape::unit();
        let failure =
            (tensor_box(&unit, b) != *b || tensor_box(b, &unit) != *b).then(|| "unit does not cancel".to_string());
        report.record("unit", b.id().to_string(), failure);
    }
    Ok(report)
}
