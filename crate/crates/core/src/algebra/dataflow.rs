use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::structure::{BoxShape, MultiArrow, PortId};

use super::{check_arity, Algebra, AlgebraError};

/// Values on ports.
pub type Valuation = BTreeMap<PortId, i64>;

type BehaviorFn = dyn Fn(&Valuation) -> Result<Valuation, AlgebraError> + Send + Sync;

/// What a box does: a function from valuations of its inputs to
/// valuations of its outputs. This is the carrier of the dataflow algebra.
#[derive(Clone)]
pub struct Behavior {
    box_id: String,
    inputs: BTreeSet<PortId>,
    outputs: BTreeSet<PortId>,
    f: Arc<BehaviorFn>,
}

impl fmt::Debug for Behavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Behavior({} : {:?} -> {:?})", self.box_id, self.inputs, self.outputs)
    }
}

fn show(v: &Valuation) -> String {
    v.iter().map(|(k, x)| format!("{k}={x}")).collect::<Vec<_>>().join(",")
}

impl Behavior {
    pub fn new(
        b: &BoxShape,
        f: impl Fn(&Valuation) -> Result<Valuation, AlgebraError> + Send + Sync + 'static,
    ) -> Self {
        Behavior {
            box_id: b.id().to_string(),
            inputs: b.in_ports().clone(),
            outputs: b.out_ports().clone(),
            f: Arc::new(f),
        }
    }

    /// Behavior given by a finite table; inputs not in the table fail with
    /// `UndefinedInput`.
    pub fn from_table(b: &BoxShape, rows: BTreeMap<Valuation, Valuation>) -> Self {
        let id = b.id().to_string();
        Behavior::new(b, move |v| {
            rows.get(v).cloned().ok_or_else(|| AlgebraError::UndefinedInput {
                box_id: id.clone(),
                input: show(v),
            })
        })
    }

    pub fn box_id(&self) -> &str {
        &self.box_id
    }

    pub fn inputs(&self) -> &BTreeSet<PortId> {
        &self.inputs
    }

    pub fn outputs(&self) -> &BTreeSet<PortId> {
        &self.outputs
    }

    /// Runs the behavior on the input ports of `v`; extra keys are ignored.
    pub fn apply(&self, v: &Valuation) -> Result<Valuation, AlgebraError> {
        let mut input = Valuation::new();
        for p in &self.inputs {
            let x = v
                .get(p)
                .ok_or_else(|| AlgebraError::UnderdeterminedPort(p.to_string()))?;
            input.insert(p.clone(), *x);
        }
        let out = (self.f)(&input)?;
        for p in &self.outputs {
            if !out.contains_key(p) {
                return Err(AlgebraError::UnderdeterminedPort(p.to_string()));
            }
        }
        Ok(out)
    }
}

/// Wiring semantics: values enter at the codomain inputs, travel along
/// links, each constituent fires once all its inputs are known, and the
/// codomain outputs are read off the output links.
#[derive(Debug, Clone, Default)]
pub struct DataflowAlgebra {
    box_fns: BTreeMap<String, Behavior>,
    defaults: Valuation,
    domain: Vec<i64>,
}

pub fn dataflow_algebra(box_fns: BTreeMap<String, Behavior>) -> DataflowAlgebra {
    DataflowAlgebra {
        box_fns,
        defaults: Valuation::new(),
        domain: vec![0, 1],
    }
}

impl DataflowAlgebra {
    /// Values used for ports that no link reaches.
    pub fn with_defaults(mut self, defaults: Valuation) -> Self {
        self.defaults = defaults;
        self
    }

    /// Per-port value domain used by [`Algebra::same`] to compare
    /// behaviors exhaustively. Defaults to bits.
    pub fn with_value_domain(mut self, domain: Vec<i64>) -> Self {
        self.domain = domain;
        self
    }

    pub fn behavior(&self, box_id: &str) -> Option<&Behavior> {
        self.box_fns.get(box_id)
    }

    /// Runs `arrow` on `inputs` with the registered box behaviors.
    pub fn evaluate(&self, arrow: &MultiArrow, inputs: &Valuation) -> Result<Valuation, AlgebraError> {
        let parts = arrow
            .domains()
            .iter()
            .map(|d| {
                self.box_fns
                    .get(d.id())
                    .cloned()
                    .ok_or_else(|| AlgebraError::MissingAction(d.id().to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.act(arrow, &parts)?.apply(inputs)
    }

    /// Every valuation of `ports` over the value domain.
    fn all_valuations(&self, ports: &BTreeSet<PortId>) -> Vec<Valuation> {
        let mut out = vec![Valuation::new()];
        for p in ports {
            out = out
                .into_iter()
                .flat_map(|v| {
                    self.domain.iter().map(move |x| {
                        let mut v = v.clone();
                        v.insert(p.clone(), *x);
                        v
                    })
                })
                .collect();
        }
        out
    }
}

/// The wiring of one arrow, resolved into a firing order.
struct Network {
    name: String,
    parts: Vec<Behavior>,
    order: Vec<usize>,
    in_sources: BTreeMap<PortId, Vec<PortId>>,
    out_sources: BTreeMap<PortId, Vec<PortId>>,
    owner: BTreeMap<PortId, usize>,
    inputs: BTreeSet<PortId>,
    outputs: BTreeSet<PortId>,
    defaults: Valuation,
}

impl Network {
    fn build(arrow: &MultiArrow, parts: &[Behavior], defaults: &Valuation) -> Result<Self, AlgebraError> {
        let body = arrow.body();
        let mut in_sources: BTreeMap<PortId, Vec<PortId>> = BTreeMap::new();
        for (t, s, _) in body.m_in().nonzero() {
            in_sources.entry(t.clone()).or_default().push(s.clone());
        }
        let mut out_sources: BTreeMap<PortId, Vec<PortId>> = BTreeMap::new();
        for (t, s, _) in body.m_out().nonzero() {
            out_sources.entry(t.clone()).or_default().push(s.clone());
        }
        let mut owner = BTreeMap::new();
        for (k, d) in arrow.domains().iter().enumerate() {
            for p in d.out_ports() {
                owner.insert(p.clone(), k);
            }
        }

        // Kahn's algorithm on constituents; k waits on j when an input of
        // k is fed from an output of j.
        let n = parts.len();
        let mut deps: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for (k, d) in arrow.domains().iter().enumerate() {
            for t in d.in_ports() {
                for s in in_sources.get(t).into_iter().flatten() {
                    if let Some(&j) = owner.get(s) {
                        deps[k].insert(j);
                    }
                }
            }
        }
        let mut indegree: Vec<usize> = deps.iter().map(BTreeSet::len).collect();
        let mut ready: VecDeque<usize> = (0..n).filter(|&k| indegree[k] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(j) = ready.pop_front() {
            order.push(j);
            for k in 0..n {
                if deps[k].contains(&j) {
                    indegree[k] -= 1;
                    if indegree[k] == 0 {
                        ready.push_back(k);
                    }
                }
            }
        }
        if order.len() < n {
            let stuck = (0..n)
                .filter(|k| !order.contains(k))
                .map(|k| arrow.domains()[k].id().to_string())
                .collect();
            return Err(AlgebraError::CyclicDependency(stuck));
        }
        Ok(Network {
            name: arrow.name().to_string(),
            parts: parts.to_vec(),
            order,
            in_sources,
            out_sources,
            owner,
            inputs: arrow.codomain().in_ports().clone(),
            outputs: arrow.codomain().out_ports().clone(),
            defaults: defaults.clone(),
        })
    }

    fn collect(&self, port: &PortId, sources: Option<&Vec<PortId>>, known: &Valuation) -> Result<i64, AlgebraError> {
        let mut values = BTreeSet::new();
        for s in sources.into_iter().flatten() {
            let x = known
                .get(s)
                .ok_or_else(|| AlgebraError::UnderdeterminedPort(s.to_string()))?;
            values.insert(*x);
        }
        match values.len() {
            0 => self
                .defaults
                .get(port)
                .copied()
                .ok_or_else(|| AlgebraError::UnderdeterminedPort(port.to_string())),
            1 => Ok(*values.first().expect("one value")),
            _ => Err(AlgebraError::AmbiguousConvergence {
                port: port.to_string(),
                values: values.into_iter().collect(),
            }),
        }
    }

    fn run(&self, input: &Valuation) -> Result<Valuation, AlgebraError> {
        // `known` holds codomain inputs and constituent outputs; the two
        // port sets are disjoint.
        let mut known: Valuation = input
            .iter()
            .filter(|(p, _)| self.inputs.contains(*p))
            .map(|(p, x)| (p.clone(), *x))
            .collect();
        for &k in &self.order {
            let part = &self.parts[k];
            let mut v = Valuation::new();
            for t in part.inputs() {
                v.insert(t.clone(), self.collect(t, self.in_sources.get(t), &known)?);
            }
            let out = part.apply(&v)?;
            for p in part.outputs() {
                if self.owner.get(p) == Some(&k) {
                    known.insert(p.clone(), out[p]);
                }
            }
        }
        let mut result = Valuation::new();
        for o in &self.outputs {
            result.insert(o.clone(), self.collect(o, self.out_sources.get(o), &known)?);
        }
        Ok(result)
    }
}

impl Algebra for DataflowAlgebra {
    type Value = Behavior;

    fn act(&self, arrow: &MultiArrow, args: &[Behavior]) -> Result<Behavior, AlgebraError> {
        check_arity(arrow, args)?;
        for (d, b) in arrow.domains().iter().zip(args) {
            if b.inputs() != d.in_ports() || b.outputs() != d.out_ports() {
                return Err(AlgebraError::Arity {
                    arrow: format!("{} (behavior of {} on {})", arrow.name(), b.box_id(), d.id()),
                    expected: d.in_ports().len() + d.out_ports().len(),
                    found: b.inputs().len() + b.outputs().len(),
                });
            }
        }
        let net = Network::build(arrow, args, &self.defaults)?;
        let name = net.name.clone();
        let mut b = Behavior::new(arrow.codomain(), move |v| net.run(v));
        b.box_id = format!("{}[{}]", arrow.codomain().id(), name);
        Ok(b)
    }

    /// Exhaustive comparison over the value domain. Two runs that both
    /// fail count as equal.
    fn same(&self, b: &BoxShape, x: &Behavior, y: &Behavior) -> bool {
        self.all_valuations(b.in_ports())
            .iter()
            .all(|v| match (x.apply(v), y.apply(v)) {
                (Ok(a), Ok(c)) => a == c,
                (Err(_), Err(_)) => true,
                _ => false,
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, adder_behaviors, adder_inputs, adder_output};
    use crate::laws::check_functor_laws;
    use crate::structure::{multi_compose, ports, Registry};

    fn port(p: &str) -> PortId {
        PortId::new(p).unwrap()
    }

    #[test]
    fn four_box_adder_truth_table() {
        let reg = fixtures::adder().unwrap();
        let alg = dataflow_algebra(adder_behaviors(&reg));
        let arrow = reg.multi("adder").unwrap();
        for a in 0..4 {
            for b in 0..4 {
                let out = alg.evaluate(&arrow, &adder_inputs(a, b)).unwrap();
                assert_eq!(adder_output(&out), a + b, "{a} + {b}");
            }
        }
    }

    #[test]
    fn two_box_adder_needs_its_default() {
        let reg = fixtures::adder2().unwrap();
        let arrow = reg.multi("adder").unwrap();
        let bare = dataflow_algebra(adder_behaviors(&reg));
        assert!(matches!(
            bare.evaluate(&arrow, &adder_inputs(1, 1)),
            Err(AlgebraError::UnderdeterminedPort(p)) if p == "f1_cin"
        ));
        let alg = bare.with_defaults(fixtures::adder2_defaults());
        for a in 0..4 {
            for b in 0..4 {
                let out = alg.evaluate(&arrow, &adder_inputs(a, b)).unwrap();
                assert_eq!(adder_output(&out), a + b);
            }
        }
    }

    #[test]
    fn flatten_then_evaluate_agrees_with_nested() {
        let reg = fixtures::adder_hier().unwrap();
        let alg = dataflow_algebra(adder_behaviors(&reg));
        let high = reg.multi("high").unwrap();
        let low = reg.multi("low").unwrap();
        let flat = multi_compose(&high, 0, &low).unwrap();
        let xs: Vec<Behavior> = ["X1", "X2"].iter().map(|b| alg.behavior(b).unwrap().clone()).collect();
        let m = alg.act(&low, &xs).unwrap();
        let rest: Vec<Behavior> = ["X3", "X4"].iter().map(|b| alg.behavior(b).unwrap().clone()).collect();
        let nested = alg.act(&high, &[vec![m], rest].concat()).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                let v = adder_inputs(a, b);
                let direct = alg.evaluate(&flat, &v).unwrap();
                assert_eq!(direct, nested.apply(&v).unwrap());
                assert_eq!(adder_output(&direct), a + b);
            }
        }
    }

    #[test]
    fn functor_laws_on_nested_adder() {
        let reg = fixtures::adder_hier().unwrap();
        let alg = dataflow_algebra(adder_behaviors(&reg));
        let samples = ["X1", "X2", "X3", "X4"]
            .iter()
            .map(|b| (b.to_string(), vec![alg.behavior(b).unwrap().clone()]))
            .collect();
        let report = check_functor_laws(&alg, &reg, &samples).unwrap();
        assert!(report.passed(), "{report:#?}");
        assert_eq!(report.outcomes.iter().filter(|o| o.law == "composition").count(), 1);
    }

    #[test]
    fn identity_arrow_is_the_box() {
        let reg = fixtures::adder().unwrap();
        let alg = dataflow_algebra(adder_behaviors(&reg));
        let x1 = reg.get_box("X1").unwrap();
        let f = alg.behavior("X1").unwrap();
        let g = alg.act(&MultiArrow::identity(x1), std::slice::from_ref(f)).unwrap();
        assert!(alg.same(x1, f, &g));
    }

    fn copier() -> (Registry, DataflowAlgebra) {
        let mut reg = Registry::new();
        let s = reg
            .box_new("S", ports(["s_in"]).unwrap(), ports(["s_out"]).unwrap())
            .unwrap();
        let t = reg
            .box_new("T", ports(["t_i", "t_j"]).unwrap(), ports(["t_o", "t_p"]).unwrap())
            .unwrap();
        let dom = crate::structure::tensor_box(&s, &t);
        let outer = reg
            .box_new("W", ports(["w_in", "w_x"]).unwrap(), ports(["w_o", "w_p"]).unwrap())
            .unwrap();
        reg.arrow_new(
            "fan",
            &dom,
            &outer,
            fixtures::links(&[("k1", "s_in", "w_in"), ("k2", "t_i", "s_out"), ("k3", "t_j", "s_out")]).unwrap(),
            fixtures::links(&[("k4", "w_o", "t_o"), ("k5", "w_p", "t_p")]).unwrap(),
        )
        .unwrap();
        let inc = Behavior::new(&s, |v| {
            Ok([(PortId::new("s_out").unwrap(), v[&PortId::new("s_in").unwrap()] + 1)].into())
        });
        let pass = Behavior::new(&t, |v| {
            Ok([
                (PortId::new("t_o").unwrap(), v[&PortId::new("t_i").unwrap()]),
                (PortId::new("t_p").unwrap(), v[&PortId::new("t_j").unwrap()]),
            ]
            .into())
        });
        let alg = dataflow_algebra([("S".to_string(), inc), ("T".to_string(), pass)].into());
        (reg, alg)
    }

    #[test]
    fn diverging_wire_copies() {
        let (reg, alg) = copier();
        let out = alg
            .evaluate(
                &reg.multi("fan").unwrap(),
                &[(port("w_in"), 4), (port("w_x"), 0)].into(),
            )
            .unwrap();
        assert_eq!(out, [(port("w_o"), 5), (port("w_p"), 5)].into());
    }

    #[test]
    fn converging_wires_must_agree() {
        let mut reg = Registry::new();
        let t = reg
            .box_new("T", ports(["t_i"]).unwrap(), ports(["t_o"]).unwrap())
            .unwrap();
        let w = reg
            .box_new("W", ports(["w_a", "w_b"]).unwrap(), ports(["w_o"]).unwrap())
            .unwrap();
        reg.arrow_new(
            "join",
            &t,
            &w,
            fixtures::links(&[("k1", "t_i", "w_a"), ("k2", "t_i", "w_b")]).unwrap(),
            fixtures::links(&[("k3", "w_o", "t_o")]).unwrap(),
        )
        .unwrap();
        let id = Behavior::new(&t, |v| {
            Ok([(PortId::new("t_o").unwrap(), v[&PortId::new("t_i").unwrap()])].into())
        });
        let alg = dataflow_algebra([("T".to_string(), id)].into());
        let arrow = reg.multi("join").unwrap();
        let agree = alg
            .evaluate(&arrow, &[(port("w_a"), 1), (port("w_b"), 1)].into())
            .unwrap();
        assert_eq!(agree[&port("w_o")], 1);
        let err = alg
            .evaluate(&arrow, &[(port("w_a"), 0), (port("w_b"), 1)].into())
            .unwrap_err();
        assert_eq!(
            err,
            AlgebraError::AmbiguousConvergence {
                port: "t_i".into(),
                values: vec![0, 1]
            }
        );
    }

    #[test]
    fn feedback_is_rejected_eagerly() {
        let reg = fixtures::chain().unwrap();
        let x = reg.get_box("X").unwrap();
        let any = Behavior::new(x, |_| Ok(Valuation::new()));
        let alg = dataflow_algebra([("X".to_string(), any.clone())].into());
        assert!(matches!(
            alg.act(&reg.multi("theta1").unwrap(), &[any]),
            Err(AlgebraError::CyclicDependency(b)) if b == ["X"]
        ));
    }

    #[test]
    fn table_behaviors() {
        let reg = fixtures::adder().unwrap();
        let x1 = reg.get_box("X1").unwrap();
        let row = |d0, d1, s, c| {
            (
                [(port("x1_d0"), d0), (port("x1_d1"), d1)].into(),
                [(port("x1_s"), s), (port("x1_c"), c)].into(),
            )
        };
        let partial = Behavior::from_table(x1, [row(0, 0, 0, 0), row(1, 1, 0, 1)].into());
        let full = fixtures::half_adder(x1);
        let alg = dataflow_algebra(BTreeMap::new());
        assert!(!alg.same(x1, &partial, &full));
        let complete = Behavior::from_table(
            x1,
            [row(0, 0, 0, 0), row(0, 1, 1, 0), row(1, 0, 1, 0), row(1, 1, 0, 1)].into(),
        );
        assert!(alg.same(x1, &complete, &full));
        assert!(matches!(
            partial.apply(&[(port("x1_d0"), 1), (port("x1_d1"), 0)].into()),
            Err(AlgebraError::UndefinedInput { .. })
        ));
    }
}
