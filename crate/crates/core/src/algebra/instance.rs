use std::collections::{BTreeMap, BTreeSet};

use crate::structure::{BoxShape, MultiArrow};

use super::{check_arity, is_identity, Algebra, AlgebraError};

/// An element of a usage set, e.g. a row of a table.
pub type Usage = String;

/// Graph of a usage function: argument tuple → result.
pub type UsageTable = BTreeMap<Vec<Usage>, Usage>;

/// Set-valued data for a structure: a usage set per box and a usage
/// function per arrow.
#[derive(Debug, Clone, Default)]
pub struct Instance {
    usage_sets: BTreeMap<String, BTreeSet<Usage>>,
    usage_fns: Vec<(MultiArrow, UsageTable)>,
}

/// Checks that every table is total on the product of its domains' usage
/// sets and lands in the codomain's usage set.
pub fn instance_new(
    usage_sets: BTreeMap<String, BTreeSet<Usage>>,
    usage_fns: Vec<(MultiArrow, UsageTable)>,
) -> Result<Instance, AlgebraError> {
    let inst = Instance { usage_sets, usage_fns };
    for (arrow, table) in &inst.usage_fns {
        let sets = arrow
            .domains()
            .iter()
            .map(|d| inst.set_of(d))
            .collect::<Result<Vec<_>, _>>()?;
        let mut tuples: Vec<Vec<Usage>> = vec![Vec::new()];
        for s in sets {
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    s.iter().map(move |u| {
                        let mut t = t.clone();
                        t.push(u.clone());
                        t
                    })
                })
                .collect();
        }
        let missing: Vec<String> = tuples
            .iter()
            .filter(|t| !table.contains_key(*t))
            .map(|t| format!("({})", t.join(",")))
            .collect();
        if !missing.is_empty() {
            return Err(AlgebraError::NotTotal {
                arrow: arrow.name().to_string(),
                missing,
            });
        }
        let target = inst.set_of(arrow.codomain())?;
        for (args, v) in table {
            if args.len() != arrow.arity() {
                return Err(AlgebraError::Arity {
                    arrow: arrow.name().to_string(),
                    expected: arrow.arity(),
                    found: args.len(),
                });
            }
            if !target.contains(v) {
                return Err(AlgebraError::ArgOutOfSet {
                    value: v.clone(),
                    box_id: arrow.codomain().id().to_string(),
                });
            }
        }
    }
    Ok(inst)
}

impl Instance {
    pub fn set_of(&self, b: &BoxShape) -> Result<&BTreeSet<Usage>, AlgebraError> {
        self.usage_sets
            .get(b.id())
            .ok_or_else(|| AlgebraError::MissingSample(b.id().to_string()))
    }

    pub fn usage_sets(&self) -> &BTreeMap<String, BTreeSet<Usage>> {
        &self.usage_sets
    }

    /// The usage sets as law-check samples.
    pub fn samples(&self) -> BTreeMap<String, Vec<Usage>> {
        self.usage_sets
            .iter()
            .map(|(k, v)| (k.clone(), v.iter().cloned().collect()))
            .collect()
    }
}

/// `I(θ)(args)`. Identity arrows evaluate to their argument; any other
/// arrow must have a registered usage function.
pub fn instance_eval(inst: &Instance, ma: &MultiArrow, args: &[Usage]) -> Result<Usage, AlgebraError> {
    check_arity(ma, args)?;
    for (d, a) in ma.domains().iter().zip(args) {
        if !inst.set_of(d)?.contains(a) {
            return Err(AlgebraError::ArgOutOfSet {
                value: a.clone(),
                box_id: d.id().to_string(),
            });
        }
    }
    if is_identity(ma) {
        return Ok(args[0].clone());
    }
    let (_, table) = inst
        .usage_fns
        .iter()
        .find(|(a, _)| a.same_arrow(ma))
        .ok_or_else(|| AlgebraError::UnknownArrow(ma.name().to_string()))?;
    Ok(table[args].clone())
}

impl Algebra for Instance {
    type Value = Usage;

    fn act(&self, arrow: &MultiArrow, args: &[Usage]) -> Result<Usage, AlgebraError> {
        instance_eval(self, arrow, args).map_err(|e| match e {
            AlgebraError::UnknownArrow(a) => AlgebraError::MissingAction(a),
            e => e,
        })
    }

    fn same(&self, _b: &BoxShape, x: &Usage, y: &Usage) -> bool {
        x == y
    }
}
