use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::semiring::{LinkLabel, Word};
use crate::structure::{BoxShape, MultiArrow, Registry};

use super::{check_arity, Algebra, AlgebraError};

/// Absolute tolerance of mass equality.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// How the mass of a composite box is obtained from its parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassVariant {
    /// `ma = ma₁ + … + maₙ`
    SumOnly,
    /// `ma = ma₁ + … + maₙ + m_L`, where `m_L` sums the masses of the links
    /// present in the arrow. A composite word weighs the sum of its labels.
    SumPlusLinks,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MassAssignment {
    pub box_mass: BTreeMap<String, f64>,
    pub link_mass: BTreeMap<LinkLabel, f64>,
}

#[derive(Debug, Clone)]
pub struct MassAlgebra {
    assignment: MassAssignment,
    variant: MassVariant,
}

pub fn mass_algebra(ma: MassAssignment, variant: MassVariant) -> Result<MassAlgebra, AlgebraError> {
    for (b, &m) in &ma.box_mass {
        if !(m > 0.0 && m.is_finite()) {
            return Err(AlgebraError::InvalidMass {
                what: b.clone(),
                bound: "positive",
                value: m,
            });
        }
    }
    for (l, &m) in &ma.link_mass {
        if !(m >= 0.0 && m.is_finite()) {
            return Err(AlgebraError::InvalidMass {
                what: l.to_string(),
                bound: "nonnegative",
                value: m,
            });
        }
    }
    Ok(MassAlgebra {
        assignment: ma,
        variant,
    })
}

impl MassAlgebra {
    pub fn variant(&self) -> MassVariant {
        self.variant
    }

    pub fn assignment(&self) -> &MassAssignment {
        &self.assignment
    }

    pub fn box_mass(&self, b: &BoxShape) -> Result<f64, AlgebraError> {
        self.assignment
            .box_mass
            .get(b.id())
            .copied()
            .ok_or_else(|| AlgebraError::MissingMass(b.id().to_string()))
    }

    fn word_mass(&self, w: &Word) -> Result<f64, AlgebraError> {
        w.labels()
            .iter()
            .map(|l| {
                self.assignment
                    .link_mass
                    .get(l)
                    .copied()
                    .ok_or_else(|| AlgebraError::MissingMass(l.to_string()))
            })
            .sum()
    }

    /// `m_L` of an arrow: total mass of the words it carries.
    pub fn link_mass(&self, arrow: &MultiArrow) -> Result<f64, AlgebraError> {
        arrow.body().words().map(|w| self.word_mass(w)).sum()
    }

    /// Mass of the codomain computed from the assigned constituent masses.
    pub fn mass_of(&self, arrow: &MultiArrow) -> Result<f64, AlgebraError> {
        let args = arrow
            .domains()
            .iter()
            .map(|d| self.box_mass(d))
            .collect::<Result<Vec<_>, _>>()?;
        self.act(arrow, &args)
    }

    /// `n` random masses per box of `reg` (and per box appearing as a
    /// tensor of registered boxes), uniform in `(0.1, 100)`.
    pub fn random_samples(reg: &Registry, n: usize, seed: u64) -> BTreeMap<String, Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        reg.boxes()
            .map(|b| {
                let xs = (0..n).map(|_| rng.random_range(0.1..100.0)).collect();
                (b.id().to_string(), xs)
            })
            .collect()
    }
}

impl Algebra for MassAlgebra {
    type Value = f64;

    fn act(&self, arrow: &MultiArrow, args: &[f64]) -> Result<f64, AlgebraError> {
        check_arity(arrow, args)?;
        let parts: f64 = args.iter().sum();
        match self.variant {
            MassVariant::SumOnly => Ok(parts),
            MassVariant::SumPlusLinks => Ok(parts + self.link_mass(arrow)?),
        }
    }

    fn same(&self, _b: &BoxShape, x: &f64, y: &f64) -> bool {
        (x - y).abs() <= MASS_TOLERANCE
    }
}
