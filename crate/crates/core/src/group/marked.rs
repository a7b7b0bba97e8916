use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::Value;
use thiserror::Error;

use super::ball::BallLayer;
use super::element::{AffineElement, Element};
use super::membership::Membership;
use super::structure::{unit_vector, Structure};
use crate::words::{ReducedWord, WordError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("lamp group of a wreath product must be abelian")]
    NonAbelianLamp,
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("unknown membership predicate '{0}'")]
    UnknownPredicate(String),
    #[error("cannot parse group spec '{spec}': {message}")]
    Spec { spec: String, message: String },
    #[error("ball enumeration exceeded the budget of {budget} elements")]
    BudgetExceeded {
        budget: usize,
        completed: Vec<BallLayer>,
    },
}

/// What a marked group is known to be, beyond its arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Abelian,
    Lamplighter {
        q: u64,
    },
    BaumslagSolitar {
        q: u64,
    },
    /// `S_{d,r}` with its standard generators; depth 1 is `Z^r`.
    FreeSolvable {
        depth: usize,
    },
    Wreath,
    Custom,
}

/// A group together with an ordered tuple of generator images `s̄_1..s̄_r`.
#[derive(Clone, Debug)]
pub struct MarkedGroup {
    label: String,
    structure: Arc<Structure>,
    generators: Vec<Element>,
    inverses: Vec<Element>,
    torsion: Vec<bool>,
    family: Family,
    predicates: BTreeMap<String, Membership>,
}

impl MarkedGroup {
    /// Builds a marked group from its arithmetic and generator images.
    pub fn from_images(
        label: impl Into<String>,
        structure: Arc<Structure>,
        generators: Vec<Element>,
        family: Family,
    ) -> Result<Self, GroupError> {
        if let Some(bad) = generators.iter().find(|g| !structure.contains(g)) {
            return Err(GroupError::InvalidElement(format!(
                "{bad:?} is not in normal form"
            )));
        }
        let inverses = generators.iter().map(|g| structure.inverse(g)).collect();
        let torsion = generators
            .iter()
            .map(|g| structure.order(g).is_some())
            .collect();
        Ok(Self {
            label: label.into(),
            structure,
            generators,
            inverses,
            torsion,
            family,
            predicates: BTreeMap::new(),
        })
    }

    /// `Z^r`, or `Z/m_1 × … × Z/m_r` when moduli are given.
    pub fn abelian(rank: usize, moduli: Option<&[u64]>) -> Result<Self, GroupError> {
        let moduli = match moduli {
            None => vec![0; rank],
            Some(m) if m.len() != rank => {
                return Err(GroupError::InvalidParameter(format!(
                    "{} moduli given for rank {rank}",
                    m.len()
                )))
            }
            Some(m) => {
                if let Some(bad) = m.iter().find(|&&x| x < 2) {
                    return Err(GroupError::InvalidParameter(format!(
                        "modulus {bad} is below 2"
                    )));
                }
                m.to_vec()
            }
        };
        let label = if moduli.iter().all(|&m| m == 0) {
            format!("zr:{rank}")
        } else {
            format!("tm:{}", join(&moduli))
        };
        let generators = (0..rank).map(|i| unit_vector(rank, i)).collect();
        Self::from_images(
            label,
            Arc::new(Structure::Abelian { moduli }),
            generators,
            Family::Abelian,
        )
    }

    /// `Z_q ≀ Z` with generators `a` (lamp at the origin) and `t` (move).
    pub fn lamplighter(q: u64) -> Result<Self, GroupError> {
        if q < 2 {
            return Err(GroupError::InvalidParameter(format!(
                "lamplighter needs q ≥ 2, got {q}"
            )));
        }
        let lamp = Self::abelian(1, Some(&[q]))?;
        let base = Self::abelian(1, None)?;
        let mut group = Self::wreath(&lamp, &base)?;
        group.label = format!("ll:{q}");
        group.family = Family::Lamplighter { q };
        group.register_predicate("even-t", Membership::EvenShift);
        Ok(group)
    }

    /// BS(1,q) = ⟨a, b | a^-1 b a = b^q⟩.
    pub fn baumslag_solitar(q: u64) -> Result<Self, GroupError> {
        if q < 2 {
            return Err(GroupError::InvalidParameter(format!(
                "BS(1,q) needs q ≥ 2, got {q}"
            )));
        }
        let a = Element::Affine(AffineElement {
            shift: 1,
            numerator: BigInt::zero(),
            depth: 0,
        });
        let b = Element::Affine(AffineElement {
            shift: 0,
            numerator: BigInt::one(),
            depth: 0,
        });
        let mut group = Self::from_images(
            format!("bs:{q}"),
            Arc::new(Structure::BaumslagSolitar { q }),
            vec![a, b],
            Family::BaumslagSolitar { q },
        )?;
        group.register_predicate("even-t", Membership::EvenShift);
        Ok(group)
    }

    /// `lamp ≀ base`, generated by the lamp generators at the base identity
    /// followed by the base generators.
    pub fn wreath(lamp: &MarkedGroup, base: &MarkedGroup) -> Result<Self, GroupError> {
        if !lamp.structure.is_abelian() {
            return Err(GroupError::NonAbelianLamp);
        }
        let structure = Arc::new(Structure::Wreath {
            lamp: lamp.structure.clone(),
            base: base.structure.clone(),
        });
        let base_identity = base.identity();
        let lamp_generators = lamp.generators.iter().map(|g| {
            let mut lamps = BTreeMap::new();
            if !lamp.structure.is_identity(g) {
                lamps.insert(base_identity.clone(), g.clone());
            }
            Element::wreath(lamps, base_identity.clone())
        });
        let base_generators = base
            .generators
            .iter()
            .map(|g| Element::wreath(BTreeMap::new(), g.clone()));
        let generators = lamp_generators.chain(base_generators).collect();
        Self::from_images(
            format!("wr({}, {})", lamp.label, base.label),
            structure,
            generators,
            Family::Wreath,
        )
    }

    /// The free solvable group `S_{d,r}` in its recursive Magnus
    /// representation inside `Z^r ≀ S_{d-1,r}`.
    pub fn free_solvable(depth: usize, rank: usize) -> Result<Self, GroupError> {
        if depth == 0 || rank == 0 {
            return Err(GroupError::InvalidParameter(format!(
                "free solvable group needs d ≥ 1 and r ≥ 1, got d={depth}, r={rank}"
            )));
        }
        let mut structure = Arc::new(Structure::free_abelian(rank));
        for _ in 1..depth {
            structure = Arc::new(Structure::Wreath {
                lamp: Arc::new(Structure::free_abelian(rank)),
                base: structure,
            });
        }
        let generators = (0..rank)
            .map(|i| structure.tower_generator(i).expect("tower"))
            .collect();
        Self::from_images(
            format!("sdr:{depth},{rank}"),
            structure,
            generators,
            Family::FreeSolvable { depth },
        )
    }

    /// The same group marked by the images of the given words.
    pub fn remark(&self, words: &[ReducedWord]) -> Result<Self, GroupError> {
        let generators = words
            .iter()
            .map(|w| self.evaluate_word(w))
            .collect::<Result<Vec<_>, _>>()?;
        let family = if self.structure.is_abelian() {
            Family::Abelian
        } else {
            Family::Custom
        };
        let label = format!(
            "mark({}| {})",
            self.label,
            words
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("; ")
        );
        let mut group = Self::from_images(label, self.structure.clone(), generators, family)?;
        for (name, predicate) in &self.predicates {
            if !matches!(predicate, Membership::Cosets(_)) {
                group.predicates.insert(name.clone(), predicate.clone());
            }
        }
        Ok(group)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn structure_arc(&self) -> &Arc<Structure> {
        &self.structure
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn identity(&self) -> Element {
        self.structure.identity()
    }

    pub fn is_identity(&self, x: &Element) -> bool {
        self.structure.is_identity(x)
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn generator(&self, index: usize) -> &Element {
        &self.generators[index]
    }

    pub fn generator_inverse(&self, index: usize) -> &Element {
        &self.inverses[index]
    }

    /// Whether `s̄_i` has finite order.
    pub fn is_torsion_generator(&self, index: usize) -> bool {
        self.torsion[index]
    }

    pub fn torsion_flags(&self) -> &[bool] {
        &self.torsion
    }

    /// `Z^r` with its unit vectors as generators.
    pub fn is_standard_free_abelian(&self) -> bool {
        matches!(self.structure.as_ref(), Structure::Abelian { moduli } if moduli.len() == self.rank() && moduli.iter().all(|&m| m == 0))
            && self
                .generators
                .iter()
                .enumerate()
                .all(|(i, g)| *g == unit_vector(self.rank(), i))
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Element {
        self.structure.multiply(a, b)
    }

    pub fn inverse(&self, x: &Element) -> Element {
        self.structure.inverse(x)
    }

    pub fn power(&self, x: &Element, exponent: i64) -> Element {
        self.structure.power(x, exponent)
    }

    /// `s̄_i^m`.
    pub fn generator_power(&self, index: usize, exponent: i64) -> Element {
        self.structure.power(&self.generators[index], exponent)
    }

    /// Right-multiplies `x` by the image of one letter.
    pub fn step(&self, x: &mut Element, generator: usize, inverse: bool) {
        let factor = if inverse {
            &self.inverses[generator]
        } else {
            &self.generators[generator]
        };
        self.structure.multiply_assign(x, factor);
    }

    pub fn check_word(&self, word: &ReducedWord) -> Result<(), GroupError> {
        if word.rank() == self.rank() {
            Ok(())
        } else {
            Err(GroupError::RankMismatch {
                expected: self.rank(),
                found: word.rank(),
            })
        }
    }

    pub fn evaluate_word(&self, word: &ReducedWord) -> Result<Element, GroupError> {
        self.check_word(word)?;
        let mut x = self.identity();
        for letter in word.letters() {
            self.step(&mut x, letter.generator, letter.inverse);
        }
        Ok(x)
    }

    pub fn canonical_key(&self, x: &Element) -> Vec<u8> {
        x.canonical_key()
    }

    pub fn contains(&self, x: &Element) -> bool {
        self.structure.contains(x)
    }

    pub fn element_to_json(&self, x: &Element) -> Value {
        x.to_json()
    }

    pub fn element_from_json(&self, value: &Value) -> Result<Element, GroupError> {
        Element::from_json(value)
            .filter(|x| self.contains(x))
            .ok_or_else(|| {
                GroupError::InvalidElement(format!("{value} is not an element of {}", self.label))
            })
    }

    pub fn register_predicate(&mut self, name: impl Into<String>, predicate: Membership) {
        self.predicates.insert(name.into(), predicate);
    }

    pub fn predicate(&self, name: &str) -> Option<&Membership> {
        self.predicates.get(name)
    }

    /// `s̄_i ↦ s̄_i^m` as an endomorphism, where this group has one.
    pub fn stretch_element(&self, x: &Element, factor: u32) -> Option<Element> {
        match self.family {
            Family::FreeSolvable { .. } => self.structure.stretch(x, factor),
            Family::Abelian if matches!(self.structure.as_ref(), Structure::Abelian { moduli } if moduli.iter().all(|&m| m == 0)) => {
                Some(Element::Vector(
                    x.as_vector()?
                        .iter()
                        .map(|&c| c * i64::from(factor))
                        .collect(),
                ))
            }
            _ => None,
        }
    }
}

fn join(values: &[u64]) -> String {
    values
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}
