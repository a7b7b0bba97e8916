use super::element::Element;
use super::lattice::Lattice;
use super::marked::{Family, GroupError, MarkedGroup};
use super::structure::Structure;
use crate::words::ReducedWord;

/// Action of each generator on the right cosets of a finite-index subgroup;
/// coset 0 is the subgroup itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetTable {
    forward: Vec<Vec<usize>>,
    backward: Vec<Vec<usize>>,
}

impl CosetTable {
    /// `actions[i][c]` is the coset reached from coset `c` by generator `i`.
    pub fn new(actions: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let cosets = actions.first().map_or(0, Vec::len);
        let mut backward = Vec::with_capacity(actions.len());
        for (generator, action) in actions.iter().enumerate() {
            if action.len() != cosets || cosets == 0 {
                return Err(GroupError::InvalidParameter(format!(
                    "coset action of generator {} has {} entries, expected {cosets}",
                    generator + 1,
                    action.len()
                )));
            }
            let mut inverse = vec![usize::MAX; cosets];
            for (from, &to) in action.iter().enumerate() {
                if to >= cosets || inverse[to] != usize::MAX {
                    return Err(GroupError::InvalidParameter(format!(
                        "coset action of generator {} is not a permutation",
                        generator + 1
                    )));
                }
                inverse[to] = from;
            }
            backward.push(inverse);
        }
        Ok(Self {
            forward: actions,
            backward,
        })
    }

    pub fn rank(&self) -> usize {
        self.forward.len()
    }

    pub fn cosets(&self) -> usize {
        self.forward.first().map_or(0, Vec::len)
    }

    pub fn contains_word(&self, word: &ReducedWord) -> bool {
        let end = word.letters().iter().fold(0, |coset, letter| {
            let table = if letter.inverse {
                &self.backward
            } else {
                &self.forward
            };
            table[letter.generator][coset]
        });
        end == 0
    }
}

/// Subgroup membership oracles for a marked group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// The whole group.
    Full,
    /// `m_1 Z × … × m_r Z` inside `Z^r` with its standard coordinates.
    Sublattice(Vec<u64>),
    /// An arbitrary subgroup of an abelian group, as a lattice in the
    /// coordinate space (moduli already included).
    Lattice(Lattice),
    /// Lamplighter: lamplighter and all lit lamps at even positions.
    /// BS(1,q): even shift.
    EvenShift,
    /// Finite-index subgroup given by a coset table on the generators.
    Cosets(CosetTable),
}

impl Membership {
    /// Resolves `full`, `sublattice:m1,m2,…`, `even-t`, or a predicate
    /// registered on the group under that name.
    pub fn resolve(group: &MarkedGroup, name: &str) -> Result<Membership, GroupError> {
        if let Some(registered) = group.predicate(name) {
            return Ok(registered.clone());
        }
        let unknown = || GroupError::UnknownPredicate(name.to_string());
        match name.split_once(':') {
            None if name == "full" => Ok(Membership::Full),
            None if name == "even-t" => match group.family() {
                Family::Lamplighter { .. } | Family::BaumslagSolitar { .. } => {
                    Ok(Membership::EvenShift)
                }
                _ => Err(unknown()),
            },
            Some(("sublattice", moduli)) => {
                let moduli = moduli
                    .split(',')
                    .map(|m| m.trim().parse::<u64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| unknown())?;
                Membership::sublattice(group, &moduli)
            }
            _ => Err(unknown()),
        }
    }

    /// The subgroup generated by `s̄_i^{m_i}` of an abelian marked group.
    pub fn sublattice(group: &MarkedGroup, moduli: &[u64]) -> Result<Membership, GroupError> {
        let Structure::Abelian {
            moduli: group_moduli,
        } = group.structure()
        else {
            return Err(GroupError::InvalidParameter(
                "sublattice membership needs an abelian group".to_string(),
            ));
        };
        if moduli.len() != group.rank() || moduli.contains(&0) {
            return Err(GroupError::InvalidParameter(format!(
                "sublattice needs {} positive entries",
                group.rank()
            )));
        }
        if group.is_standard_free_abelian() {
            return Ok(Membership::Sublattice(moduli.to_vec()));
        }
        let dimension = group_moduli.len();
        let mut generators: Vec<Vec<i64>> = group
            .generators()
            .iter()
            .zip(moduli)
            .map(|(g, &m)| {
                g.as_vector()
                    .expect("abelian")
                    .iter()
                    .map(|&x| x * m as i64)
                    .collect()
            })
            .collect();
        for (coordinate, &m) in group_moduli.iter().enumerate() {
            if m != 0 {
                let mut row = vec![0; dimension];
                row[coordinate] = m as i64;
                generators.push(row);
            }
        }
        Ok(Membership::Lattice(Lattice::new(dimension, generators)))
    }

    /// Membership of a group element; coset tables need a word instead.
    pub fn contains_element(&self, group: &MarkedGroup, x: &Element) -> Result<bool, GroupError> {
        match self {
            Membership::Full => Ok(true),
            Membership::Sublattice(moduli) => {
                let coords = x.as_vector().ok_or_else(|| shape_error(x))?;
                Ok(coords
                    .iter()
                    .zip(moduli)
                    .all(|(&c, &m)| c.rem_euclid(m as i64) == 0))
            }
            Membership::Lattice(lattice) => {
                let coords = x.as_vector().ok_or_else(|| shape_error(x))?;
                Ok(lattice.contains(coords))
            }
            Membership::EvenShift => match (group.structure(), x) {
                (Structure::BaumslagSolitar { .. }, Element::Affine(a)) => Ok(a.shift % 2 == 0),
                (Structure::Wreath { .. }, Element::Wreath(w)) => {
                    let even =
                        |e: &Element| e.as_vector().is_some_and(|c| c.len() == 1 && c[0] % 2 == 0);
                    Ok(even(&w.base) && w.lamps.keys().all(even))
                }
                _ => Err(shape_error(x)),
            },
            Membership::Cosets(_) => Err(GroupError::InvalidParameter(
                "coset-table membership is decided on words".to_string(),
            )),
        }
    }

    pub fn contains_word(
        &self,
        group: &MarkedGroup,
        word: &ReducedWord,
    ) -> Result<bool, GroupError> {
        match self {
            Membership::Cosets(table) => {
                if table.rank() != word.rank() {
                    return Err(GroupError::RankMismatch {
                        expected: table.rank(),
                        found: word.rank(),
                    });
                }
                Ok(table.contains_word(word))
            }
            _ => self.contains_element(group, &group.evaluate_word(word)?),
        }
    }
}

fn shape_error(x: &Element) -> GroupError {
    GroupError::InvalidElement(format!("membership predicate does not apply to {x:?}"))
}
