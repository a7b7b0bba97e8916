use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::group::{Element, MarkedGroup};
use crate::scalar::Coefficient;

fn accumulate<K: Ord, C: Coefficient>(map: &mut BTreeMap<K, C>, key: K, amount: C) {
    if amount.is_zero() {
        return;
    }
    match map.entry(key) {
        Entry::Vacant(slot) => {
            slot.insert(amount);
        }
        Entry::Occupied(mut slot) => {
            *slot.get_mut() += amount;
            if slot.get().is_zero() {
                slot.remove();
            }
        }
    }
}

/// A finitely supported element of the integral group ring `Z(Γ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupRingElement<C = BigInt> {
    terms: BTreeMap<Element, C>,
}

impl<C: Coefficient> Default for GroupRingElement<C> {
    fn default() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }
}

impl<C: Coefficient> GroupRingElement<C> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(x: Element, coefficient: C) -> Self {
        let mut ring = Self::zero();
        ring.add_term(x, coefficient);
        ring
    }

    pub fn add_term(&mut self, x: Element, coefficient: C) {
        accumulate(&mut self.terms, x, coefficient);
    }

    pub fn coefficient(&self, x: &Element) -> C {
        self.terms.get(x).cloned().unwrap_or_else(C::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Element, &C)> {
        self.terms.iter()
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut sum = self.clone();
        for (x, c) in &other.terms {
            sum.add_term(x.clone(), c.clone());
        }
        sum
    }

    pub fn negate(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(x, c)| (x.clone(), -c.clone()))
                .collect(),
        }
    }

    /// Left translation `x ↦ g·x`.
    pub fn translate(&self, group: &MarkedGroup, g: &Element) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(x, c)| (group.multiply(g, x), c.clone()))
                .collect(),
        }
    }
}

/// A finitely supported map `Γ → Z^r`, the free `Z(Γ)`-module of rank `r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModuleVector<C = BigInt> {
    rank: usize,
    entries: BTreeMap<Element, Vec<C>>,
}

impl<C: Coefficient> ModuleVector<C> {
    pub fn zero(rank: usize) -> Self {
        Self {
            rank,
            entries: BTreeMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn add_at(&mut self, x: Element, coordinate: usize, amount: C) {
        if amount.is_zero() {
            return;
        }
        let rank = self.rank;
        let vector = self
            .entries
            .entry(x.clone())
            .or_insert_with(|| vec![C::zero(); rank]);
        vector[coordinate] += amount;
        if vector.iter().all(Zero::is_zero) {
            self.entries.remove(&x);
        }
    }

    pub fn get(&self, x: &Element) -> Option<&[C]> {
        self.entries.get(x).map(Vec::as_slice)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Element, &[C])> {
        self.entries.iter().map(|(x, v)| (x, v.as_slice()))
    }

    /// Number of keys with a nonzero vector.
    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    /// Number of nonzero `(key, coordinate)` entries.
    pub fn nonzero_entries(&self) -> usize {
        self.entries
            .values()
            .map(|v| v.iter().filter(|c| !c.is_zero()).count())
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Column `i` as a group-ring element.
    pub fn column(&self, coordinate: usize) -> GroupRingElement<C> {
        let mut ring = GroupRingElement::zero();
        for (x, v) in &self.entries {
            ring.add_term(x.clone(), v[coordinate].clone());
        }
        ring
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut sum = self.clone();
        for (x, v) in &other.entries {
            for (i, c) in v.iter().enumerate() {
                sum.add_at(x.clone(), i, c.clone());
            }
        }
        sum
    }

    /// `τ_g`, moving the value at `x` to `g·x`.
    pub fn translate(&self, group: &MarkedGroup, g: &Element) -> Self {
        Self {
            rank: self.rank,
            entries: self
                .entries
                .iter()
                .map(|(x, v)| (group.multiply(g, x), v.clone()))
                .collect(),
        }
    }
}

pub(crate) fn accumulate_edge<C: Coefficient>(
    map: &mut BTreeMap<(Element, usize), C>,
    key: (Element, usize),
    amount: C,
) {
    accumulate(map, key, amount);
}
