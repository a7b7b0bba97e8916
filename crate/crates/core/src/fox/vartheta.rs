use std::collections::BTreeMap;

use crate::group::{Element, GroupError, MarkedGroup};
use crate::words::ReducedWord;

/// A product `γ₁ ρ^{x₁} γ₂ … γ_p ρ^{x_p} γ_{p+1}` with the `γ_j` given as
/// words in `F_r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlternatingForm {
    gammas: Vec<ReducedWord>,
    exponents: Vec<i64>,
}

impl AlternatingForm {
    pub fn new(gammas: Vec<ReducedWord>, exponents: Vec<i64>) -> Result<Self, GroupError> {
        if gammas.len() != exponents.len() + 1 {
            return Err(GroupError::InvalidParameter(format!(
                "alternating form needs one more factor than exponents, got {} and {}",
                gammas.len(),
                exponents.len()
            )));
        }
        let rank = gammas[0].rank();
        if let Some(bad) = gammas.iter().find(|g| g.rank() != rank) {
            return Err(GroupError::RankMismatch {
                expected: rank,
                found: bad.rank(),
            });
        }
        Ok(Self { gammas, exponents })
    }

    /// The form of a single `γ`.
    pub fn gamma(word: ReducedWord) -> Self {
        Self {
            gammas: vec![word],
            exponents: Vec::new(),
        }
    }

    /// `ρ^x`.
    pub fn rho_power(rank: usize, exponent: i64) -> Self {
        Self {
            gammas: vec![ReducedWord::identity(rank); 2],
            exponents: vec![exponent],
        }
    }

    pub fn rank(&self) -> usize {
        self.gammas[0].rank()
    }

    pub fn gammas(&self) -> &[ReducedWord] {
        &self.gammas
    }

    pub fn exponents(&self) -> &[i64] {
        &self.exponents
    }

    /// The product form, merging the last `γ` of `self` with the first of
    /// `other`.
    pub fn concat(&self, other: &Self) -> Result<Self, GroupError> {
        let mut gammas = self.gammas.clone();
        let last = gammas.pop().expect("nonempty");
        gammas.push(last.multiply(&other.gammas[0])?);
        gammas.extend(other.gammas[1..].iter().cloned());
        let mut exponents = self.exponents.clone();
        exponents.extend(&other.exponents);
        Ok(Self { gammas, exponents })
    }

    /// The word in `F_r` this form denotes.
    pub fn expand(&self, rho: &ReducedWord) -> Result<ReducedWord, GroupError> {
        let mut word = self.gammas[0].clone();
        for (exponent, gamma) in self.exponents.iter().zip(&self.gammas[1..]) {
            word = word.multiply(&rho.power(*exponent))?.multiply(gamma)?;
        }
        Ok(word)
    }
}

/// `Z ≀ Γ₁`, the group `ϑ` lands in.
pub fn vartheta_target(group: &MarkedGroup) -> Result<MarkedGroup, GroupError> {
    MarkedGroup::wreath(&MarkedGroup::abelian(1, None)?, group)
}

/// `ϑ(γ₁ ρ^{x₁} … γ_{p+1}) = (Σ_j x_j δ_{σ̄_j}, π̄(γ₁ ⋯ γ_{p+1}))` with
/// `σ̄_j = π̄(γ₁ ⋯ γ_j)`, as an element of [`vartheta_target`].
pub fn vartheta_project(
    form: &AlternatingForm,
    group: &MarkedGroup,
) -> Result<Element, GroupError> {
    let mut position = group.evaluate_word(&form.gammas[0])?;
    let mut totals: BTreeMap<Element, i64> = BTreeMap::new();
    for (exponent, gamma) in form.exponents.iter().zip(&form.gammas[1..]) {
        *totals.entry(position.clone()).or_default() += exponent;
        position = group.multiply(&position, &group.evaluate_word(gamma)?);
    }
    let lamps = totals
        .into_iter()
        .filter(|&(_, total)| total != 0)
        .map(|(x, total)| (x, Element::vector([total])))
        .collect();
    Ok(Element::wreath(lamps, position))
}
