use num_bigint::BigInt;

use super::ExclusiveError;
use crate::fox::{traced_flow, Flow};
use crate::group::{Element, MarkedGroup, Membership};
use crate::words::ReducedWord;

/// Radius, in words over the subgroup generators, of the bounded search.
pub const DEFAULT_RADIUS: usize = 4;

/// Largest number of distinct subgroup elements the bounded search visits.
pub const DEFAULT_SEARCH_BUDGET: usize = 200_000;

/// A subgroup `Γ = ⟨γ_1, …⟩` of `F_r/[N,N]` and a relator `ρ = u·s·v`
/// whose letter at `split` is `s`, together with a membership test for
/// `Γ̄`, the image of `Γ` in `Γ₁`.
#[derive(Clone, Debug)]
pub struct ExclusiveCandidate {
    group: MarkedGroup,
    gamma: Vec<ReducedWord>,
    rho: ReducedWord,
    split: usize,
    predicate: String,
    membership: Membership,
    moduli: Option<Vec<u64>>,
    radius: usize,
    budget: usize,
    rho_flow: Flow,
}

impl ExclusiveCandidate {
    /// Fails unless `ρ` is nonempty, lies in `N ∖ [N,N]`, has a positive
    /// letter at `split`, and `predicate` accepts every `γ_j`.
    pub fn new(
        group: MarkedGroup,
        gamma: Vec<ReducedWord>,
        rho: ReducedWord,
        split: usize,
        predicate: &str,
    ) -> Result<Self, ExclusiveError> {
        if rho.is_empty() {
            return Err(ExclusiveError::EmptyRelator);
        }
        if split >= rho.len() {
            return Err(ExclusiveError::SplitOutOfRange {
                index: split,
                len: rho.len(),
            });
        }
        if rho.letters()[split].inverse {
            return Err(ExclusiveError::InverseSplitLetter { index: split });
        }
        let (rho_flow, _) = traced_flow::<BigInt>(&rho, &group)?;
        if rho_flow.is_zero() {
            return Err(ExclusiveError::InCommutatorOfN);
        }
        if !rho_flow.net_flow(&group).is_circulation() {
            return Err(ExclusiveError::NotInN);
        }
        let membership = Membership::resolve(&group, predicate)?;
        for (generator, word) in gamma.iter().enumerate() {
            if !membership.contains_word(&group, word)? {
                return Err(ExclusiveError::PredicateMismatch {
                    generator,
                    predicate: predicate.to_string(),
                });
            }
        }
        Ok(Self {
            group,
            gamma,
            rho,
            split,
            predicate: predicate.to_string(),
            membership,
            moduli: None,
            radius: DEFAULT_RADIUS,
            budget: DEFAULT_SEARCH_BUDGET,
            rho_flow,
        })
    }

    /// Offers the finite quotient criterion with these moduli for
    /// condition (3); it applies when every `γ_j` is a power of one
    /// generator `s_i` divisible by `m_i`.
    pub fn with_moduli(mut self, moduli: Vec<u64>) -> Result<Self, ExclusiveError> {
        super::quotient::check_moduli(&moduli, self.group.rank(), 2)?;
        self.moduli = Some(moduli);
        Ok(self)
    }

    pub fn with_radius(mut self, radius: usize) -> Self {
        self.radius = radius;
        self
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn group(&self) -> &MarkedGroup {
        &self.group
    }

    pub fn gamma(&self) -> &[ReducedWord] {
        &self.gamma
    }

    pub fn rho(&self) -> &ReducedWord {
        &self.rho
    }

    pub fn split(&self) -> usize {
        self.split
    }

    pub fn predicate(&self) -> &str {
        &self.predicate
    }

    pub fn membership(&self) -> &Membership {
        &self.membership
    }

    pub fn moduli(&self) -> Option<&[u64]> {
        self.moduli.as_deref()
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn rho_flow(&self) -> &Flow {
        &self.rho_flow
    }

    /// The prefix `u`.
    pub fn prefix(&self) -> ReducedWord {
        self.rho.prefix(self.split)
    }

    /// Index of the generator `s`.
    pub fn split_generator(&self) -> usize {
        self.rho.letters()[self.split].generator
    }

    /// The edge `(ū, ū·s̄, s)`, keyed by its source vertex.
    pub fn edge(&self) -> (Element, usize) {
        let source = self
            .group
            .evaluate_word(&self.prefix())
            .expect("prefix of a checked word");
        (source, self.split_generator())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(text: &str) -> ReducedWord {
        ReducedWord::parse(text, 2).unwrap()
    }

    fn z2() -> MarkedGroup {
        MarkedGroup::abelian(2, None).unwrap()
    }

    #[test]
    fn accepts_the_metabelian_example() {
        let c = ExclusiveCandidate::new(
            z2(),
            vec![word("s1^2"), word("s2^2")],
            word("[s1,s2]"),
            1,
            "sublattice:2,2",
        )
        .unwrap();
        assert_eq!(c.prefix(), word("s1"));
        assert_eq!(c.edge(), (Element::vector([1, 0]), 1));
        assert_eq!(c.radius(), DEFAULT_RADIUS);
    }

    #[test]
    fn rejects_relators_outside_n_minus_nn() {
        let err = |rho: &str, split| {
            ExclusiveCandidate::new(z2(), vec![word("s1^2")], word(rho), split, "full").unwrap_err()
        };
        assert!(matches!(
            err("[[s1,s2],[s1,s2]^s1]", 0),
            ExclusiveError::InCommutatorOfN
        ));
        assert!(matches!(err("s1 s2", 0), ExclusiveError::NotInN));
        assert!(matches!(
            err("[s1,s2]", 2),
            ExclusiveError::InverseSplitLetter { index: 2 }
        ));
        assert!(matches!(
            err("[s1,s2]", 4),
            ExclusiveError::SplitOutOfRange { index: 4, len: 4 }
        ));
        assert!(matches!(
            ExclusiveCandidate::new(z2(), vec![], ReducedWord::identity(2), 0, "full").unwrap_err(),
            ExclusiveError::EmptyRelator
        ));
    }

    #[test]
    fn rejects_unknown_or_inconsistent_predicates() {
        let attempt = |predicate: &str| {
            ExclusiveCandidate::new(
                z2(),
                vec![word("s1^2"), word("s2")],
                word("[s1,s2]"),
                0,
                predicate,
            )
        };
        assert!(matches!(
            attempt("no-such-predicate").unwrap_err(),
            ExclusiveError::Group(_)
        ));
        assert!(matches!(
            attempt("sublattice:2,2").unwrap_err(),
            ExclusiveError::PredicateMismatch { generator: 1, .. }
        ));
        assert!(attempt("full").is_ok());
    }

    #[test]
    fn moduli_must_be_at_least_two() {
        let c = ExclusiveCandidate::new(z2(), vec![], word("[s1,s2]"), 0, "full").unwrap();
        assert!(c.clone().with_moduli(vec![2, 1]).is_err());
        assert!(c.clone().with_moduli(vec![2]).is_err());
        assert_eq!(
            c.with_moduli(vec![2, 3]).unwrap().moduli(),
            Some(&[2, 3][..])
        );
    }
}
