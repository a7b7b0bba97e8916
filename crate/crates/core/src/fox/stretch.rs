use crate::group::{Element, Family, GroupError, Lattice, MarkedGroup, Structure};
use crate::scalar::Coefficient;
use crate::words::{Letter, ReducedWord};

use super::flow::Flow;

/// How far the hypothesis `s̄_i^q ∉ δ_m(Γ₁)` for `1 ≤ q < m` was checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StretchStatus {
    Verified,
    /// The caller supplied `δ_m`; nothing was checked.
    Unverified,
    /// Some `s̄_i^q` with `1 ≤ q < m` lies in `δ_m(Γ₁)`.
    Violated {
        generator: usize,
        power: u32,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StretchedFlow<C> {
    pub flow: Flow<C>,
    pub status: StretchStatus,
}

/// `δ_m`: every letter `s_i^{±1}` becomes `s_i^{±m}`.
pub fn stretch_word(word: &ReducedWord, factor: u32) -> ReducedWord {
    let letters = word
        .letters()
        .iter()
        .flat_map(|&letter| std::iter::repeat_n(letter, factor as usize));
    ReducedWord::reduce(word.rank(), letters.collect::<Vec<Letter>>())
        .expect("letters already in range")
}

/// `t_m`: the value on `(x, i)` is copied to the `m` edges
/// `(δ_m(x)·s̄_i^j, i)`, `0 ≤ j < m`, using the group's own `δ_m`.
pub fn stretch_flow<C: Coefficient>(
    flow: &Flow<C>,
    group: &MarkedGroup,
    factor: u32,
) -> Result<StretchedFlow<C>, GroupError> {
    if factor == 0 {
        return Err(GroupError::InvalidParameter(
            "stretch factor must be at least 1".to_string(),
        ));
    }
    if group.stretch_element(&group.identity(), factor).is_none() {
        return Err(GroupError::InvalidParameter(format!(
            "{} has no built-in stretch endomorphism",
            group.label()
        )));
    }
    let status = stretch_hypothesis(group, factor);
    let stretched = stretch_flow_with(flow, group, factor, |x| {
        group
            .stretch_element(x, factor)
            .expect("stretch defined on the whole group")
    });
    Ok(StretchedFlow {
        flow: stretched.flow,
        status,
    })
}

/// `t_m` with a caller-supplied `δ_m`; the result is tagged unverified.
pub fn stretch_flow_with<C, F>(
    flow: &Flow<C>,
    group: &MarkedGroup,
    factor: u32,
    delta: F,
) -> StretchedFlow<C>
where
    C: Coefficient,
    F: Fn(&Element) -> Element,
{
    let mut stretched = Flow::zero();
    for (x, generator, value) in flow.edges() {
        let mut vertex = delta(x);
        for _ in 0..factor {
            stretched.add_edge(vertex.clone(), generator, value.clone());
            group.step(&mut vertex, generator, false);
        }
    }
    StretchedFlow {
        flow: stretched,
        status: StretchStatus::Unverified,
    }
}

fn stretch_hypothesis(group: &MarkedGroup, factor: u32) -> StretchStatus {
    if matches!(group.family(), Family::FreeSolvable { .. }) || group.is_standard_free_abelian() {
        return StretchStatus::Verified;
    }
    let Structure::Abelian { moduli } = group.structure() else {
        return StretchStatus::Unverified;
    };
    let scale = i64::from(factor);
    let image = Lattice::new(
        moduli.len(),
        group.generators().iter().map(|g| {
            g.as_vector()
                .expect("abelian")
                .iter()
                .map(|&c| c * scale)
                .collect::<Vec<_>>()
        }),
    );
    for (generator, g) in group.generators().iter().enumerate() {
        let coords = g.as_vector().expect("abelian");
        for power in 1..factor {
            let multiple: Vec<i64> = coords.iter().map(|&c| c * i64::from(power)).collect();
            if image.contains(&multiple) {
                return StretchStatus::Violated { generator, power };
            }
        }
    }
    StretchStatus::Verified
}

#[cfg(test)]
mod tests {
    use super::super::flow::flow_of_word;
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn word(text: &str, rank: usize) -> ReducedWord {
        ReducedWord::parse(text, rank).unwrap()
    }

    #[test]
    fn stretch_word_examples() {
        assert_eq!(stretch_word(&word("s1 s2", 2), 2), word("s1^2 s2^2", 2));
        let w = word("s1 s2^-1 s1^3", 2);
        assert_eq!(stretch_word(&w, 1), w);
        assert_eq!(stretch_word(&w, 3), word("s1^3 s2^-3 s1^9", 2));
    }

    #[test]
    fn stretched_commutator_square() {
        let z2 = MarkedGroup::abelian(2, None).unwrap();
        let g = word("[s1,s2]", 2);
        let direct: Flow<i64> = flow_of_word(&stretch_word(&g, 2), &z2).unwrap();
        let stretched = stretch_flow(&flow_of_word::<i64>(&g, &z2).unwrap(), &z2, 2).unwrap();
        assert_eq!(stretched.status, StretchStatus::Verified);
        assert_eq!(stretched.flow, direct);
        assert_eq!(direct.len(), 8);
        assert!(direct.edges().all(|(_, _, v)| v.abs() == 1));
    }

    #[test]
    fn hypothesis_on_remarked_lattices() {
        // Z marked by 2 and 3 is Z, so δ₂ has image 2Z, which contains 2.
        let z1 = MarkedGroup::abelian(1, None).unwrap();
        let marked = z1.remark(&[word("s1^2", 1), word("s1^3", 1)]).unwrap();
        let f = flow_of_word::<i64>(&word("s1", 2), &marked).unwrap();
        let stretched = stretch_flow(&f, &marked, 2).unwrap();
        assert_eq!(
            stretched.status,
            StretchStatus::Violated {
                generator: 0,
                power: 1
            }
        );
        let skew = MarkedGroup::abelian(2, None)
            .unwrap()
            .remark(&[word("s1", 2), word("s1 s2", 2)])
            .unwrap();
        assert_eq!(
            stretch_flow(&f, &skew, 3).unwrap().status,
            StretchStatus::Verified
        );
    }

    #[test]
    fn unsupported_groups() {
        let ll = MarkedGroup::lamplighter(2).unwrap();
        assert!(stretch_flow(&Flow::<i64>::zero(), &ll, 2).is_err());
        let z2 = MarkedGroup::abelian(2, None).unwrap();
        assert!(stretch_flow(&Flow::<i64>::zero(), &z2, 0).is_err());
        let custom = stretch_flow_with(&Flow::<i64>::zero(), &ll, 2, |x| x.clone());
        assert_eq!(custom.status, StretchStatus::Unverified);
    }

    proptest! {
        #[test]
        fn stretch_commutes_with_flow(seed in any::<u64>(), factor in 1u32..=3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for group in [MarkedGroup::abelian(2, None).unwrap(), MarkedGroup::free_solvable(2, 2).unwrap()] {
                let w = ReducedWord::random(2, rng.gen_range(0..=16), &mut rng);
                let direct: Flow<i64> = flow_of_word(&stretch_word(&w, factor), &group).unwrap();
                let stretched = stretch_flow(&flow_of_word::<i64>(&w, &group).unwrap(), &group, factor).unwrap();
                prop_assert_eq!(stretched.status, StretchStatus::Verified);
                prop_assert_eq!(stretched.flow, direct);
            }
        }
    }
}
