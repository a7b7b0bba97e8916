use super::ExclusiveError;
use crate::group::{Family, Lattice, MarkedGroup, Membership};
use crate::words::ReducedWord;

pub(super) fn check_moduli(
    moduli: &[u64],
    rank: usize,
    minimum: u64,
) -> Result<(), ExclusiveError> {
    if moduli.len() != rank {
        return Err(ExclusiveError::ModuliLength {
            expected: rank,
            found: moduli.len(),
        });
    }
    match moduli.iter().position(|&m| m < minimum) {
        Some(position) => Err(ExclusiveError::ModulusTooSmall {
            position,
            value: moduli[position],
            minimum,
        }),
        None => Ok(()),
    }
}

/// Whether the image of `u = ρ[..split]` in `T_m` avoids the cyclic
/// subgroup generated by the image of `s = ρ[split]`. `T_m` is the
/// quotient of the abelian image of `Γ₁` by the images of `s̄_i^{m_i}`;
/// when this holds, no flow of an element of `H_m` uses the edge
/// `(ū, ū·s̄, s)`.
pub fn tm_criterion(
    group: &MarkedGroup,
    rho: &ReducedWord,
    split: usize,
    moduli: &[u64],
) -> Result<bool, ExclusiveError> {
    check_moduli(moduli, group.rank(), 2)?;
    group.check_word(rho)?;
    if split >= rho.len() {
        return Err(ExclusiveError::SplitOutOfRange {
            index: split,
            len: rho.len(),
        });
    }
    let structure = group.structure();
    let image = |word: &ReducedWord| -> Result<Vec<i64>, ExclusiveError> {
        Ok(structure.abelian_quotient(&group.evaluate_word(word)?))
    };
    let quotient_moduli = structure.abelian_quotient_moduli();
    let dimension = quotient_moduli.len();
    let mut relations: Vec<Vec<i64>> = group
        .generators()
        .iter()
        .zip(moduli)
        .map(|(g, &m)| {
            structure
                .abelian_quotient(g)
                .iter()
                .map(|&c| c * m as i64)
                .collect()
        })
        .collect();
    for (coordinate, &m) in quotient_moduli.iter().enumerate() {
        if m != 0 {
            let mut row = vec![0; dimension];
            row[coordinate] = m as i64;
            relations.push(row);
        }
    }
    let relations = Lattice::new(dimension, relations);
    let s = rho.letters()[split].generator;
    let s_image = structure.abelian_quotient(group.generator(s));
    let u_image = image(&rho.prefix(split))?;
    // `q·s ∈ relations` for q = m_s, so the cyclic subgroup has at most m_s elements.
    let in_cyclic_subgroup = (0..moduli[s] as i64).any(|q| {
        let difference: Vec<i64> = u_image
            .iter()
            .zip(&s_image)
            .map(|(u, s)| u - q * s)
            .collect();
        relations.contains(&difference)
    });
    Ok(!in_cyclic_subgroup)
}

/// `H_m = ⟨s_i^{m_i}⟩` as words, with a membership test for its image in
/// `Γ₁` where one is known.
#[derive(Clone, Debug, PartialEq)]
pub struct SubgroupHm {
    pub generators: Vec<ReducedWord>,
    /// A name accepted by [`Membership::resolve`] on the same group.
    pub predicate: Option<String>,
    pub membership: Option<Membership>,
}

/// Exact membership is available for abelian groups (`m_i` divides
/// coordinate `i` in the marked basis), for the whole group, and for the
/// even-shift subgroup of the lamplighter (`m = (1, 2)`) and of BS(1,q)
/// (`m = (2, 1)`).
pub fn make_hm(group: &MarkedGroup, moduli: &[u64]) -> Result<SubgroupHm, ExclusiveError> {
    check_moduli(moduli, group.rank(), 1)?;
    let generators = moduli
        .iter()
        .enumerate()
        .map(|(i, &m)| Ok(ReducedWord::generator(group.rank(), i)?.power(m as i64)))
        .collect::<Result<Vec<_>, ExclusiveError>>()?;
    let predicate = if moduli.iter().all(|&m| m == 1) {
        Some("full".to_string())
    } else {
        match (group.family(), moduli) {
            _ if group.structure().is_abelian() => {
                let list: Vec<String> = moduli.iter().map(u64::to_string).collect();
                Some(format!("sublattice:{}", list.join(",")))
            }
            (Family::Lamplighter { .. }, [1, 2]) | (Family::BaumslagSolitar { .. }, [2, 1]) => {
                Some("even-t".to_string())
            }
            _ => None,
        }
    };
    let membership = predicate
        .as_deref()
        .map(|name| Membership::resolve(group, name))
        .transpose()?;
    Ok(SubgroupHm {
        generators,
        predicate,
        membership,
    })
}
