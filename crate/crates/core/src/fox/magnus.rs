use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::ring::{GroupRingElement, ModuleVector};
use crate::group::{scaled_unit_vector, Element, Family, GroupError, MarkedGroup, Structure};
use crate::scalar::Coefficient;
use crate::words::ReducedWord;

/// `π(∂_{s_i} w)` for every `i`, from one left-to-right pass: a letter
/// `s_i` read at prefix image `x` contributes `+x` to column `i`, and a
/// letter `s_i^-1` contributes `-x·s̄_i^-1`.
pub fn fox_derivatives<C: Coefficient>(
    word: &ReducedWord,
    group: &MarkedGroup,
) -> Result<Vec<GroupRingElement<C>>, GroupError> {
    group.check_word(word)?;
    let mut derivatives = vec![GroupRingElement::zero(); group.rank()];
    let mut x = group.identity();
    for letter in word.letters() {
        if letter.inverse {
            group.step(&mut x, letter.generator, true);
            derivatives[letter.generator].add_term(x.clone(), -C::one());
        } else {
            derivatives[letter.generator].add_term(x.clone(), C::one());
            group.step(&mut x, letter.generator, false);
        }
    }
    Ok(derivatives)
}

pub fn fox_derivative<C: Coefficient>(
    word: &ReducedWord,
    generator: usize,
    group: &MarkedGroup,
) -> Result<GroupRingElement<C>, GroupError> {
    if generator >= group.rank() {
        return Err(GroupError::InvalidParameter(format!(
            "generator index {generator} out of range for rank {}",
            group.rank()
        )));
    }
    Ok(fox_derivatives(word, group)?.swap_remove(generator))
}

/// The Magnus image `(ā(g), π̄(g))` in `Z^r ≀ Γ₁`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WreathImage<C = BigInt> {
    pub a: ModuleVector<C>,
    pub base: Element,
}

impl<C: Coefficient> WreathImage<C> {
    pub fn identity(group: &MarkedGroup) -> Self {
        Self {
            a: ModuleVector::zero(group.rank()),
            base: group.identity(),
        }
    }

    /// `ψ(s_i) = (δ_ē·ε_i, s̄_i)`.
    pub fn generator(group: &MarkedGroup, index: usize) -> Self {
        let mut a = ModuleVector::zero(group.rank());
        a.add_at(group.identity(), index, C::one());
        Self {
            a,
            base: group.generator(index).clone(),
        }
    }

    /// `(a₁, g₁)(a₂, g₂) = (a₁ + τ_{g₁} a₂, g₁ g₂)`.
    pub fn multiply(&self, other: &Self, group: &MarkedGroup) -> Self {
        Self {
            a: self.a.add(&other.a.translate(group, &self.base)),
            base: group.multiply(&self.base, &other.base),
        }
    }

    pub fn is_identity(&self, group: &MarkedGroup) -> bool {
        self.a.is_zero() && group.is_identity(&self.base)
    }

    /// The same pair as an element of the wreath structure `Z^r ≀ Γ₁`.
    pub fn to_element(&self) -> Option<Element> {
        let rank = self.a.rank();
        let mut lamps = BTreeMap::new();
        for (x, v) in self.a.entries() {
            let coords = v
                .iter()
                .map(ToPrimitive::to_i64)
                .collect::<Option<Vec<_>>>()?;
            lamps.insert(x.clone(), Element::vector(coords));
        }
        debug_assert!(lamps
            .values()
            .all(|v| v.as_vector().is_some_and(|c| c.len() == rank)));
        Some(Element::wreath(lamps, self.base.clone()))
    }
}

/// The wreath structure `Z^r ≀ Γ₁` that Magnus images live in.
pub fn magnus_structure(group: &MarkedGroup) -> Structure {
    Structure::Wreath {
        lamp: std::sync::Arc::new(Structure::free_abelian(group.rank())),
        base: group.structure_arc().clone(),
    }
}

/// `Γ₂ = F_r/[N,N]` as the subgroup of `Z^r ≀ Γ₁` generated by the `ψ(s_i)`.
pub fn magnus_group(group: &MarkedGroup) -> MarkedGroup {
    let generators = (0..group.rank())
        .map(|i| magnus_generator_element(group, i))
        .collect();
    MarkedGroup::from_images(
        format!("magnus({})", group.label()),
        std::sync::Arc::new(magnus_structure(group)),
        generators,
        Family::Custom,
    )
    .expect("Magnus generators are in normal form")
}

/// `ψ(w)`, with a-part column `i` equal to `π(∂_{s_i} w)`.
pub fn magnus_embed<C: Coefficient>(
    word: &ReducedWord,
    group: &MarkedGroup,
) -> Result<WreathImage<C>, GroupError> {
    group.check_word(word)?;
    let mut a = ModuleVector::zero(group.rank());
    let mut x = group.identity();
    for letter in word.letters() {
        if letter.inverse {
            group.step(&mut x, letter.generator, true);
            a.add_at(x.clone(), letter.generator, -C::one());
        } else {
            a.add_at(x.clone(), letter.generator, C::one());
            group.step(&mut x, letter.generator, false);
        }
    }
    Ok(WreathImage { a, base: x })
}

/// `ψ(s_i)` as an element of the wreath structure, for callers that work
/// with [`Element`] directly.
pub fn magnus_generator_element(group: &MarkedGroup, index: usize) -> Element {
    let mut lamps = BTreeMap::new();
    lamps.insert(group.identity(), scaled_unit_vector(group.rank(), index, 1));
    Element::wreath(lamps, group.generator(index).clone())
}
