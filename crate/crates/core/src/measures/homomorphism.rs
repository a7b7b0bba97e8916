use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::distribution::Distribution;
use super::spec::{Atom, MeasureKind, MeasureSpec};
use super::MeasureError;
use crate::group::{add_lamp, Element, MarkedGroup, Structure};
use crate::scalar::Probability;

type ElementMap = dyn Fn(&Element) -> Element + Send + Sync;

/// A group homomorphism, applied to elements in normal form.
#[derive(Clone)]
pub enum Homomorphism {
    Identity,
    /// Coordinatewise reduction of a vector group, e.g. `Z → Z/2`.
    Reduce {
        moduli: Vec<u64>,
    },
    /// `(f, h) ↦ h` on a wreath product; on `S_{d,r}` this is `π^d_{d-1}`.
    BaseProjection,
    /// `δ_m` on a free solvable tower or a torsion-free abelian group.
    Stretch {
        factor: u32,
    },
    /// `θ₁(f, x) = (f̄, θ(x))` with `f̄(h) = Σ_{θ(g)=h} f(g)`.
    Lift(Box<Homomorphism>),
    /// `second ∘ first`.
    Compose(Box<Homomorphism>, Box<Homomorphism>),
    Custom(Arc<ElementMap>),
}

impl fmt::Debug for Homomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Homomorphism::Identity => write!(f, "Identity"),
            Homomorphism::Reduce { moduli } => write!(f, "Reduce({moduli:?})"),
            Homomorphism::BaseProjection => write!(f, "BaseProjection"),
            Homomorphism::Stretch { factor } => write!(f, "Stretch({factor})"),
            Homomorphism::Lift(inner) => write!(f, "Lift({inner:?})"),
            Homomorphism::Compose(a, b) => write!(f, "Compose({a:?}, {b:?})"),
            Homomorphism::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl Homomorphism {
    /// `θ_k`: the `k`-fold lift of `self`.
    pub fn lifted(self, depth: usize) -> Self {
        (0..depth).fold(self, |h, _| Homomorphism::Lift(Box::new(h)))
    }

    /// Image of `x`, which must lie in the source of `self`; `target` is the
    /// structure of the codomain.
    pub fn apply(
        &self,
        x: &Element,
        source: &Structure,
        target: &Structure,
    ) -> Result<Element, MeasureError> {
        let mismatch =
            || MeasureError::HomomorphismMismatch(format!("{self:?} does not apply to {x:?}"));
        let image = match self {
            Homomorphism::Identity => x.clone(),
            Homomorphism::Reduce { moduli } => {
                let coords = x.as_vector().ok_or_else(mismatch)?;
                if coords.len() != moduli.len() {
                    return Err(mismatch());
                }
                Element::vector(coords.iter().zip(moduli).map(|(&c, &m)| {
                    if m == 0 {
                        c
                    } else {
                        c.rem_euclid(m as i64)
                    }
                }))
            }
            Homomorphism::BaseProjection => x.as_wreath().ok_or_else(mismatch)?.base.clone(),
            Homomorphism::Stretch { factor } => source.stretch(x, *factor).ok_or_else(mismatch)?,
            Homomorphism::Lift(inner) => {
                let (
                    Structure::Wreath {
                        lamp,
                        base: source_base,
                    },
                    Structure::Wreath {
                        base: target_base, ..
                    },
                ) = (source, target)
                else {
                    return Err(mismatch());
                };
                let w = x.as_wreath().ok_or_else(mismatch)?;
                let mut lamps = BTreeMap::new();
                for (position, value) in &w.lamps {
                    let moved = inner.apply(position, source_base, target_base)?;
                    add_lamp(lamp, &mut lamps, moved, value);
                }
                Element::wreath(lamps, inner.apply(&w.base, source_base, target_base)?)
            }
            Homomorphism::Compose(first, second) => {
                let middle = first.intermediate(source).ok_or_else(mismatch)?;
                let y = first.apply(x, source, &middle)?;
                second.apply(&y, &middle, target)?
            }
            Homomorphism::Custom(f) => f(x),
        };
        if target.contains(&image) {
            Ok(image)
        } else {
            Err(MeasureError::ForeignElement(format!("{image:?}")))
        }
    }

    /// The codomain structure, where it is determined by the source.
    fn intermediate(&self, source: &Structure) -> Option<Structure> {
        match self {
            Homomorphism::Identity | Homomorphism::Stretch { .. } => Some(source.clone()),
            Homomorphism::Reduce { moduli } => Some(Structure::Abelian {
                moduli: moduli.clone(),
            }),
            Homomorphism::BaseProjection => source.base().map(|b| b.as_ref().clone()),
            Homomorphism::Lift(inner) => {
                let (lamp, base) = (source.lamp()?, source.base()?);
                Some(Structure::Wreath {
                    lamp: lamp.clone(),
                    base: Arc::new(inner.intermediate(base)?),
                })
            }
            Homomorphism::Compose(first, second) => {
                second.intermediate(&first.intermediate(source)?)
            }
            Homomorphism::Custom(_) => None,
        }
    }
}

/// Image measure on `target`, masses summed over fibers.
pub fn pushforward_distribution<P: Probability>(
    distribution: &Distribution<P>,
    hom: &Homomorphism,
    source: &MarkedGroup,
    target: &MarkedGroup,
) -> Result<Distribution<P>, MeasureError> {
    let images = distribution
        .iter()
        .map(|(x, w)| {
            Ok((
                hom.apply(x, source.structure(), target.structure())?,
                w.clone(),
            ))
        })
        .collect::<Result<Vec<_>, MeasureError>>()?;
    Ok(Distribution::from_masses(images))
}

/// Image of a step measure; atom labels are kept.
pub fn pushforward<P: Probability>(
    spec: &MeasureSpec<P>,
    hom: &Homomorphism,
    target: &MarkedGroup,
) -> Result<MeasureSpec<P>, MeasureError> {
    let source = spec.group().structure();
    let atoms = spec
        .atoms()
        .iter()
        .map(|a| {
            Ok(Atom {
                element: hom.apply(&a.element, source, target.structure())?,
                weight: a.weight.clone(),
                label: a.label,
            })
        })
        .collect::<Result<Vec<_>, MeasureError>>()?;
    MeasureSpec::new(target.clone(), atoms, MeasureKind::Pushforward)
}

#[cfg(test)]
mod tests {
    use super::super::distribution::{convolve_powers, ConvolutionOptions};
    use super::super::law::LawOnZ;
    use super::super::spec::{make_generator_power_measure, make_lazy_srw, sws};
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    #[test]
    fn abelianization_of_lazy_walk() {
        let s22 = MarkedGroup::free_solvable(2, 2).unwrap();
        let z2 = MarkedGroup::abelian(2, None).unwrap();
        let pushed = pushforward(
            &make_lazy_srw::<Q>(&s22),
            &Homomorphism::BaseProjection,
            &z2,
        )
        .unwrap();
        assert_eq!(
            pushed.distribution(),
            make_lazy_srw::<Q>(&z2).distribution()
        );
    }

    #[test]
    fn lift_sums_over_fibers() {
        let z1 = MarkedGroup::abelian(1, None).unwrap();
        let z2c = MarkedGroup::abelian(1, Some(&[2])).unwrap();
        let source = MarkedGroup::wreath(&z1, &z1).unwrap();
        let target = MarkedGroup::wreath(&z1, &z2c).unwrap();
        let theta = Homomorphism::Reduce { moduli: vec![2] }.lifted(1);
        // lamps 3 at 0, -1 at 2, 5 at 1, base 3
        let x = Element::wreath(
            BTreeMap::from([
                (Element::vector([0]), Element::vector([3])),
                (Element::vector([1]), Element::vector([5])),
                (Element::vector([2]), Element::vector([-1])),
            ]),
            Element::vector([3]),
        );
        let image = theta
            .apply(&x, source.structure(), target.structure())
            .unwrap();
        let expected = Element::wreath(
            BTreeMap::from([
                (Element::vector([0]), Element::vector([2])),
                (Element::vector([1]), Element::vector([5])),
            ]),
            Element::vector([1]),
        );
        assert_eq!(image, expected);
        let y = source.generator(1).clone();
        let lhs = theta
            .apply(
                &source.multiply(&x, &y),
                source.structure(),
                target.structure(),
            )
            .unwrap();
        let rhs = target.multiply(
            &image,
            &theta
                .apply(&y, source.structure(), target.structure())
                .unwrap(),
        );
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn mismatched_homomorphisms_error() {
        let z2 = MarkedGroup::abelian(2, None).unwrap();
        let d = make_lazy_srw::<Q>(&z2).distribution();
        assert!(pushforward_distribution(&d, &Homomorphism::BaseProjection, &z2, &z2).is_err());
        let z1 = MarkedGroup::abelian(1, None).unwrap();
        assert!(pushforward_distribution(&d, &Homomorphism::Identity, &z2, &z1).is_err());
    }

    #[test]
    fn compose_and_stretch() {
        let s22 = MarkedGroup::free_solvable(2, 2).unwrap();
        let z2 = MarkedGroup::abelian(2, None).unwrap();
        let hom = Homomorphism::Compose(
            Box::new(Homomorphism::Stretch { factor: 3 }),
            Box::new(Homomorphism::BaseProjection),
        );
        let image = hom
            .apply(s22.generator(0), s22.structure(), z2.structure())
            .unwrap();
        assert_eq!(image, Element::vector([3, 0]));
    }

    #[test]
    fn switch_walk_switch_commutes_with_lift() {
        let z1 = MarkedGroup::abelian(1, None).unwrap();
        let z2c = MarkedGroup::abelian(1, Some(&[2])).unwrap();
        let eta = make_generator_power_measure::<Q>(&z1, &[LawOnZ::simple()]).unwrap();
        let mu = make_lazy_srw::<Q>(&z1);
        let theta = Homomorphism::Reduce { moduli: vec![2] };
        let mu_image = pushforward(&mu, &theta, &z2c).unwrap();
        let lhs_measure = sws(&eta, &mu).unwrap();
        let rhs_measure = sws(&eta, &mu_image).unwrap();
        let theta1 = theta.lifted(1);
        let options = ConvolutionOptions::default();
        let lhs = convolve_powers(&lhs_measure, 3, options).unwrap();
        let rhs = convolve_powers(&rhs_measure, 3, options).unwrap();
        for (l, r) in lhs.iter().zip(&rhs) {
            let pushed =
                pushforward_distribution(l, &theta1, lhs_measure.group(), rhs_measure.group())
                    .unwrap();
            assert_eq!(&pushed, r);
        }
    }
}
