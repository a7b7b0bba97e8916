use std::collections::BTreeMap;

use num_rational::BigRational;

use super::distribution::Distribution;
use super::law::{check_total, close, LawOnZ, Truncation};
use super::MeasureError;
use crate::group::{Element, MarkedGroup};
use crate::scalar::Probability;

/// What an atom of a step measure is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StepLabel {
    /// `s_i^m` (or its image under the measure's construction).
    GeneratorPower { generator: usize, power: i64 },
    /// A product of several moves, e.g. a switch-walk-switch step.
    Composite,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Atom<P> {
    pub element: Element,
    pub weight: P,
    pub label: StepLabel,
}

/// How a measure was built.
#[derive(Clone, Debug, PartialEq)]
pub enum MeasureKind {
    LazySimple,
    GeneratorPowers,
    /// The lamp-move measure on `Z^r ≀ Γ₁` matching a generator-power measure.
    PhiLower,
    SwitchWalkSwitch {
        depth: usize,
    },
    Pushforward,
    Custom,
}

/// A symmetric probability measure on a marked group, given by its atoms.
#[derive(Clone, Debug)]
pub struct MeasureSpec<P> {
    group: MarkedGroup,
    atoms: Vec<Atom<P>>,
    kind: MeasureKind,
    truncations: Vec<Truncation>,
}

impl<P: Probability> MeasureSpec<P> {
    /// Checks positivity, total mass, membership and symmetry.
    pub fn new(
        group: MarkedGroup,
        atoms: Vec<Atom<P>>,
        kind: MeasureKind,
    ) -> Result<Self, MeasureError> {
        if let Some(bad) = atoms.iter().find(|a| a.weight <= P::zero()) {
            return Err(MeasureError::InvalidWeight(format!(
                "atom {:?} has non-positive weight",
                bad.element
            )));
        }
        if let Some(bad) = atoms.iter().find(|a| !group.contains(&a.element)) {
            return Err(MeasureError::ForeignElement(format!("{:?}", bad.element)));
        }
        check_total(atoms.iter().map(|a| &a.weight))?;
        let spec = Self {
            group,
            atoms,
            kind,
            truncations: Vec::new(),
        };
        let merged = spec.distribution();
        for (x, w) in merged.iter() {
            if !close(&merged.mass(&spec.group.inverse(x)), w) {
                return Err(MeasureError::Asymmetric(format!(
                    "mass of {x:?} differs from its inverse"
                )));
            }
        }
        Ok(spec)
    }

    pub fn group(&self) -> &MarkedGroup {
        &self.group
    }

    pub fn atoms(&self) -> &[Atom<P>] {
        &self.atoms
    }

    pub fn kind(&self) -> &MeasureKind {
        &self.kind
    }

    /// Power-law truncations that went into this measure.
    pub fn truncations(&self) -> &[Truncation] {
        &self.truncations
    }

    /// Atoms merged by element.
    pub fn distribution(&self) -> Distribution<P> {
        Distribution::from_masses(
            self.atoms
                .iter()
                .map(|a| (a.element.clone(), a.weight.clone())),
        )
    }

    /// `W(ρ_α, μ) = sup_{s>0} s·μ(ρ_α > s)` with `ρ_α(s_i^m) = (1+|m|)^α`,
    /// attained at a jump point `v` as `v·μ(ρ_α ≥ v)`.
    pub fn weak_moment(&self, alpha: f64) -> Result<f64, MeasureError> {
        let mut by_length: BTreeMap<u64, f64> = BTreeMap::new();
        for atom in &self.atoms {
            let StepLabel::GeneratorPower { power, .. } = atom.label else {
                return Err(MeasureError::NotGeneratorPowers);
            };
            *by_length.entry(power.unsigned_abs()).or_default() += atom.weight.to_f64();
        }
        let mut tail = 0.0;
        let mut best = 0.0f64;
        for (&length, &mass) in by_length.iter().rev() {
            tail += mass;
            best = best.max((1.0 + length as f64).powf(alpha) * tail);
        }
        Ok(best)
    }
}

/// Lazy simple random walk: `μ(e) = 1/2`, `μ(s_i^{±1}) = 1/(4r)`.
pub fn make_lazy_srw<P: Probability>(group: &MarkedGroup) -> MeasureSpec<P> {
    let laws = vec![LawOnZ::lazy(); group.rank()];
    let mut spec = make_generator_power_measure(group, &laws).expect("lazy laws are valid");
    spec.kind = MeasureKind::LazySimple;
    spec
}

/// `μ = Σ_i (1/r) Σ_m p_i(m) δ_{s̄_i^m}`.
pub fn make_generator_power_measure<P: Probability>(
    group: &MarkedGroup,
    laws: &[LawOnZ<P>],
) -> Result<MeasureSpec<P>, MeasureError> {
    generator_power_atoms(group, laws, |i, m| group.generator_power(i, m)).and_then(|atoms| {
        let mut spec = MeasureSpec::new(group.clone(), atoms, MeasureKind::GeneratorPowers)?;
        spec.truncations = laws
            .iter()
            .filter_map(|l| l.truncation().copied())
            .collect();
        Ok(spec)
    })
}

/// The measure `φ` on `Z^r ≀ Γ₁` with atoms
/// `(δ^i, 0)(0, s̄_i^m)(−δ^i, 0)` of weight `p_i(m)/r`.
pub fn make_phi_lower_measure<P: Probability>(
    group: &MarkedGroup,
    laws: &[LawOnZ<P>],
) -> Result<MeasureSpec<P>, MeasureError> {
    if let Some(generator) = group.torsion_flags().iter().position(|&t| t) {
        return Err(MeasureError::TorsionGenerator { generator });
    }
    phi_lower_unchecked(group, laws)
}

pub(crate) fn phi_lower_unchecked<P: Probability>(
    group: &MarkedGroup,
    laws: &[LawOnZ<P>],
) -> Result<MeasureSpec<P>, MeasureError> {
    let rank = group.rank();
    let target = MarkedGroup::wreath(&MarkedGroup::abelian(rank, None)?, group)?;
    let atoms = generator_power_atoms(group, laws, |i, m| {
        let lamp = &target.generators()[i];
        let step = Element::wreath(BTreeMap::new(), group.generator_power(i, m));
        target.multiply(&target.multiply(lamp, &step), &target.inverse(lamp))
    })?;
    let mut spec = MeasureSpec::new(target, atoms, MeasureKind::PhiLower)?;
    spec.truncations = laws
        .iter()
        .filter_map(|l| l.truncation().copied())
        .collect();
    Ok(spec)
}

fn generator_power_atoms<P: Probability>(
    group: &MarkedGroup,
    laws: &[LawOnZ<P>],
    element: impl Fn(usize, i64) -> Element,
) -> Result<Vec<Atom<P>>, MeasureError> {
    if laws.len() != group.rank() {
        return Err(MeasureError::RankMismatch {
            expected: group.rank(),
            found: laws.len(),
        });
    }
    let share = P::ratio(1, laws.len() as u64);
    Ok(laws
        .iter()
        .enumerate()
        .flat_map(|(i, law)| {
            let element = &element;
            let share = share.clone();
            law.iter().map(move |(m, w)| Atom {
                element: element(i, m),
                weight: w.clone() * share.clone(),
                label: StepLabel::GeneratorPower {
                    generator: i,
                    power: m,
                },
            })
        })
        .collect())
}

/// The switch-walk-switch measure `η ⋆ μ ⋆ η` on `A ≀ G`, with `η` on the
/// lamp group `A` and `μ` on the base `G`.
pub fn sws<P: Probability>(
    eta: &MeasureSpec<P>,
    mu: &MeasureSpec<P>,
) -> Result<MeasureSpec<P>, MeasureError> {
    let target = MarkedGroup::wreath(eta.group(), mu.group())?;
    let base_identity = mu.group().identity();
    let lamp = |a: &Element| {
        let mut lamps = BTreeMap::new();
        if !eta.group().is_identity(a) {
            lamps.insert(base_identity.clone(), a.clone());
        }
        Element::wreath(lamps, base_identity.clone())
    };
    let eta_dist = eta.distribution();
    let mu_dist = mu.distribution();
    let mut masses: Vec<(Element, P)> = Vec::new();
    for (a1, w1) in eta_dist.iter() {
        let first = lamp(a1);
        for (g, wg) in mu_dist.iter() {
            let walked = target.multiply(&first, &Element::wreath(BTreeMap::new(), g.clone()));
            let w12 = w1.clone() * wg.clone();
            for (a2, w2) in eta_dist.iter() {
                masses.push((
                    target.multiply(&walked, &lamp(a2)),
                    w12.clone() * w2.clone(),
                ));
            }
        }
    }
    let merged = Distribution::from_masses(masses);
    let atoms = merged
        .iter()
        .map(|(x, w)| Atom {
            element: x.clone(),
            weight: w.clone(),
            label: StepLabel::Composite,
        })
        .collect();
    let depth = match mu.kind() {
        MeasureKind::SwitchWalkSwitch { depth } => depth + 1,
        _ => 1,
    };
    let mut spec = MeasureSpec::new(target, atoms, MeasureKind::SwitchWalkSwitch { depth })?;
    spec.truncations = mu
        .truncations
        .iter()
        .chain(&eta.truncations)
        .copied()
        .collect();
    Ok(spec)
}

/// `q_k = η ⋆_k q_{k-1} ⋆_k η` on `W_k(A, G)`, with `q_0 = μ`.
pub fn iterated_sws<P: Probability>(
    eta: &MeasureSpec<P>,
    mu: &MeasureSpec<P>,
    depth: usize,
) -> Result<MeasureSpec<P>, MeasureError> {
    let mut q = mu.clone();
    for _ in 0..depth {
        q = sws(eta, &q)?;
    }
    Ok(q)
}

/// `ν(ρ^{±1}) = 1/2` for a non-involution `ρ`.
pub fn make_rho_measure<P: Probability>(
    group: &MarkedGroup,
    rho: &Element,
) -> Result<MeasureSpec<P>, MeasureError> {
    let inverse = group.inverse(rho);
    if &inverse == rho {
        return Err(MeasureError::InvalidParameter(
            "ρ must differ from its inverse".to_string(),
        ));
    }
    let half = P::ratio(1, 2);
    let atoms = vec![
        Atom {
            element: rho.clone(),
            weight: half.clone(),
            label: StepLabel::Composite,
        },
        Atom {
            element: inverse,
            weight: half,
            label: StepLabel::Composite,
        },
    ];
    MeasureSpec::new(group.clone(), atoms, MeasureKind::Custom)
}

/// A measure given by its merged masses; symmetry and normalization are checked.
pub fn from_distribution<P: Probability>(
    group: &MarkedGroup,
    distribution: &Distribution<P>,
    kind: MeasureKind,
) -> Result<MeasureSpec<P>, MeasureError> {
    let atoms = distribution
        .iter()
        .map(|(x, w)| Atom {
            element: x.clone(),
            weight: w.clone(),
            label: StepLabel::Composite,
        })
        .collect();
    MeasureSpec::new(group.clone(), atoms, kind)
}

/// Exact rationals to floats, keeping labels.
pub fn to_float(spec: &MeasureSpec<BigRational>) -> MeasureSpec<f64> {
    MeasureSpec {
        group: spec.group.clone(),
        atoms: spec
            .atoms
            .iter()
            .map(|a| Atom {
                element: a.element.clone(),
                weight: a.weight.to_f64(),
                label: a.label,
            })
            .collect(),
        kind: spec.kind.clone(),
        truncations: spec.truncations.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    #[test]
    fn lazy_srw_weights() {
        let z2 = MarkedGroup::abelian(2, None).unwrap();
        let mu = make_lazy_srw::<Q>(&z2).distribution();
        assert_eq!(mu.mass(&Element::vector([0, 0])), q(1, 2));
        assert_eq!(mu.mass(&Element::vector([1, 0])), q(1, 8));
        assert_eq!(mu.mass(&Element::vector([0, -1])), q(1, 8));
        assert_eq!(mu.total(), q(1, 1));
        assert_eq!(mu.support_len(), 5);
    }

    #[test]
    fn generator_power_measures() {
        let z2 = MarkedGroup::abelian(2, None).unwrap();
        let lazy =
            make_generator_power_measure::<Q>(&z2, &[LawOnZ::lazy(), LawOnZ::lazy()]).unwrap();
        assert_eq!(lazy.distribution(), make_lazy_srw::<Q>(&z2).distribution());
        let mixed =
            make_generator_power_measure::<Q>(&z2, &[LawOnZ::simple(), LawOnZ::lazy()]).unwrap();
        let d = mixed.distribution();
        assert_eq!(d.mass(&Element::vector([1, 0])), q(1, 4));
        assert_eq!(d.mass(&Element::vector([-1, 0])), q(1, 4));
        assert_eq!(d.mass(&Element::vector([0, 0])), q(1, 4));
        let heavy = make_generator_power_measure(
            &z2,
            &[LawOnZ::power_law(1.0, 1000).unwrap(), LawOnZ::lazy()],
        )
        .unwrap();
        let max = heavy
            .atoms()
            .iter()
            .map(|a| match a.label {
                StepLabel::GeneratorPower { power, .. } => power.unsigned_abs(),
                StepLabel::Composite => 0,
            })
            .max();
        assert_eq!(max, Some(1000));
        assert_eq!(heavy.truncations().len(), 1);
        assert!(make_generator_power_measure::<Q>(&z2, &[LawOnZ::lazy()]).is_err());
    }

    #[test]
    fn phi_atoms() {
        let z2 = MarkedGroup::abelian(2, None).unwrap();
        let phi = make_phi_lower_measure::<Q>(&z2, &[LawOnZ::lazy(), LawOnZ::lazy()]).unwrap();
        let atom = phi
            .atoms()
            .iter()
            .find(|a| {
                a.label
                    == StepLabel::GeneratorPower {
                        generator: 0,
                        power: 1,
                    }
            })
            .unwrap();
        let expected = Element::wreath(
            BTreeMap::from([
                (Element::vector([0, 0]), Element::vector([1, 0])),
                (Element::vector([1, 0]), Element::vector([-1, 0])),
            ]),
            Element::vector([1, 0]),
        );
        assert_eq!(atom.element, expected);
        let zero = phi
            .atoms()
            .iter()
            .find(|a| {
                a.label
                    == StepLabel::GeneratorPower {
                        generator: 1,
                        power: 0,
                    }
            })
            .unwrap();
        assert!(phi.group().is_identity(&zero.element));
        let d = phi.distribution();
        for (x, w) in d.iter() {
            assert_eq!(&d.mass(&phi.group().inverse(x)), w);
        }
    }

    #[test]
    fn phi_rejects_torsion() {
        let ll = MarkedGroup::lamplighter(2).unwrap();
        let err = make_phi_lower_measure::<Q>(&ll, &[LawOnZ::lazy(), LawOnZ::lazy()]).unwrap_err();
        assert!(matches!(
            err,
            MeasureError::TorsionGenerator { generator: 0 }
        ));
    }

    #[test]
    fn asymmetric_specs_are_rejected() {
        let z1 = MarkedGroup::abelian(1, None).unwrap();
        let atoms = vec![
            Atom {
                element: Element::vector([1]),
                weight: q(1, 2),
                label: StepLabel::Composite,
            },
            Atom {
                element: Element::vector([2]),
                weight: q(1, 2),
                label: StepLabel::Composite,
            },
        ];
        assert!(matches!(
            MeasureSpec::new(z1.clone(), atoms, MeasureKind::Custom),
            Err(MeasureError::Asymmetric(_))
        ));
        let short = vec![Atom {
            element: Element::vector([0]),
            weight: q(1, 2),
            label: StepLabel::Composite,
        }];
        assert!(matches!(
            MeasureSpec::new(z1, short, MeasureKind::Custom),
            Err(MeasureError::NotNormalized(_))
        ));
    }

    #[test]
    fn sws_on_lamplighter_line() {
        let z1 = MarkedGroup::abelian(1, None).unwrap();
        let eta = make_generator_power_measure::<Q>(&z1, &[LawOnZ::simple()]).unwrap();
        let dirac = make_generator_power_measure::<Q>(&z1, &[LawOnZ::dirac()]).unwrap();
        let q1 = sws(&eta, &dirac).unwrap();
        let origin = Element::vector([0]);
        let zero_lamp = Element::wreath(BTreeMap::new(), origin.clone());
        assert_eq!(q1.distribution().mass(&zero_lamp), q(1, 2));
        assert_eq!(q1.kind(), &MeasureKind::SwitchWalkSwitch { depth: 1 });

        let mu = make_lazy_srw::<Q>(&z1);
        let q1 = sws(&eta, &mu).unwrap();
        for atom in q1.atoms() {
            let w = atom.element.as_wreath().unwrap();
            for position in w.lamps.keys() {
                assert!(position == &origin || position == &w.base);
            }
        }
        assert_eq!(
            iterated_sws(&eta, &mu, 1).unwrap().distribution(),
            q1.distribution()
        );
        let q2 = iterated_sws(&eta, &mu, 2).unwrap();
        assert_eq!(q2.kind(), &MeasureKind::SwitchWalkSwitch { depth: 2 });
        assert_eq!(q2.distribution().total(), q(1, 1));
    }

    #[test]
    fn weak_moments() {
        let z1 = MarkedGroup::abelian(1, None).unwrap();
        let dirac = make_generator_power_measure::<Q>(&z1, &[LawOnZ::dirac()]).unwrap();
        // ρ_α ≥ 1 everywhere, so every measure has W ≥ 1
        assert_eq!(dirac.weak_moment(1.0).unwrap(), 1.0);
        let two = make_generator_power_measure::<Q>(&z1, &[LawOnZ::two_point(3).unwrap()]).unwrap();
        assert_eq!(two.weak_moment(1.0).unwrap(), 4.0);
        let lazy = make_lazy_srw::<Q>(&z1);
        // jumps at ρ = 1 (mass 1) and ρ = 2^α (mass 1/2)
        assert_eq!(lazy.weak_moment(2.0).unwrap(), 2.0);
        for alpha in [0.5, 1.0, 1.5] {
            for cutoff in [100, 1_000, 10_000] {
                let law = LawOnZ::power_law(alpha, cutoff).unwrap();
                let w = make_generator_power_measure(&z1, &[law])
                    .unwrap()
                    .weak_moment(alpha)
                    .unwrap();
                assert!(w.is_finite() && w < 4.0, "α = {alpha}: {w}");
            }
        }
        let sws_measure = sws(&make_lazy_srw::<Q>(&z1), &lazy).unwrap();
        assert!(sws_measure.weak_moment(1.0).is_err());
    }
}
