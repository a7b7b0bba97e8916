use std::collections::BTreeMap;

use super::spec::MeasureSpec;
use super::MeasureError;
use crate::group::{Element, MarkedGroup};
use crate::scalar::Probability;

/// A finitely supported mass function on group elements.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution<P> {
    masses: BTreeMap<Element, P>,
    /// Mass dropped by pruning (float mode only).
    pruned: f64,
}

impl<P: Probability> Distribution<P> {
    pub fn dirac(x: Element) -> Self {
        Self {
            masses: BTreeMap::from([(x, P::one())]),
            pruned: 0.0,
        }
    }

    /// Sums the masses of repeated elements; zero masses are dropped.
    pub fn from_masses(masses: impl IntoIterator<Item = (Element, P)>) -> Self {
        let mut merged: BTreeMap<Element, P> = BTreeMap::new();
        for (x, w) in masses {
            accumulate(&mut merged, x, w);
        }
        merged.retain(|_, w| !w.is_zero());
        Self {
            masses: merged,
            pruned: 0.0,
        }
    }

    pub fn mass(&self, x: &Element) -> P {
        self.masses.get(x).cloned().unwrap_or_else(P::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Element, &P)> {
        self.masses.iter()
    }

    pub fn support_len(&self) -> usize {
        self.masses.len()
    }

    pub fn total(&self) -> P {
        self.masses
            .values()
            .fold(P::zero(), |acc, w| acc + w.clone())
    }

    /// Upper bound on the mass lost to pruning.
    pub fn pruned(&self) -> f64 {
        self.pruned
    }

    /// `self ⋆ other`: the law of `XY` for independent `X ~ self`, `Y ~ other`.
    pub fn convolve(&self, other: &Self, group: &MarkedGroup) -> Self {
        let mut out: BTreeMap<Element, P> = BTreeMap::new();
        for (x, wx) in &self.masses {
            for (y, wy) in &other.masses {
                accumulate(&mut out, group.multiply(x, y), wx.clone() * wy.clone());
            }
        }
        Self {
            masses: out,
            pruned: self.pruned + other.pruned,
        }
    }

    /// Image under a map of elements, summing masses over fibers.
    pub fn map(&self, f: impl Fn(&Element) -> Element) -> Self {
        let mut out = Self::from_masses(self.masses.iter().map(|(x, w)| (f(x), w.clone())));
        out.pruned = self.pruned;
        out
    }

    /// Whether `m(g) = m(g^-1)` on the support, within the scalar tolerance.
    pub fn is_symmetric(&self, group: &MarkedGroup) -> bool {
        self.masses
            .iter()
            .all(|(x, w)| super::law::close(&self.mass(&group.inverse(x)), w))
    }

    /// Float mode: drops atoms below `floor`, then the lightest atoms until
    /// at most `budget` remain. Returns the mass dropped.
    fn prune(&mut self, floor: f64, budget: usize) -> f64 {
        let mut dropped = 0.0;
        self.masses.retain(|_, w| {
            let keep = w.to_f64() >= floor;
            if !keep {
                dropped += w.to_f64();
            }
            keep
        });
        if self.masses.len() > budget {
            let mut weights: Vec<f64> = self.masses.values().map(Probability::to_f64).collect();
            let excess = self.masses.len() - budget;
            let (_, threshold, _) = weights.select_nth_unstable_by(excess - 1, f64::total_cmp);
            let threshold = *threshold;
            let mut to_drop = excess;
            self.masses.retain(|_, w| {
                if to_drop > 0 && w.to_f64() <= threshold {
                    to_drop -= 1;
                    dropped += w.to_f64();
                    false
                } else {
                    true
                }
            });
        }
        self.pruned += dropped;
        dropped
    }
}

fn accumulate<P: Probability>(map: &mut BTreeMap<Element, P>, x: Element, w: P) {
    match map.get_mut(&x) {
        Some(slot) => *slot = slot.clone() + w,
        None => {
            map.insert(x, w);
        }
    }
}

/// Limits for convolution powers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvolutionOptions {
    /// Largest support kept between steps.
    pub budget: usize,
    /// Float mode only: atoms lighter than this are dropped.
    pub mass_floor: f64,
}

impl Default for ConvolutionOptions {
    fn default() -> Self {
        Self {
            budget: 2_000_000,
            mass_floor: 0.0,
        }
    }
}

/// `μ^{*n}` by repeated sparse convolution. Exact scalars never prune; when
/// the support outgrows the budget the last complete power is returned in
/// the error.
pub fn convolve_power<P: Probability>(
    spec: &MeasureSpec<P>,
    steps: usize,
    options: ConvolutionOptions,
) -> Result<Distribution<P>, MeasureError> {
    let step = spec.distribution();
    let group = spec.group();
    let mut current = Distribution::dirac(group.identity());
    for completed in 0..steps {
        let next = current.convolve(&step, group);
        current = admit(next, options, completed, current)?;
    }
    Ok(current)
}

/// All powers `μ^{*0}, …, μ^{*n}`.
pub fn convolve_powers<P: Probability>(
    spec: &MeasureSpec<P>,
    steps: usize,
    options: ConvolutionOptions,
) -> Result<Vec<Distribution<P>>, MeasureError> {
    let step = spec.distribution();
    let group = spec.group();
    let mut powers = vec![Distribution::dirac(group.identity())];
    for completed in 0..steps {
        let last = powers.last().expect("nonempty");
        let next = last.convolve(&step, group);
        let next = admit(next, options, completed, last.clone())?;
        powers.push(next);
    }
    Ok(powers)
}

fn admit<P: Probability>(
    mut next: Distribution<P>,
    options: ConvolutionOptions,
    completed: usize,
    previous: Distribution<P>,
) -> Result<Distribution<P>, MeasureError> {
    if P::EXACT {
        if next.support_len() > options.budget {
            return Err(MeasureError::BudgetExceeded {
                budget: options.budget,
                completed,
                partial: Box::new(previous.into_float()),
            });
        }
    } else {
        next.prune(options.mass_floor, options.budget);
    }
    Ok(next)
}

impl<P: Probability> Distribution<P> {
    fn into_float(self) -> Distribution<f64> {
        Distribution {
            masses: self
                .masses
                .into_iter()
                .map(|(x, w)| (x, w.to_f64()))
                .collect(),
            pruned: self.pruned,
        }
    }
}

/// `μ^{*n}(e)` by meeting in the middle: `Σ_g μ^{*a}(g) μ^{*b}(g^-1)` with
/// `a + b = n`.
pub fn return_probability_exact<P: Probability>(
    spec: &MeasureSpec<P>,
    steps: usize,
    options: ConvolutionOptions,
) -> Result<P, MeasureError> {
    let group = spec.group();
    let half = steps / 2;
    let powers = convolve_powers(spec, steps - half, options)?;
    let left = &powers[steps - half];
    let right = &powers[half];
    let (small, large) = if left.support_len() <= right.support_len() {
        (left, right)
    } else {
        (right, left)
    };
    Ok(small.iter().fold(P::zero(), |acc, (x, w)| {
        acc + w.clone() * large.mass(&group.inverse(x))
    }))
}

/// Return probabilities `μ^{*n}(e)` for `n = 0..=steps`.
pub fn return_probabilities<P: Probability>(
    spec: &MeasureSpec<P>,
    steps: usize,
    options: ConvolutionOptions,
) -> Result<Vec<P>, MeasureError> {
    let identity = spec.group().identity();
    Ok(convolve_powers(spec, steps, options)?
        .iter()
        .map(|d| d.mass(&identity))
        .collect())
}

/// `μ^{*2k}(e) = Σ_g μ^{*k}(g) μ^{*k}(g^-1)` for `k = 0..=half_steps`.
pub fn even_return_probabilities<P: Probability>(
    spec: &MeasureSpec<P>,
    half_steps: usize,
    options: ConvolutionOptions,
) -> Result<Vec<P>, MeasureError> {
    let group = spec.group();
    Ok(convolve_powers(spec, half_steps, options)?
        .iter()
        .map(|d| {
            d.iter().fold(P::zero(), |acc, (x, w)| {
                acc + w.clone() * d.mass(&group.inverse(x))
            })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::super::law::LawOnZ;
    use super::super::spec::{make_generator_power_measure, make_lazy_srw};
    use super::*;
    use num_rational::BigRational;
    use num_traits::One;
    use proptest::prelude::*;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    /// Return probability on `Z` for `p(±1) = 1/2`: `C(n, n/2) / 2^n`.
    fn simple_walk_on_z(n: u64) -> Q {
        if n % 2 == 1 {
            return q(0, 1);
        }
        let mut binomial = num_bigint::BigInt::one();
        for k in 0..n / 2 {
            binomial = binomial * (n - k) / (k + 1);
        }
        Q::new(binomial, num_bigint::BigInt::from(2).pow(n as u32))
    }

    #[test]
    fn zeroth_power_is_dirac() {
        let s22 = MarkedGroup::free_solvable(2, 2).unwrap();
        let mu = make_lazy_srw::<Q>(&s22);
        let d = convolve_power(&mu, 0, ConvolutionOptions::default()).unwrap();
        assert_eq!(d, Distribution::dirac(s22.identity()));
    }

    #[test]
    fn lazy_walk_on_free_metabelian_group() {
        let s22 = MarkedGroup::free_solvable(2, 2).unwrap();
        let mu = make_lazy_srw::<Q>(&s22);
        let options = ConvolutionOptions::default();
        assert_eq!(return_probability_exact(&mu, 2, options).unwrap(), q(5, 16));
        let powers = return_probabilities(&mu, 6, options).unwrap();
        assert_eq!(powers[2], q(5, 16));
        for (n, expected) in powers.iter().enumerate() {
            assert_eq!(
                &return_probability_exact(&mu, n, options).unwrap(),
                expected
            );
        }
    }

    #[test]
    fn simple_walk_matches_binomial() {
        let z1 = MarkedGroup::abelian(1, None).unwrap();
        let mu = make_generator_power_measure::<Q>(&z1, &[LawOnZ::simple()]).unwrap();
        let options = ConvolutionOptions::default();
        for n in 0..12 {
            assert_eq!(
                return_probability_exact(&mu, n, options).unwrap(),
                simple_walk_on_z(n as u64)
            );
        }
    }

    #[test]
    fn exact_budget_reports_partial_power() {
        let z2 = MarkedGroup::abelian(2, None).unwrap();
        let mu = make_lazy_srw::<Q>(&z2);
        let options = ConvolutionOptions {
            budget: 20,
            mass_floor: 0.0,
        };
        match convolve_power(&mu, 5, options) {
            Err(MeasureError::BudgetExceeded {
                completed, partial, ..
            }) => {
                assert_eq!(completed, 2);
                assert_eq!(partial.support_len(), 13);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn float_pruning_records_deficit() {
        let z2 = MarkedGroup::abelian(2, None).unwrap();
        let mu = make_lazy_srw::<f64>(&z2);
        let options = ConvolutionOptions {
            budget: 30,
            mass_floor: 1e-4,
        };
        let d = convolve_power(&mu, 8, options).unwrap();
        assert!(d.support_len() <= 30);
        assert!(d.pruned() > 0.0);
        assert!((d.total() + d.pruned() - 1.0).abs() < 1e-12);
    }

    fn groups() -> Vec<MarkedGroup> {
        ["zr:2", "ll:2", "bs:2", "sdr:2,2"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect()
    }

    #[test]
    fn exact_powers_conserve_mass_and_symmetry() {
        for group in groups() {
            let mu = make_lazy_srw::<Q>(&group);
            let powers = convolve_powers(&mu, 5, ConvolutionOptions::default()).unwrap();
            for d in &powers {
                assert_eq!(d.total(), q(1, 1));
                assert!(d.is_symmetric(&group));
            }
        }
    }

    #[test]
    fn even_return_probabilities_decrease() {
        for group in groups() {
            let mu = make_lazy_srw::<Q>(&group);
            let returns = even_return_probabilities(&mu, 6, ConvolutionOptions::default()).unwrap();
            for n in 1..=6 {
                assert!(returns[n] <= returns[n - 1], "{} at n = {n}", group.label());
            }
            let direct = return_probabilities(&mu, 6, ConvolutionOptions::default()).unwrap();
            for n in 0..=3 {
                assert_eq!(returns[n], direct[2 * n]);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn meet_in_the_middle_agrees(n in 0usize..7, which in 0usize..4) {
            let group = &groups()[which];
            let mu = make_lazy_srw::<Q>(group);
            let options = ConvolutionOptions::default();
            let direct = convolve_power(&mu, n, options).unwrap().mass(&group.identity());
            prop_assert_eq!(return_probability_exact(&mu, n, options).unwrap(), direct);
        }
    }
}
