use std::collections::BTreeMap;

use num_rational::BigRational;

use super::MeasureError;
use crate::scalar::Probability;

/// Default truncation for power laws.
pub const DEFAULT_CUTOFF: u64 = 10_000;

/// Bookkeeping for a power law truncated at `|m| ≤ cutoff`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Truncation {
    pub alpha: f64,
    pub cutoff: u64,
    /// `Σ_{|m| ≤ M} (1+|m|)^{-1-α}`, the renormalization constant.
    pub partial_sum: f64,
    /// Mass of the untruncated law `c(1+|m|)^{-1-α}` on `|m| > M`.
    pub deficit: f64,
}

/// A symmetric probability law on `Z` with finite support.
#[derive(Clone, Debug, PartialEq)]
pub struct LawOnZ<P> {
    weights: BTreeMap<i64, P>,
    truncation: Option<Truncation>,
}

impl<P: Probability> LawOnZ<P> {
    /// Checks positivity, symmetry and total mass.
    pub fn from_table(entries: impl IntoIterator<Item = (i64, P)>) -> Result<Self, MeasureError> {
        let mut weights: BTreeMap<i64, P> = BTreeMap::new();
        for (m, w) in entries {
            if w <= P::zero() {
                return Err(MeasureError::InvalidWeight(format!(
                    "weight at {m} is not positive"
                )));
            }
            let slot = weights.entry(m).or_insert_with(P::zero);
            *slot = slot.clone() + w;
        }
        for (m, w) in &weights {
            let mirror = weights.get(&-m).cloned().unwrap_or_else(P::zero);
            if !close(&mirror, w) {
                return Err(MeasureError::Asymmetric(format!(
                    "p({m}) differs from p({})",
                    -m
                )));
            }
        }
        check_total(weights.values())?;
        Ok(Self {
            weights,
            truncation: None,
        })
    }

    /// `p(0) = 1/2`, `p(±1) = 1/4`.
    pub fn lazy() -> Self {
        Self::from_table([
            (0, P::ratio(1, 2)),
            (1, P::ratio(1, 4)),
            (-1, P::ratio(1, 4)),
        ])
        .expect("valid")
    }

    /// `p(±1) = 1/2`.
    pub fn simple() -> Self {
        Self::from_table([(1, P::ratio(1, 2)), (-1, P::ratio(1, 2))]).expect("valid")
    }

    /// `p(±m) = 1/2`.
    pub fn two_point(m: i64) -> Result<Self, MeasureError> {
        if m == 0 {
            return Err(MeasureError::InvalidWeight(
                "two-point law needs m ≠ 0".to_string(),
            ));
        }
        Self::from_table([(m, P::ratio(1, 2)), (-m, P::ratio(1, 2))])
    }

    /// The Dirac mass at 0.
    pub fn dirac() -> Self {
        Self::from_table([(0, P::one())]).expect("valid")
    }

    pub fn weight(&self, m: i64) -> P {
        self.weights.get(&m).cloned().unwrap_or_else(P::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &P)> {
        self.weights.iter().map(|(m, w)| (*m, w))
    }

    pub fn support_len(&self) -> usize {
        self.weights.len()
    }

    pub fn max_jump(&self) -> u64 {
        self.weights
            .keys()
            .map(|m| m.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    pub fn truncation(&self) -> Option<&Truncation> {
        self.truncation.as_ref()
    }
}

impl LawOnZ<f64> {
    /// `p(m) ∝ (1+|m|)^{-1-α}` on `|m| ≤ cutoff`, renormalized.
    pub fn power_law(alpha: f64, cutoff: u64) -> Result<Self, MeasureError> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(MeasureError::InvalidParameter(format!(
                "α = {alpha} is outside (0, 2]"
            )));
        }
        if cutoff == 0 {
            return Err(MeasureError::InvalidParameter(
                "cutoff must be at least 1".to_string(),
            ));
        }
        let cutoff_i = i64::try_from(cutoff)
            .map_err(|_| MeasureError::InvalidParameter("cutoff too large".to_string()))?;
        let raw = |m: i64| (1.0 + m.unsigned_abs() as f64).powf(-1.0 - alpha);
        // sum smallest terms first
        let partial_sum = raw(0) + 2.0 * (1..=cutoff_i).rev().map(raw).sum::<f64>();
        let weights = (-cutoff_i..=cutoff_i)
            .map(|m| (m, raw(m) / partial_sum))
            .collect();
        let exponent = 1.0 + alpha;
        let full_sum =
            2.0 * (zeta_partial(exponent, cutoff + 1) + zeta_tail(exponent, cutoff + 2)) - 1.0;
        Ok(Self {
            weights,
            truncation: Some(Truncation {
                alpha,
                cutoff,
                partial_sum,
                deficit: 1.0 - partial_sum / full_sum,
            }),
        })
    }
}

impl LawOnZ<BigRational> {
    /// The float copy of an exact law.
    pub fn to_float(&self) -> LawOnZ<f64> {
        LawOnZ {
            weights: self.weights.iter().map(|(m, w)| (*m, w.to_f64())).collect(),
            truncation: self.truncation,
        }
    }
}

/// `Σ_{k=1}^{n} k^{-s}`, smallest terms first.
fn zeta_partial(s: f64, n: u64) -> f64 {
    (1..=n).rev().map(|k| (k as f64).powf(-s)).sum()
}

/// `Σ_{k ≥ n} k^{-s}` by Euler–Maclaurin with three Bernoulli corrections.
fn zeta_tail(s: f64, n: u64) -> f64 {
    let n = n as f64;
    let base = n.powf(-s);
    base * (n / (s - 1.0) + 0.5 + s / (12.0 * n) - s * (s + 1.0) * (s + 2.0) / (720.0 * n.powi(3))
        + s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) / (30_240.0 * n.powi(5)))
}

pub(crate) fn close<P: Probability>(a: &P, b: &P) -> bool {
    if P::EXACT {
        a == b
    } else {
        (a.to_f64() - b.to_f64()).abs() <= P::tolerance()
    }
}

pub(crate) fn check_total<'a, P: Probability>(
    weights: impl Iterator<Item = &'a P>,
) -> Result<(), MeasureError> {
    let total = weights.fold(P::zero(), |acc, w| acc + w.clone());
    if close(&total, &P::one()) {
        Ok(())
    } else {
        Err(MeasureError::NotNormalized(total.render()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn finite_laws() {
        let lazy = LawOnZ::<BigRational>::lazy();
        assert_eq!(lazy.weight(0), q(1, 2));
        assert_eq!(lazy.weight(-1), q(1, 4));
        assert_eq!(lazy.max_jump(), 1);
        assert!(LawOnZ::<BigRational>::from_table([(1, q(1, 2)), (2, q(1, 2))]).is_err());
        assert!(LawOnZ::<BigRational>::from_table([(1, q(1, 4)), (-1, q(1, 4))]).is_err());
        assert!(
            LawOnZ::<BigRational>::from_table([(0, q(0, 1)), (1, q(1, 2)), (-1, q(1, 2))]).is_err()
        );
        assert_eq!(
            LawOnZ::<BigRational>::two_point(3).unwrap().weight(-3),
            q(1, 2)
        );
    }

    #[test]
    fn power_law_shape() {
        let law = LawOnZ::power_law(1.0, 1_000).unwrap();
        assert_eq!(law.max_jump(), 1_000);
        for m in 0..50 {
            assert_eq!(law.weight(m), law.weight(-m));
        }
        assert!((law.weight(0) / law.weight(1) - 4.0).abs() < 1e-12);
        let half = LawOnZ::power_law(0.5, 100).unwrap();
        assert!((half.weight(0) / half.weight(1) - 2f64.powf(1.5)).abs() < 1e-12);
        assert!(LawOnZ::power_law(0.0, 10).is_err());
        assert!(LawOnZ::power_law(2.5, 10).is_err());
        assert!(LawOnZ::power_law(2.0, 10).is_ok());
    }

    #[test]
    fn power_law_normalization() {
        let law = LawOnZ::power_law(1.0, 10_000).unwrap();
        let total: f64 = law.iter().map(|(_, w)| *w).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let t = law.truncation().unwrap();
        // for α = 1 the full sum is 2ζ(2) − 1 = π²/3 − 1, with tail ≈ 2/M
        let full = std::f64::consts::PI.powi(2) / 3.0 - 1.0;
        assert!((t.deficit - (1.0 - t.partial_sum / full)).abs() < 1e-12);
        assert!((t.deficit * full - 2.0 / 10_002.0).abs() < 1e-7);
    }

    #[test]
    fn zeta_tail_matches_direct_sum() {
        for s in [1.2, 1.5, 2.0, 3.0] {
            let direct: f64 = (50..2_000_000u64)
                .rev()
                .map(|k| (k as f64).powf(-s))
                .sum::<f64>()
                + zeta_tail(s, 2_000_000);
            assert!((zeta_tail(s, 50) - direct).abs() < 1e-12, "s = {s}");
        }
    }
}
