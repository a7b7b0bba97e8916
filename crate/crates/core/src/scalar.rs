//! Scalar traits shared by the sparse integer maps and the probability engine.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

/// Integer coefficients of group-ring elements, module vectors and flows.
pub trait Coefficient:
    Clone
    + Debug
    + Display
    + Eq
    + Ord
    + Hash
    + Zero
    + One
    + Signed
    + Neg<Output = Self>
    + AddAssign
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
}

impl<T> Coefficient for T where
    T: Clone
        + Debug
        + Display
        + Eq
        + Ord
        + Hash
        + Zero
        + One
        + Signed
        + Neg<Output = Self>
        + AddAssign
        + FromPrimitive
        + ToPrimitive
        + Send
        + Sync
        + 'static
{
}

/// Probability masses: exact rationals or floats, never mixed.
pub trait Probability:
    Clone
    + Debug
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// True for the exact rational path.
    const EXACT: bool;

    fn ratio(numerator: u64, denominator: u64) -> Self;

    fn to_f64(&self) -> f64;

    /// Slack allowed when checking that masses sum to one.
    fn tolerance() -> f64;

    fn render(&self) -> String;
}

impl Probability for BigRational {
    const EXACT: bool = true;

    fn ratio(numerator: u64, denominator: u64) -> Self {
        BigRational::new(BigInt::from(numerator), BigInt::from(denominator))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn tolerance() -> f64 {
        0.0
    }

    fn render(&self) -> String {
        self.to_string()
    }
}

impl Probability for f64 {
    const EXACT: bool = false;

    fn ratio(numerator: u64, denominator: u64) -> Self {
        numerator as f64 / denominator as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn tolerance() -> f64 {
        1e-12
    }

    fn render(&self) -> String {
        format!("{self:e}")
    }
}

impl Probability for f32 {
    const EXACT: bool = false;

    fn ratio(numerator: u64, denominator: u64) -> Self {
        (numerator as f64 / denominator as f64) as f32
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }

    fn tolerance() -> f64 {
        1e-5
    }

    fn render(&self) -> String {
        format!("{self:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratios_agree_across_scalars() {
        let exact = BigRational::ratio(5, 16);
        assert_eq!(exact.render(), "5/16");
        assert_eq!(Probability::to_f64(&exact), 0.3125);
        assert_eq!(<f64 as Probability>::ratio(5, 16), 0.3125);
        assert_eq!(<f32 as Probability>::ratio(5, 16), 0.3125f32);
    }
}
