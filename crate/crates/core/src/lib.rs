//! Random walks on free solvable groups `F_r/N^{(d)}` and their relatives:
//! reduced words, marked groups with exact normal forms, Fox calculus and
//! the Magnus embedding, exact and Monte Carlo return probabilities,
//! exclusive pairs, and the asymptotic profiles they bound.
//!
//! Probabilities are generic over [`scalar::Probability`]; the aliases
//! below fix the exact rational and the float instantiations.

pub mod acceptance;
pub mod asymptotics;
pub mod exclusive;
pub mod fox;
pub mod group;
pub mod measures;
pub mod scalar;
pub mod words;

use num_bigint::BigInt;
use num_rational::BigRational;

pub use group::{Element, MarkedGroup};
pub use words::ReducedWord;

pub type ExactDistribution = measures::Distribution<BigRational>;
pub type FloatDistribution = measures::Distribution<f64>;
pub type ExactMeasure = measures::MeasureSpec<BigRational>;
pub type FloatMeasure = measures::MeasureSpec<f64>;
pub type GroupRing = fox::GroupRingElement<BigInt>;
