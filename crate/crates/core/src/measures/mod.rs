//! Step measures, exact convolution powers, pushforwards and Monte Carlo
//! estimates of return probabilities.

mod distribution;
mod homomorphism;
mod law;
mod monte_carlo;
mod spec;

use thiserror::Error;

use crate::group::GroupError;

pub use distribution::{
    convolve_power, convolve_powers, even_return_probabilities, return_probabilities,
    return_probability_exact, ConvolutionOptions, Distribution,
};
pub use homomorphism::{pushforward, pushforward_distribution, Homomorphism};
pub use law::{LawOnZ, Truncation, DEFAULT_CUTOFF};
pub use monte_carlo::{
    mc_return_probability, wilson_interval, with_threads, WalkEstimate, BLOCK_SIZE, Z_95,
};
pub use spec::{
    from_distribution, iterated_sws, make_generator_power_measure, make_lazy_srw,
    make_phi_lower_measure, make_rho_measure, sws, to_float, Atom, MeasureKind, MeasureSpec,
    StepLabel,
};

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("measure is not symmetric: {0}")]
    Asymmetric(String),
    #[error("weights sum to {0}, not 1")]
    NotNormalized(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{0} is not an element of the target group")]
    ForeignElement(String),
    #[error("expected {expected} laws, one per generator, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error(
        "generator s{} is a torsion element; the lamp-move measure only matches walks whose generators all have infinite order",
        generator + 1
    )]
    TorsionGenerator { generator: usize },
    #[error("weak moments need a measure supported on generator powers")]
    NotGeneratorPowers,
    #[error("homomorphism mismatch: {0}")]
    HomomorphismMismatch(String),
    #[error("support exceeded {budget} elements after {completed} complete steps")]
    BudgetExceeded {
        budget: usize,
        completed: usize,
        partial: Box<Distribution<f64>>,
    },
    #[error(transparent)]
    Group(#[from] GroupError),
}
