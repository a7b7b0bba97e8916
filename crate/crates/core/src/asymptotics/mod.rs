//! Return-probability profiles, γ-functions of volume growth, Følner
//! couples and Dirichlet eigenvalues.

mod dirichlet;
mod folner;
mod profile;
mod volume;

use thiserror::Error;

use crate::group::GroupError;
use crate::measures::MeasureError;

pub use dirichlet::{dirichlet_lambda1, DirichletReport, DEFAULT_DIRICHLET_BUDGET};
pub use folner::{folner_zd, FolnerCouple};
pub use profile::{iterated_log, witt_degree, Profile, ProfilePoint, FAMILIES};
pub use volume::{
    adaptive_simpson, delta_regular_check, fit_stretched_exponent, gamma_from_volume,
    least_squares_slope, log_grid, DeltaRegularity, GammaValue, VolumeFunction,
};

#[derive(Debug, Error)]
pub enum AsymptoticsError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("γ({t}) is not representable as a finite float")]
    NonFinite { t: f64 },
    #[error("vertex set has {size} elements, more than the budget of {budget}")]
    BudgetExceeded { size: usize, budget: usize },
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Group(#[from] GroupError),
}
