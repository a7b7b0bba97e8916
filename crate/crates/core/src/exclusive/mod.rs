//! Sufficient conditions for a subgroup `Γ` and a relator `ρ` to form an
//! exclusive pair, and the finite abelian quotient criterion that certifies
//! the last of them.

mod candidate;
mod check;
mod quotient;

use thiserror::Error;

use crate::group::GroupError;
use crate::words::WordError;

pub use candidate::{ExclusiveCandidate, DEFAULT_RADIUS, DEFAULT_SEARCH_BUDGET};
pub use check::{
    check_exclusive, search_edge_in_subgroup_flows, translate_rank, CheckReport, Condition2,
    Condition3, EdgeSearch, Method, TranslateRank, Verdict,
};
pub use quotient::{make_hm, tm_criterion, SubgroupHm};

#[derive(Debug, Error)]
pub enum ExclusiveError {
    #[error("the relator must be a nonempty reduced word")]
    EmptyRelator,
    #[error("the relator does not lie in N: its flow is not a circulation")]
    NotInN,
    #[error("the relator lies in [N,N]: its flow is zero")]
    InCommutatorOfN,
    #[error("split index {index} is outside a relator of length {len}")]
    SplitOutOfRange { index: usize, len: usize },
    #[error("the letter at split index {index} must be a positive generator")]
    InverseSplitLetter { index: usize },
    #[error("expected {expected} moduli, found {found}")]
    ModuliLength { expected: usize, found: usize },
    #[error("modulus {value} at position {position} is below {minimum}")]
    ModulusTooSmall {
        position: usize,
        value: u64,
        minimum: u64,
    },
    #[error("generator {generator} of the subgroup is not accepted by predicate '{predicate}'")]
    PredicateMismatch { generator: usize, predicate: String },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Word(#[from] WordError),
}
