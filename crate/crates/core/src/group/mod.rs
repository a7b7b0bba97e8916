//! Marked groups with exact arithmetic: `Z^r`, finite abelian groups,
//! lamplighters, BS(1,q), wreath products and free solvable groups.

mod ball;
mod element;
mod lattice;
mod marked;
mod membership;
mod spec;
mod structure;

pub use ball::{ball, BallLayer};
pub use element::{AffineElement, Coords, Element, WreathElement};
pub use lattice::{integer_rank, Lattice};
pub use marked::{Family, GroupError, MarkedGroup};
pub use membership::{CosetTable, Membership};
pub use structure::Structure;
pub(crate) use structure::{add_lamp, scaled_unit_vector};
