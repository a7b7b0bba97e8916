//! Fox derivatives, the Magnus embedding `F_r/[N,N] → Z^r ≀ Γ₁`, edge
//! flows on the Cayley graph of `Γ₁`, the `δ_m` stretch and the `ϑ`
//! projection.

mod flow;
mod magnus;
mod ring;
mod stretch;
mod vartheta;

pub use flow::{flow_of_word, traced_flow, words_equal_mod_nn, Flow, NetFlow};
pub use magnus::{
    fox_derivative, fox_derivatives, magnus_embed, magnus_generator_element, magnus_group,
    magnus_structure, WreathImage,
};
pub use ring::{GroupRingElement, ModuleVector};
pub use stretch::{stretch_flow, stretch_flow_with, stretch_word, StretchStatus, StretchedFlow};
pub use vartheta::{vartheta_project, vartheta_target, AlternatingForm};
