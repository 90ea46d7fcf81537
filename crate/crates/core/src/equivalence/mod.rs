//! Equivalence machinery: EL maps, the restricted coefficient search,
//! centralizers, the action on projective polynomials, and explicit
//! witnesses between family members.

pub mod carlet;
pub mod centralizer;
pub mod el;
pub mod gaction;
pub mod known;
pub mod restricted;

pub use centralizer::{centralizer_search, CentralizerClass, CentralizerReport};
pub use el::{apply_el, graph_set, is_graph_equiv, z_subgroup_member, Block, BlockMap, ELMap};
pub use gaction::{g_action, orbit_and_stabilizer, GGroupElement};
pub use restricted::{restricted_equiv, search_equivalence, Justification, RestrictedOutcome};
