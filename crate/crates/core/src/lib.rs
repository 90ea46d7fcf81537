//! Biprojective APN functions on GF(2^m) x GF(2^m).
//!
//! Field arithmetic, the catalog of known families, two APN tests, Walsh
//! spectra, and an equivalence toolkit (EL maps, restricted equivalence
//! search, centralizers, orbits of projective polynomials).

pub mod apn;
pub mod biproj;
pub mod classify;
pub mod equivalence;
pub mod error;
pub mod family;
pub mod field;
pub mod gf2;
pub mod walsh;

pub use apn::{apn_naive, apn_projective, to_truth_table, DifferentialSpectrum, TruthTable};
pub use biproj::{BiprojectivePair, DeltaSystem, ProjPoint, ProjectivePolynomial};
pub use error::{Error, Result};
pub use family::{enumerate_family, make_family, FamilyInstance, FamilyParams, FamilyTag};
pub use field::{FieldCtx, FieldElement, ProductElement};
