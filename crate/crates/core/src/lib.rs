//! Exact character theory over finite groups with a Weil-Deligne layer on
//! top: cyclotomic scalars, character tables, the representation-ring
//! calculus (induction, restriction, tensor induction, indicators),
//! formal (irreducible boxtimes S_n) sums with Clebsch-Gordan plethysm,
//! and the classification of 4-dimensional symplectic-similitude
//! parameters with their packet sizes, computed along two independent
//! paths and cross-validated against built-in decision tables.
//!
//! The library is the primary interface; see the crate examples for one
//! runnable program per capability, and the thin `wdcalc` binary for the
//! command-line front end.

pub mod charalg;
pub mod cli;
pub mod clifford;
pub mod cyclo;
pub mod error;
pub mod expr;
pub mod group;
pub mod gsp4;
pub mod perm;
pub mod rules;
pub mod suite;
pub mod wd;

pub use charalg::{
    asai_lift, fs_indicator, induce, omega_char, restrict, tensor_induce_index2, VirtualChar,
};
pub use cyclo::{Cyclo, Rat};
pub use error::{Error, Result};
pub use group::{catalog, char_table, CharTable, GroupTable, Subgroup};
pub use gsp4::{
    a_size_gsp4, classify, component_group_so, i_group, lift_search, packet_size, std_of,
    valid_sims, validate_param, CaseLabel, ClassReport, Gsp4Param, LiftCandidate, ResidueChar,
};
pub use rules::{cross_validate, jh_lookup, predict_from_case};
pub use wd::{is_discrete_so, SelfDualType, WdRep, WdTerm};
