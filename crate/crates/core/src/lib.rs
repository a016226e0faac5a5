//! Executable finite models for first-order definability in matrix groups.
//!
//! The crate encodes a ring inside PSL_n over it, model-checks first-order
//! sentences over enumerated finite groups, measures growth of products of
//! conjugacy classes, and runs orbit experiments for orthogonal groups of
//! quadratic forms over prime fields.

pub mod elementset;
pub mod error;
pub mod folcheck;
pub mod gclsets;
pub mod interpretation;
pub mod matgroups;
pub mod quadforms;
pub mod rings;
pub mod scalar;
pub mod suite;
pub mod wordwidth;

pub use elementset::ElementSet;
pub use error::{Error, Result};
pub use matgroups::{GroupSpec, GroupTable, Mat, ProjMat};
pub use rings::{IdealSpec, RingElem, RingSpec};
pub use scalar::Scalar;

/// Matrices over the integers.
pub type IntMat = Mat<num_bigint::BigInt>;
/// Matrices over residue rings with machine-word entries.
pub type Mat64 = Mat<i64>;
pub type IntProjMat = ProjMat<num_bigint::BigInt>;
pub type ProjMat64 = ProjMat<i64>;
