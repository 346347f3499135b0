//! Exact computations with Bieberbach groups in lattice coordinates.
//!
//! A compact flat manifold is represented by its fundamental group `Π` acting
//! on `Q^n ⊂ R^n`, with translation lattice `L = Z^n`, a rational Gram matrix,
//! a finite holonomy group of unimodular integer matrices and a vector system
//! of translational parts modulo `Z^n`. On top of that representation the
//! crate provides:
//!
//! - [`lattice`]: saturation, sums, meets, quotients and orthogonal complements
//!   of sublattices (rational subspaces spanned by lattice vectors);
//! - [`invariant`]: finite matrix groups, holonomy-invariant subspaces,
//!   averaged invariant complements and a reducibility search;
//! - [`bieberbach`]: validation of `(Gram, holonomy, vector system)` data;
//! - [`foliation`]: generic isotropy, leaf groups, coset stabilizers and the
//!   leaf-space orbifold of the foliation by cosets of an invariant subspace;
//! - [`intersect`]: intersection counts of complementary generic leaves, with
//!   brute-force geometric oracles;
//! - [`corpus`]: generalized Klein bottles, regular-representation fixtures
//!   and tori;
//! - [`codec`]: the JSON documents and reports used by the command-line tool.

pub mod bieberbach;
pub mod codec;
pub mod corpus;
pub mod error;
pub mod exactlin;
pub mod foliation;
pub mod intersect;
pub mod invariant;
pub mod lattice;

pub use error::{Error, Result};
