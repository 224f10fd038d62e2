//! Exact-arithmetic models of del Pezzo surfaces over arbitrary fields,
//! seen through their Picard lattice and a Galois action on it.
//!
//! The library builds the lattice `Pic` of a del Pezzo surface over the
//! separable closure, enumerates its distinguished classes ((-1)-curves,
//! conics, roots), generates the lattice symmetry group `W`, represents a
//! Galois image as a finite subgroup of `W`, and decides descent and
//! invariant statements mechanically: Picard rank, first group cohomology
//! of the lattice, blow-down descent flags, and Amitsur-group constraints.

pub mod classes;
pub mod classifier;
pub mod cohomology;
pub mod error;
pub mod group;
pub mod intlin;
pub mod lattice;
pub mod pencil;
pub mod subgroups;
pub mod weyl;

pub use error::{Error, Result};
pub use lattice::{DivClass, Kind, PicLattice};
