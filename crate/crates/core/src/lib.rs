//! Finite lattices, their congruence lattices, distributive join-semilattices
//! and the uniform refinement property, congruence splitting, and the ideal
//! lattices of small regular rings.

pub mod campaign;
pub mod congruence;
pub mod enumerate;
pub mod lattice;
pub mod ring;
pub mod semilattice;
pub mod splitting;
pub mod urp;

pub use congruence::{con_lattice, Congruence, CongruenceLattice};
pub use enumerate::{canonical_form, enumerate_lattices, CanonicalCode};
pub use lattice::{FiniteLattice, LatticeError, LatticeFile};
pub use semilattice::{FiniteJoinSemilattice, SemilatticeHom};
pub use urp::{UrpInstance, UrpWitness};
