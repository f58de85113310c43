//! Unextendible maximally entangled bases (UMEBs) of `C^d ⊗ C^d`.
//!
//! A maximally entangled state `(I ⊗ U) Σ_i |i⟩|i⟩/√d` is identified with the
//! unitary `U`, and orthogonality of states with `Tr(U_a† U_b) = 0`. A UMEB
//! is then a set of fewer than d² pairwise trace-orthogonal unitaries whose
//! orthogonal complement contains no unitary.
//!
//! - [`constructions`]: Weyl operators, the Bravyi–Smolin set in d = 3, the
//!   30-member set in d = 6 and the lift from d to qd.
//! - [`verification`]: axiom checks, a nuclear-norm extension search and a
//!   structural certificate for lifted sets.
//! - [`spectral`]: eigenphase-order signatures that separate inequivalent
//!   sets.
//! - [`matrix_set`], [`report`]: file formats.

pub mod cli;
pub mod constructions;
pub mod error;
pub mod linalg;
pub mod matrix_set;
pub mod report;
pub mod spectral;
pub mod verification;

pub use constructions::{bravyi_smolin_3, lift, umeb_6, weyl, weyl_family, Provenance, UmebCandidate};
pub use error::{Result, UmebError};
pub use linalg::{Complex, ComplexMatrix, Tolerances};
