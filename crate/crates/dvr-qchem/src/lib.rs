//! Grid-based electronic structure for one-dimensional chain models.
//!
//! The single-particle basis is a discrete variable representation (DVR),
//! which makes every coordinate-dependent integral diagonal: the
//! electron-nuclear attraction is a vector, and the electron repulsion
//! collapses to the two-index kernel g_ik = v(|x_i - x_k|) of the screened
//! Coulomb interaction erf(r)/r. On top of those integrals the crate stacks
//!
//! * restricted Hartree-Fock ([`scf`]),
//! * active-space selection with frozen-core folding ([`active_space`]),
//! * CASCI by Slater-determinant enumeration ([`detci`]),
//! * CASCI by Jordan-Wigner mapping to a four-level spin chain ([`jwci`]),
//! * DMRG over the DVR sites with an electron-number penalty ([`dmrg`]).
//!
//! The determinant and spin-chain routes are exact-diagonalization
//! cross-checks for each other and for DMRG; `dvr-qchem selftest` runs that
//! triangle on small random instances.
//!
//! See the `examples/` directory for one runnable program per capability and
//! [`cli`] for the config-driven pipeline behind the `dvr-qchem` binary.

pub mod active_space;
pub mod cli;
pub mod detci;
pub mod dmrg;
pub mod dvr;
pub mod error;
pub mod jwci;
pub mod model;
pub mod numerics;
pub mod scf;

pub use error::{Error, Result};
