//! Power-law-exponential (PLE) interactions mediated by two-band chiral
//! lattices, and ground states of the long-range spin chains they induce.
//!
//! The crate is organised bottom-up:
//! - [`lattice`]: Bloch Hamiltonians, characteristic polynomials, winding, gap.
//! - [`interaction`]: zeros, closed-form profiles, kernels, 2D solvable model.
//! - [`boundstate`]: finite lattices with emitters, dressed states, disorder.
//! - [`ising`]: classical long-range Ising ground states and periods.
//! - [`spinwave`]: magnon dispersions and ferromagnetic boundaries.
//! - [`xxz_ed`]: sector exact diagonalization of the long-range XXZ chain.
//! - [`dmrg`]: MPO compilation of exponential-polynomial kernels and two-site DMRG.
//! - [`observables`]: structure factor, entropy fits and decay exponents shared by ED and DMRG.
//! - [`circuit`]: element values of an LC array to hopping strengths.

pub mod boundstate;
pub mod circuit;
pub mod dmrg;
pub mod error;
pub mod exec;
pub mod interaction;
pub mod ising;
pub mod lanczos;
pub mod lattice;
pub mod observables;
pub mod poly;
pub mod spinwave;
pub mod xxz_ed;

pub use error::{Error, Result};
pub use exec::Exec;

pub type C64 = num_complex::Complex64;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
