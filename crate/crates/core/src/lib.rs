//! Correlation and entanglement measures for fermionic wave functions.
//!
//! The crate is organized bottom-up:
//!
//! * [`fock`]: determinants, fixed-(N, Sz) bases, ladder operators and CI vectors.
//! * [`hamio`]: FCIDUMP ingestion, the Hubbard model and the Hamiltonian action.
//! * [`eig`]: dense and Davidson lowest-eigenpair solvers.
//! * [`rdm`]: one- and two-particle reduced density matrices, natural orbitals, free states.
//! * [`corr`]: entropies, nonfreeness, orbital correlation, superselection, mutual information.
//! * [`rot`]: orbital rotations of CI vectors, Haar sampling and orbital-correlation minimization.
//!
//! Spin-orbitals are interleaved: mode `2k` is spatial orbital `k` with spin up and
//! mode `2k + 1` the same orbital with spin down. Mode 0 is the least significant bit
//! of a [`fock::Determinant`] and the first creation operator in the normal order
//! `|n⟩ = (f₀†)^n₀ (f₁†)^n₁ … |0⟩`. All entropies are in bits.

pub mod corr;
pub mod eig;
mod error;
pub mod fock;
pub mod hamio;
pub mod par;
pub mod rdm;
pub mod rot;

pub use error::{Error, Result};

/// Complex amplitude type used throughout.
pub type C64 = num_complex::Complex<f64>;
