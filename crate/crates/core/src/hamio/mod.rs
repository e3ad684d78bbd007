//! Hamiltonian ingestion and construction.

mod fcidump;
mod hamiltonian;
mod integrals;

pub use fcidump::{parse_fcidump, write_fcidump};
pub use hamiltonian::{hamiltonian_action, Hamiltonian};
pub use integrals::{build_hubbard, MolecularIntegrals};
