//! Correlation and entanglement measures. All entropies are in bits.

mod local;
mod report;

use crate::fock::CiVector;
use crate::rdm::{natural_orbitals, one_rdm};

pub use local::{
    correlation_function, mutual_information, orbital_reduced_state, parity_superselect,
    pure_bipartite_entanglement, reduced_state_ordered, CorrelationValue, LocalDensityMatrix,
    OrbitalSubset, MAX_LOCAL_MODES,
};
pub use report::{build_report, CorrelationReport};

/// `−x log₂ x`, with `0 log 0 = 0`.
fn eta(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// Binary entropy `b(x) = −x log₂ x − (1−x) log₂(1−x)`; `x` is clamped to `[0, 1]`.
pub fn binary_entropy(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    eta(x) + eta(1.0 - x)
}

/// `−Σ λ log₂ λ` over a spectrum, after clamping each value to `[0, 1]`.
pub fn von_neumann_entropy(spectrum: &[f64]) -> f64 {
    spectrum.iter().map(|&l| eta(l.clamp(0.0, 1.0))).sum()
}

/// `Σ_i b(λ_i)`: the relative entropy of a pure state to the closest free state.
pub fn nonfreeness_from_occupations(lambda: &[f64]) -> f64 {
    lambda.iter().map(|&l| binary_entropy(l)).sum()
}

/// Nonfreeness of a pure state, from its natural occupations.
pub fn nonfreeness(psi: &CiVector) -> f64 {
    nonfreeness_from_occupations(&natural_orbitals(&one_rdm(psi)).occupations)
}

/// Total orbital correlation `I_B = Σ_i b(γ_ii)` of a pure state in its current basis
/// (finest partition into single spin-orbitals).
pub fn total_orbital_correlation(psi: &CiVector) -> f64 {
    one_rdm(psi).diagonal().into_iter().map(binary_entropy).sum()
}

/// Shannon entropy of the squared CI coefficients; weights below `1e-16` count as zero.
pub fn ci_entropy(psi: &CiVector) -> f64 {
    psi.amplitudes()
        .iter()
        .map(|a| a.norm_sqr())
        .filter(|&w| w >= 1e-16)
        .map(eta)
        .sum()
}
