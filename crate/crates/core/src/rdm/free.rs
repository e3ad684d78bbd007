use nalgebra::DMatrix;

use super::{natural_orbitals, pair_count, pair_index, OneRdm, TwoRdm};
use crate::fock::Determinant;
use crate::{Error, Result, C64};

/// Largest mode count for which [`FreeState::configuration_weights`] enumerates `2^d` configurations.
pub const FREE_ENUMERATION_MAX_MODES: usize = 20;

/// Free (quasi-free, number-conserving) state held spectrally: natural orbitals and
/// their occupations. It is the Gibbs state of `Σ ε_i a_i† a_i` with
/// `λ_i = 1 / (1 + exp ε_i)`.
#[derive(Clone, Debug)]
pub struct FreeState {
    natural_basis: DMatrix<C64>,
    occupations: Vec<f64>,
}

impl FreeState {
    /// The unique free state whose 1RDM is `gamma`.
    pub fn from_one_rdm(gamma: &OneRdm) -> Self {
        let no = natural_orbitals(gamma);
        FreeState {
            natural_basis: no.u,
            occupations: no.occupations,
        }
    }

    pub fn d(&self) -> usize {
        self.occupations.len()
    }

    pub fn natural_basis(&self) -> &DMatrix<C64> {
        &self.natural_basis
    }

    pub fn occupations(&self) -> &[f64] {
        &self.occupations
    }

    /// Mode energies `ε_i = ln((1 − λ_i)/λ_i)`; infinite for sharp occupations.
    pub fn mode_energies(&self) -> Vec<f64> {
        self.occupations.iter().map(|&l| ((1.0 - l) / l).ln()).collect()
    }

    /// `U diag(λ) U†`.
    pub fn one_rdm(&self) -> OneRdm {
        let lam = DMatrix::from_fn(self.d(), self.d(), |i, j| {
            if i == j {
                C64::new(self.occupations[i], 0.0)
            } else {
                C64::default()
            }
        });
        let gamma = &self.natural_basis * lam * self.natural_basis.adjoint();
        OneRdm { gamma }
    }

    /// Weights of all `2^d` natural-basis configurations, indexed by packed occupation.
    pub fn configuration_weights(&self) -> Result<Vec<f64>> {
        let d = self.d();
        if d > FREE_ENUMERATION_MAX_MODES {
            return Err(Error::Refused(format!(
                "enumerating 2^{d} configurations; use the spectral formulas for d > {FREE_ENUMERATION_MAX_MODES}"
            )));
        }
        free_state_occupation_weights(&self.occupations, (0..1u64 << d).map(Determinant::from_bits))
    }
}

/// `Π_i λ_i^{n_i} (1 − λ_i)^{1 − n_i}` for each configuration `n`.
pub fn free_state_occupation_weights(
    lambda: &[f64],
    configs: impl IntoIterator<Item = Determinant>,
) -> Result<Vec<f64>> {
    if lambda.iter().any(|l| !(0.0..=1.0).contains(l)) {
        return Err(Error::domain("occupations must lie in [0, 1]"));
    }
    let d = lambda.len();
    configs
        .into_iter()
        .map(|n| {
            if d < 64 && n.bits() >> d != 0 {
                return Err(Error::domain(format!("{n:?} has modes beyond {d}")));
            }
            Ok(lambda
                .iter()
                .enumerate()
                .map(|(i, &l)| if n.is_occupied(i) { l } else { 1.0 - l })
                .product())
        })
        .collect()
}

/// Wick factorization `D[i][j][k][l] = γ_ik γ_jl − γ_il γ_jk`: the 2RDM of the free state with 1RDM `γ`.
pub fn free_state_two_rdm(gamma: &OneRdm) -> TwoRdm {
    let d = gamma.d();
    let g = gamma.matrix();
    let n = pair_count(d);
    let mut pairs = DMatrix::<C64>::zeros(n, n);
    for i in 0..d {
        for j in i + 1..d {
            let row = pair_index(i, j, d);
            for k in 0..d {
                for l in k + 1..d {
                    pairs[(row, pair_index(k, l, d))] = g[(i, k)] * g[(j, l)] - g[(i, l)] * g[(j, k)];
                }
            }
        }
    }
    TwoRdm { d, pairs }
}
