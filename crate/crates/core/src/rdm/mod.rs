//! Reduced density matrices, natural orbitals and free (quasi-free) states.
//!
//! Conventions: `γ_ij = ⟨f_j† f_i⟩` and `D[i][j][k][l] = ⟨f_l† f_k† f_i f_j⟩`.

mod free;
mod two;

use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::eig::hermitian_eigh;
use crate::fock::CiVector;
use crate::{par, Error, Result, C64};

pub use free::{free_state_occupation_weights, free_state_two_rdm, FreeState, FREE_ENUMERATION_MAX_MODES};
pub use two::{pair_count, pair_index, two_rdm, TwoRdm};

/// Occupations closer than this are treated as one degenerate cluster.
pub const DEGENERACY_TOL: f64 = 1e-9;

const VALIDATION_TOL: f64 = 1e-10;

/// One-particle reduced density matrix `γ` over spin-orbitals.
#[derive(Clone, Debug, PartialEq)]
pub struct OneRdm {
    gamma: DMatrix<C64>,
}

impl OneRdm {
    /// Wraps a matrix after checking it is Hermitian with spectrum in `[0, 1]` (tolerance `1e-10`).
    pub fn new(gamma: DMatrix<C64>) -> Result<Self> {
        if !gamma.is_square() {
            return Err(Error::domain("1RDM must be square"));
        }
        if (&gamma - gamma.adjoint()).camax() > VALIDATION_TOL {
            return Err(Error::domain("1RDM is not Hermitian"));
        }
        let (values, _) = hermitian_eigh(&gamma);
        if values
            .iter()
            .any(|&l| !(-VALIDATION_TOL..=1.0 + VALIDATION_TOL).contains(&l))
        {
            return Err(Error::domain("1RDM eigenvalues outside [0, 1]"));
        }
        Ok(OneRdm { gamma })
    }

    pub fn from_real(gamma: &DMatrix<f64>) -> Result<Self> {
        Self::new(gamma.map(|x| Complex::new(x, 0.0)))
    }

    pub fn d(&self) -> usize {
        self.gamma.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.gamma
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.gamma[(i, j)]
    }

    /// Particle number `Tr γ`.
    pub fn trace(&self) -> f64 {
        self.gamma.trace().re
    }

    /// Occupations `γ_ii` of the current basis.
    pub fn diagonal(&self) -> Vec<f64> {
        self.gamma.diagonal().iter().map(|z| z.re).collect()
    }

    /// `u† γ u`: the 1RDM in the basis whose modes are the columns of `u`.
    pub fn transformed(&self, u: &DMatrix<C64>) -> Result<OneRdm> {
        if u.nrows() != self.d() || u.ncols() != self.d() {
            return Err(Error::domain("rotation dimension does not match the 1RDM"));
        }
        Ok(OneRdm {
            gamma: u.adjoint() * &self.gamma * u,
        })
    }
}

/// `γ_ij = ⟨Ψ|f_j† f_i|Ψ⟩`.
pub fn one_rdm(psi: &CiVector) -> OneRdm {
    let basis = psi.basis();
    let d = psi.d();
    let amps = psi.amplitudes();
    // row i collects the terms where f_i removes a particle
    let rows = par::map_range(d, |i| {
        let mut row = vec![C64::default(); d];
        for (k, det) in basis.dets().iter().enumerate() {
            let a = amps[k];
            if a == C64::default() {
                continue;
            }
            let Some((removed, s1)) = det.annihilate(i) else {
                continue;
            };
            for j in 0..d {
                let Some((target, s2)) = removed.create(j) else {
                    continue;
                };
                if let Some(t) = basis.index_of(target) {
                    row[j] += amps[t].conj() * a * (s1 * s2);
                }
            }
        }
        row
    });
    let gamma = DMatrix::from_fn(d, d, |i, j| rows[i][j]);
    OneRdm {
        gamma: (&gamma + gamma.adjoint()) * Complex::new(0.5, 0.0),
    }
}

/// Eigen-decomposition `γ = U diag(λ) U†` with `λ` descending.
#[derive(Clone, Debug)]
pub struct NaturalOrbitals {
    /// Natural occupations clamped to `[0, 1]`, descending.
    pub occupations: Vec<f64>,
    /// Columns are the natural spin-orbitals in the reference basis.
    pub u: DMatrix<C64>,
    /// Whether two or more occupations coincide within [`DEGENERACY_TOL`].
    pub degenerate: bool,
}

impl NaturalOrbitals {
    pub fn d(&self) -> usize {
        self.occupations.len()
    }
}

/// Natural occupations and orbitals of `gamma`.
///
/// Within a degenerate cluster the eigenvectors are replaced by a canonical
/// orthonormal basis of the eigenspace: repeatedly project the unit vectors onto the
/// part of the eigenspace not yet covered, keep the one with the largest remainder
/// (lowest index on ties) and normalize it. This makes the result independent of the
/// eigensolver's internal choices and keeps spin-pure eigenspaces spin-pure. Each
/// vector's pivot component is real and positive.
pub fn natural_orbitals(gamma: &OneRdm) -> NaturalOrbitals {
    let d = gamma.d();
    let (mut values, vectors) = hermitian_eigh(gamma.matrix());
    values.reverse();
    let cols: Vec<usize> = (0..d).rev().collect();
    let mut u = DMatrix::<C64>::zeros(d, d);
    let mut degenerate = false;
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && values[end - 1] - values[end] < DEGENERACY_TOL {
            end += 1;
        }
        degenerate |= end - start > 1;
        let block = DMatrix::from_fn(d, end - start, |r, c| vectors[(r, cols[start + c])]);
        let canon = canonical_basis(&block);
        u.columns_mut(start, end - start).copy_from(&canon);
        start = end;
    }
    let occupations = values.iter().map(|l| l.clamp(0.0, 1.0)).collect();
    NaturalOrbitals {
        occupations,
        u,
        degenerate,
    }
}

/// Pivoted Gram-Schmidt on the columns of the projector onto `span(v)`.
fn canonical_basis(v: &DMatrix<C64>) -> DMatrix<C64> {
    let (d, m) = v.shape();
    let projector = v * v.adjoint();
    let mut chosen: Vec<nalgebra::DVector<C64>> = Vec::with_capacity(m);
    for _ in 0..m {
        let mut best: Option<(f64, nalgebra::DVector<C64>)> = None;
        for k in 0..d {
            let mut r = projector.column(k).into_owned();
            for q in &chosen {
                let c = q.dotc(&r);
                r -= q * c;
            }
            let n = r.norm();
            if best.as_ref().is_none_or(|(bn, _)| n > bn + 1e-10) {
                best = Some((n, r));
            }
        }
        let (n, r) = best.expect("d > 0");
        chosen.push(r / Complex::new(n, 0.0));
    }
    DMatrix::from_columns(&chosen)
}

/// Writes natural occupations as CSV with header `index,occupation`.
pub fn write_occupations_csv<W: Write>(occupations: &[f64], mut w: W) -> Result<()> {
    writeln!(w, "index,occupation")?;
    for (i, l) in occupations.iter().enumerate() {
        writeln!(w, "{i},{l:.15e}")?;
    }
    Ok(())
}
