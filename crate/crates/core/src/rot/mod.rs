//! Orbital-basis changes of CI vectors, random bases, and minimization of the
//! total orbital correlation over bases.
//!
//! A [`BasisRotation`] `u` defines new modes `a_p† = Σ_q u_qp f_q†`: column `p` of `u`
//! holds mode `p` of the new basis expanded in the old one. Under this change the
//! 1RDM becomes `u† γ u` and two-electron coefficients become `u† c ū`.

mod apply;
mod minimize;
mod sample;

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result, C64};

pub use apply::{
    natural_basis_rotation, natural_ci_entropy, natural_form_state, rotate_state,
    rotate_two_electron_coeffs, two_electron_coeffs, two_electron_state,
};
pub use minimize::{minimize_total_correlation, minimize_total_correlation_from, MinimizeOptions, Minimization};
pub use sample::{
    orbital_correlation_in_basis, sample_bases, sample_rotation, BasisSample, SampleMode, SamplingOptions,
};

const UNITARITY_TOL: f64 = 1e-10;

/// One-particle basis change; see the module docs for the convention.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisRotation {
    u: DMatrix<C64>,
}

impl BasisRotation {
    /// Checks `u† u = 1` within `1e-10`.
    pub fn new(u: DMatrix<C64>) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::domain("rotation must be square"));
        }
        let n = u.nrows();
        let err = (u.adjoint() * &u - DMatrix::identity(n, n)).camax();
        if err > UNITARITY_TOL {
            return Err(Error::domain(format!("matrix is not unitary (deviation {err:.2e})")));
        }
        Ok(BasisRotation { u })
    }

    pub fn from_real(u: &DMatrix<f64>) -> Result<Self> {
        Self::new(u.map(|x| Complex::new(x, 0.0)))
    }

    pub fn identity(d: usize) -> Self {
        BasisRotation {
            u: DMatrix::identity(d, d),
        }
    }

    /// Spin-restricted rotation `u_spatial ⊗ 1_spin` on interleaved spin-orbitals.
    pub fn restricted(u_spatial: &DMatrix<C64>) -> Result<Self> {
        let k = u_spatial.nrows();
        let u = DMatrix::from_fn(2 * k, 2 * u_spatial.ncols(), |r, c| {
            if r % 2 == c % 2 {
                u_spatial[(r / 2, c / 2)]
            } else {
                C64::default()
            }
        });
        Self::new(u)
    }

    pub fn d(&self) -> usize {
        self.u.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.u
    }

    pub fn is_real(&self) -> bool {
        self.u.iter().all(|z| z.im == 0.0)
    }

    /// `self · other`: rotating by the product equals rotating by `self`, then by `other`.
    pub fn then(&self, other: &BasisRotation) -> Result<BasisRotation> {
        if self.d() != other.d() {
            return Err(Error::domain("rotations of different dimension"));
        }
        Ok(BasisRotation { u: &self.u * &other.u })
    }

    pub fn inverse(&self) -> BasisRotation {
        BasisRotation { u: self.u.adjoint() }
    }
}

fn gaussian_matrix<R: Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| rng.sample(StandardNormal))
}

/// Haar-distributed real orthogonal matrix drawn from `rng`.
pub fn haar_orthogonal_with<R: Rng>(dim: usize, rng: &mut R) -> DMatrix<f64> {
    let qr = gaussian_matrix(dim, rng).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Haar-distributed unitary matrix drawn from `rng`.
pub fn haar_unitary_with<R: Rng>(dim: usize, rng: &mut R) -> DMatrix<C64> {
    let re = gaussian_matrix(dim, rng);
    let im = gaussian_matrix(dim, rng);
    let z = DMatrix::from_fn(dim, dim, |i, j| Complex::new(re[(i, j)], im[(i, j)]));
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        let rjj = r[(j, j)];
        if rjj.norm() > 0.0 {
            let phase = rjj / rjj.norm();
            q.column_mut(j).iter_mut().for_each(|z| *z *= phase);
        }
    }
    q
}

/// `exp(A)` for an antisymmetric `A` with independent `N(0, scale²)` entries above the diagonal.
pub fn near_identity_orthogonal_with<R: Rng>(dim: usize, scale: f64, rng: &mut R) -> DMatrix<f64> {
    let mut a = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..dim {
        for j in i + 1..dim {
            let x: f64 = rng.sample(StandardNormal);
            a[(i, j)] = scale * x;
            a[(j, i)] = -scale * x;
        }
    }
    a.exp()
}

/// Haar-random orthogonal rotation, deterministic in `seed`.
pub fn haar_orthogonal(dim: usize, seed: u64) -> Result<BasisRotation> {
    if dim == 0 {
        return Err(Error::domain("dimension must be positive"));
    }
    BasisRotation::from_real(&haar_orthogonal_with(dim, &mut ChaCha8Rng::seed_from_u64(seed)))
}

/// Haar-random unitary rotation, deterministic in `seed`.
pub fn haar_unitary(dim: usize, seed: u64) -> Result<BasisRotation> {
    if dim == 0 {
        return Err(Error::domain("dimension must be positive"));
    }
    BasisRotation::new(haar_unitary_with(dim, &mut ChaCha8Rng::seed_from_u64(seed)))
}

/// Random orthogonal rotation concentrated around the identity, deterministic in `seed`.
pub fn near_identity_orthogonal(dim: usize, scale: f64, seed: u64) -> Result<BasisRotation> {
    if dim == 0 || !(scale > 0.0) {
        return Err(Error::domain("need dim ≥ 1 and scale > 0"));
    }
    BasisRotation::from_real(&near_identity_orthogonal_with(
        dim,
        scale,
        &mut ChaCha8Rng::seed_from_u64(seed),
    ))
}
