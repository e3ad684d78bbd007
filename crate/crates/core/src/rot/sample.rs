use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    haar_orthogonal_with, near_identity_orthogonal_with, rotate_state, rotate_two_electron_coeffs,
    two_electron_coeffs, BasisRotation,
};
use crate::corr::{binary_entropy, ci_entropy};
use crate::fock::CiVector;
use crate::rdm::{one_rdm, OneRdm};
use crate::{par, Error, Result};

/// Distribution of sampled rotations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SampleMode {
    /// Haar measure on the orthogonal group.
    Global,
    /// `exp(A)` for antisymmetric `A` with `N(0, scale²)` entries.
    NearIdentity { scale: f64 },
}

#[derive(Clone, Debug)]
pub struct SamplingOptions {
    pub n_samples: usize,
    pub seed: u64,
    pub mode: SampleMode,
    /// Rotate spatial orbitals (`u ⊗ 1_spin`) instead of spin-orbitals.
    pub restricted: bool,
    /// Also compute the CI entropy in each basis. For two particles this uses the
    /// coefficient-matrix transform; otherwise the full state is rotated.
    pub ci_entropy: bool,
}

/// Measures of one sampled basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasisSample {
    pub sample_id: usize,
    pub i_b_bits: f64,
    pub ci_entropy_bits: Option<f64>,
}

/// Rotation number `sample_id`: drawn from a ChaCha8 stream selected by `sample_id`
/// under `seed`, so each sample is reproducible on its own.
pub fn sample_rotation(d: usize, sample_id: usize, opts: &SamplingOptions) -> Result<BasisRotation> {
    if opts.restricted && d % 2 != 0 {
        return Err(Error::domain("spatial rotations need an even number of modes"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(sample_id as u64);
    let dim = if opts.restricted { d / 2 } else { d };
    let u = match opts.mode {
        SampleMode::Global => haar_orthogonal_with(dim, &mut rng),
        SampleMode::NearIdentity { scale } => {
            if !(scale > 0.0) {
                return Err(Error::domain("scale must be positive"));
            }
            near_identity_orthogonal_with(dim, scale, &mut rng)
        }
    };
    if opts.restricted {
        BasisRotation::restricted(&u.map(|x| x.into()))
    } else {
        BasisRotation::from_real(&u)
    }
}

/// `Σ_i b((u† γ u)_ii)`: the total orbital correlation in the basis of `rot`.
pub fn orbital_correlation_in_basis(gamma: &OneRdm, rot: &BasisRotation) -> Result<f64> {
    if gamma.d() != rot.d() {
        return Err(Error::domain("rotation and 1RDM differ in dimension"));
    }
    let u = rot.matrix();
    let g = gamma.matrix();
    let gu = g * u;
    Ok((0..u.ncols())
        .map(|i| binary_entropy(u.column(i).dotc(&gu.column(i)).re))
        .sum())
}

/// Evaluates `I_B` (and optionally the CI entropy) of `psi` in `n_samples` random
/// bases. Samples are independent and returned in id order, so results do not depend
/// on how the work is spread over threads.
pub fn sample_bases(psi: &CiVector, opts: &SamplingOptions) -> Result<Vec<BasisSample>> {
    let gamma = one_rdm(psi);
    let coeffs = if psi.n_particles() == 2 { Some(two_electron_coeffs(psi)?) } else { None };
    par::map_range(opts.n_samples, |id| {
        let rot = sample_rotation(psi.d(), id, opts)?;
        let i_b_bits = orbital_correlation_in_basis(&gamma, &rot)?;
        let ci_entropy_bits = if !opts.ci_entropy {
            None
        } else if let Some(c) = &coeffs {
            let r = rotate_two_electron_coeffs(c, &rot)?;
            let mut h = 0.0;
            for j in 0..r.nrows() {
                for k in j + 1..r.ncols() {
                    let w = r[(j, k)].norm_sqr();
                    if w >= 1e-16 {
                        h -= w * w.log2();
                    }
                }
            }
            Some(h)
        } else {
            Some(ci_entropy(&rotate_state(psi, &rot)?))
        };
        Ok(BasisSample {
            sample_id: id,
            i_b_bits,
            ci_entropy_bits,
        })
    })
    .into_iter()
    .collect()
}
