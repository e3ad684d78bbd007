use nalgebra::DMatrix;
use num_complex::Complex;

use super::BasisRotation;
use crate::corr::ci_entropy;
use crate::fock::{apply_one_body, enumerate_basis, mode_spin, CiVector, Determinant};
use crate::rdm::{natural_orbitals, one_rdm};
use crate::{Error, Result, C64};

const LOG_TOL: f64 = 1e-10;
const PERTURBATION: f64 = 1e-12;
const TERM_TOL: f64 = 1e-14;

/// Groups indices connected through nonzero entries of `u`.
fn connected_blocks(u: &DMatrix<C64>) -> Vec<Vec<usize>> {
    let n = u.nrows();
    let mut label: Vec<Option<usize>> = vec![None; n];
    let mut blocks = Vec::new();
    for start in 0..n {
        if label[start].is_some() {
            continue;
        }
        let id = blocks.len();
        let mut members = vec![start];
        label[start] = Some(id);
        let mut head = 0;
        while head < members.len() {
            let i = members[head];
            head += 1;
            for j in 0..n {
                if label[j].is_none() && (u[(i, j)].norm() > 0.0 || u[(j, i)].norm() > 0.0) {
                    label[j] = Some(id);
                    members.push(j);
                }
            }
        }
        members.sort_unstable();
        blocks.push(members);
    }
    blocks
}

/// Anti-Hermitian `κ` with `exp(κ) = u` from the Schur form of the unitary `u`.
fn schur_log(u: &DMatrix<C64>) -> Option<DMatrix<C64>> {
    let n = u.nrows();
    if n == 1 {
        return Some(DMatrix::from_element(1, 1, Complex::new(0.0, u[(0, 0)].arg())));
    }
    let (q, t) = u.clone().try_schur(f64::EPSILON, 10_000)?.unpack();
    let log_t = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex::new(0.0, t[(i, i)].arg())
        } else {
            C64::default()
        }
    });
    let k = &q * log_t * q.adjoint();
    let mut k = (&k - k.adjoint()) * Complex::new(0.5, 0.0);
    let is_real = u.iter().all(|z| z.im == 0.0);
    if is_real {
        // prefer a real generator whenever one reproduces u
        let real = k.map(|z| Complex::new(z.re, 0.0));
        if (real.exp() - u).camax() <= LOG_TOL {
            k = real;
        }
    }
    ((k.exp() - u).camax() <= LOG_TOL).then_some(k)
}

/// Principal logarithm of a unitary matrix, block by block so that zero couplings
/// of `u` stay zero in the generator. A block whose logarithm cannot be verified is
/// retried once after composing it with a rotation of angle `1e-12`.
fn unitary_log(u: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let n = u.nrows();
    let mut kappa = DMatrix::<C64>::zeros(n, n);
    for block in connected_blocks(u) {
        let m = block.len();
        let sub = DMatrix::from_fn(m, m, |i, j| u[(block[i], block[j])]);
        let k = match schur_log(&sub) {
            Some(k) => k,
            None if m >= 2 => {
                let mut g = DMatrix::<C64>::zeros(m, m);
                g[(0, 1)] = Complex::new(PERTURBATION, 0.0);
                g[(1, 0)] = Complex::new(-PERTURBATION, 0.0);
                schur_log(&(&sub * g.exp())).ok_or_else(|| {
                    Error::Numerical("matrix logarithm of the rotation failed after perturbation".into())
                })?
            }
            None => return Err(Error::Numerical("matrix logarithm of the rotation failed".into())),
        };
        for (i, &bi) in block.iter().enumerate() {
            for (j, &bj) in block.iter().enumerate() {
                kappa[(bi, bj)] = k[(i, j)];
            }
        }
    }
    Ok(kappa)
}

/// `Σ_k A^k x / k!` summed until a term's norm drops below `1e-14`.
fn taylor_exp_action(x: CiVector, a: &DMatrix<C64>) -> Result<CiVector> {
    let mut sum = x.clone();
    let mut term = x;
    for k in 1..=80 {
        term = apply_one_body(&term, a)?;
        term.scale(Complex::new(1.0 / k as f64, 0.0));
        sum.axpy(Complex::new(1.0, 0.0), &term)?;
        if term.norm() < TERM_TOL {
            return Ok(sum);
        }
    }
    Err(Error::Numerical("Taylor series of the rotation did not converge".into()))
}

/// Expresses `psi` in the basis defined by `rot`: the result holds the amplitudes
/// of `|Ψ⟩` on determinants of the new modes `a_p† = Σ_q u_qp f_q†`.
///
/// Writing `u = exp(κ)`, the new amplitudes are `exp(−κ̂) c` with `κ̂ = Σ κ_pq f_p† f_q`,
/// evaluated by scaling and squaring of a Taylor series. A real `u` with determinant
/// −1 is split into a proper rotation followed by the reflection of mode 0. If `κ`
/// couples opposite spins and `psi` lives in a fixed-Sz sector, the result is
/// returned on the full N-particle basis.
///
/// Rotations compose: rotating by `u₁ u₂` equals rotating by `u₁`, then by `u₂`.
pub fn rotate_state(psi: &CiVector, rot: &BasisRotation) -> Result<CiVector> {
    let d = psi.d();
    if rot.d() != d {
        return Err(Error::domain(format!("rotation has dimension {}, state has {d} modes", rot.d())));
    }
    let mut u = rot.matrix().clone();
    let mut reflect = false;
    if rot.is_real() && u.map(|z| z.re).determinant() < 0.0 {
        u.column_mut(0).neg_mut();
        reflect = true;
    }
    let mut kappa = unitary_log(&u)?;
    kappa.iter_mut().filter(|z| z.norm() <= 1e-15).for_each(|z| *z = C64::default());
    let mixes_spin = (0..d).any(|p| (0..d).any(|q| mode_spin(p) != mode_spin(q) && kappa[(p, q)] != C64::default()));

    let mut v = if mixes_spin && psi.basis().sz_twice().is_some() {
        psi.embed(enumerate_basis(d, psi.n_particles(), None)?)?
    } else {
        psi.clone()
    };
    let norm0 = v.norm();
    let size = psi.n_particles().max(1) as f64 * kappa.norm();
    let squarings = if size <= 0.5 { 0 } else { (size / 0.5).log2().ceil() as u32 };
    let steps = 1usize << squarings;
    let generator = kappa * Complex::new(-1.0 / steps as f64, 0.0);
    if size > 0.0 {
        for _ in 0..steps {
            v = taylor_exp_action(v, &generator)?;
        }
    }
    let norm1 = v.norm();
    if (norm1 - norm0).abs() > 1e-10 * norm0.max(1.0) {
        return Err(Error::Numerical(format!("rotation changed the norm from {norm0} to {norm1}")));
    }
    if norm1 > 0.0 {
        v.scale(Complex::new(norm0 / norm1, 0.0));
    }
    if reflect {
        let basis = v.basis().clone();
        for (i, a) in v.amplitudes_mut().iter_mut().enumerate() {
            if basis.det(i).is_occupied(0) {
                *a = -*a;
            }
        }
    }
    Ok(v)
}

/// Antisymmetric coefficient matrix of a two-particle state,
/// `|Ψ⟩ = Σ_{j<k} c_jk f_j† f_k† |0⟩`.
pub fn two_electron_coeffs(psi: &CiVector) -> Result<DMatrix<C64>> {
    if psi.n_particles() != 2 {
        return Err(Error::domain("coefficient matrix needs exactly two particles"));
    }
    let d = psi.d();
    let mut c = DMatrix::<C64>::zeros(d, d);
    for (det, a) in psi.iter() {
        let mut occ = det.occupied();
        let (j, k) = (occ.next().expect("two modes"), occ.next().expect("two modes"));
        c[(j, k)] = a;
        c[(k, j)] = -a;
    }
    Ok(c)
}

fn check_antisymmetric(c: &DMatrix<C64>) -> Result<()> {
    if !c.is_square() || (c + c.transpose()).camax() > 1e-12 {
        return Err(Error::domain("coefficient matrix must be square and antisymmetric"));
    }
    Ok(())
}

/// Two-particle state on the full two-particle basis from an antisymmetric `c`.
pub fn two_electron_state(c: &DMatrix<C64>) -> Result<CiVector> {
    check_antisymmetric(c)?;
    let basis = enumerate_basis(c.nrows(), 2, None)?;
    let amps = basis
        .dets()
        .iter()
        .map(|det| {
            let mut occ = det.occupied();
            c[(occ.next().expect("two modes"), occ.next().expect("two modes"))]
        })
        .collect();
    CiVector::new(basis, amps)
}

/// `c' = u† c ū`: coefficients of the same two-particle state in the rotated basis.
pub fn rotate_two_electron_coeffs(c: &DMatrix<C64>, rot: &BasisRotation) -> Result<DMatrix<C64>> {
    check_antisymmetric(c)?;
    if rot.d() != c.nrows() {
        return Err(Error::domain("rotation and coefficient matrix differ in dimension"));
    }
    let u = rot.matrix();
    let r = u.adjoint() * c * u.map(|z| z.conj());
    Ok((&r - r.transpose()) * Complex::new(0.5, 0.0))
}

/// `Σ_i p_i f_{2i}† f_{2i+1}† |0⟩` on `2K` modes (normalized), the natural form of a
/// two-electron singlet-like state.
pub fn natural_form_state(p: &[f64]) -> Result<CiVector> {
    let basis = enumerate_basis(2 * p.len(), 2, Some(0))?;
    let terms = p
        .iter()
        .enumerate()
        .map(|(i, &x)| (Determinant::from_modes(&[2 * i, 2 * i + 1]), Complex::new(x, 0.0)));
    CiVector::from_terms(basis, terms)?.normalized()
}

/// Rotation to the natural spin-orbitals of `psi`, and whether any occupations are degenerate.
pub fn natural_basis_rotation(psi: &CiVector) -> Result<(BasisRotation, bool)> {
    let no = natural_orbitals(&one_rdm(psi));
    Ok((BasisRotation::new(no.u)?, no.degenerate))
}

/// CI entropy of `psi` in its natural basis.
///
/// For two particles the natural spin-orbitals come in pairs with equal occupation and
/// the state is `Σ_i z_i a_{2i}† a_{2i+1}† |0⟩` with `|z_i|² = λ_{2i}`; the entropy is
/// taken from those weights so that degenerate pairs cannot blur the pairing. For
/// other particle numbers the state is rotated to the natural basis.
pub fn natural_ci_entropy(psi: &CiVector) -> Result<f64> {
    if psi.n_particles() == 2 {
        let no = natural_orbitals(&one_rdm(psi));
        return Ok(no
            .occupations
            .iter()
            .step_by(2)
            .filter(|&&w| w >= 1e-16)
            .map(|&w| -w * w.log2())
            .sum());
    }
    let (rot, _) = natural_basis_rotation(psi)?;
    Ok(ci_entropy(&rotate_state(psi, &rot)?))
}
