use nalgebra::DMatrix;

use super::{mode_spin, CiVector};
use crate::{par, Error, Result, C64};

const COUPLING_TOL: f64 = 1e-12;

/// General two-body operator `Σ_{pqrs} V[p,q,r,s] f_p† f_q† f_s f_r` with a dense
/// row-major coefficient tensor.
#[derive(Clone, Debug)]
pub struct TwoBodyOperator {
    d: usize,
    coeffs: Vec<C64>,
}

impl TwoBodyOperator {
    pub fn zeros(d: usize) -> Self {
        TwoBodyOperator {
            d,
            coeffs: vec![C64::default(); d * d * d * d],
        }
    }

    pub fn from_fn(d: usize, mut f: impl FnMut(usize, usize, usize, usize) -> C64) -> Self {
        let mut op = Self::zeros(d);
        for p in 0..d {
            for q in 0..d {
                for r in 0..d {
                    for s in 0..d {
                        op.coeffs[((p * d + q) * d + r) * d + s] = f(p, q, r, s);
                    }
                }
            }
        }
        op
    }

    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn get(&self, p: usize, q: usize, r: usize, s: usize) -> C64 {
        self.coeffs[((p * self.d + q) * self.d + r) * self.d + s]
    }

    pub fn set(&mut self, p: usize, q: usize, r: usize, s: usize, v: C64) {
        let d = self.d;
        self.coeffs[((p * d + q) * d + r) * d + s] = v;
    }

    fn conserves_spin(&self) -> bool {
        let d = self.d;
        (0..d * d * d * d).all(|idx| {
            let (s, r, q, p) = (idx % d, (idx / d) % d, (idx / (d * d)) % d, idx / (d * d * d));
            self.coeffs[idx].norm() <= COUPLING_TOL
                || mode_spin(p) + mode_spin(q) == mode_spin(r) + mode_spin(s)
        })
    }
}

/// `Σ_ij h_ij f_i† f_j |ψ⟩` (unnormalized).
///
/// On a spin-restricted basis `h` must not couple opposite spins.
pub fn apply_one_body(psi: &CiVector, h: &DMatrix<C64>) -> Result<CiVector> {
    let d = psi.d();
    if h.nrows() != d || h.ncols() != d {
        return Err(Error::domain(format!(
            "one-body matrix is {}x{}, expected {d}x{d}",
            h.nrows(),
            h.ncols()
        )));
    }
    let basis = psi.basis();
    if basis.sz_twice().is_some() {
        for p in 0..d {
            for q in 0..d {
                if mode_spin(p) != mode_spin(q) && h[(p, q)].norm() > COUPLING_TOL {
                    return Err(Error::domain(
                        "one-body operator couples spins on a spin-restricted basis",
                    ));
                }
            }
        }
    }
    let x = psi.amplitudes();
    let mut y = vec![C64::default(); x.len()];
    // Gather form: y_i = Σ_pq h_pq ⟨i| p† q |j⟩ x_j, where the matrix element is the
    // real sign of q† p acting on |i⟩.
    par::fill(&mut y, |i| {
        let det = basis.det(i);
        let mut acc = C64::default();
        for p in det.occupied() {
            let (removed, s1) = det.annihilate(p).expect("occupied");
            for q in 0..d {
                let coeff = h[(p, q)];
                if coeff.norm_sqr() == 0.0 {
                    continue;
                }
                if let Some((j_det, s2)) = removed.create(q) {
                    if let Some(j) = basis.index_of(j_det) {
                        acc += coeff * (s1 * s2) * x[j];
                    }
                }
            }
        }
        acc
    });
    CiVector::new(basis.clone(), y)
}

/// Action of a [`TwoBodyOperator`] on `|ψ⟩` (unnormalized).
pub fn apply_two_body(psi: &CiVector, v: &TwoBodyOperator) -> Result<CiVector> {
    let d = psi.d();
    if v.d() != d {
        return Err(Error::domain(format!(
            "two-body operator on {} modes applied to a {d}-mode state",
            v.d()
        )));
    }
    let basis = psi.basis();
    if basis.sz_twice().is_some() && !v.conserves_spin() {
        return Err(Error::domain(
            "two-body operator violates spin conservation on a spin-restricted basis",
        ));
    }
    let x = psi.amplitudes();
    let mut y = vec![C64::default(); x.len()];
    // ⟨i| p† q† s r |j⟩ = sign of r† s† q p acting on |i⟩.
    par::fill(&mut y, |i| {
        let det = basis.det(i);
        let mut acc = C64::default();
        for p in det.occupied() {
            let (a, s1) = det.annihilate(p).expect("occupied");
            for q in a.occupied() {
                let (b, s2) = a.annihilate(q).expect("occupied");
                for s in b.empty(d) {
                    let (c, s3) = b.create(s).expect("empty");
                    for r in c.empty(d) {
                        let coeff = v.get(p, q, r, s);
                        if coeff.norm_sqr() == 0.0 {
                            continue;
                        }
                        let (j_det, s4) = c.create(r).expect("empty");
                        if let Some(j) = basis.index_of(j_det) {
                            acc += coeff * (s1 * s2 * s3 * s4) * x[j];
                        }
                    }
                }
            }
        }
        acc
    });
    CiVector::new(basis.clone(), y)
}
