use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex;

use super::MolecularIntegrals;
use crate::eig::HermitianOperator;
use crate::fock::{mode_spin, BasisMap, CiVector, Determinant, TwoBodyOperator};
use crate::{par, Error, Result, C64};

/// Second-quantized Hamiltonian on a determinant basis,
/// `H = Σ h_pq p†q + ¼ Σ ⟨pq||rs⟩ p†q†sr + E_core`, over interleaved spin-orbitals.
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    basis: Arc<BasisMap>,
    d: usize,
    h: Vec<f64>,
    /// Antisymmetrized `⟨pq||rs⟩ = ⟨pq|rs⟩ - ⟨pq|sr⟩`.
    anti: Vec<f64>,
    e_core: f64,
    diag: Vec<f64>,
}

/// Builds the Hamiltonian action of `ints` on `basis`.
///
/// The basis must hold `n_elec` particles on `2 · n_spatial` interleaved spin-orbitals.
pub fn hamiltonian_action(ints: &MolecularIntegrals, basis: Arc<BasisMap>) -> Result<Hamiltonian> {
    let n = ints.n_spatial();
    let d = 2 * n;
    if basis.d() != d {
        return Err(Error::domain(format!(
            "basis has {} modes, integrals need {d}",
            basis.d()
        )));
    }
    if basis.n_particles() != ints.n_elec() {
        return Err(Error::domain(format!(
            "basis holds {} particles, integrals declare {}",
            basis.n_particles(),
            ints.n_elec()
        )));
    }
    let mut h = vec![0.0; d * d];
    for p in 0..d {
        for q in 0..d {
            if mode_spin(p) == mode_spin(q) {
                h[p * d + q] = ints.h(p / 2, q / 2);
            }
        }
    }
    // ⟨pq|rs⟩ = (pr|qs) with spin conservation on each electron
    let phys = |p: usize, q: usize, r: usize, s: usize| {
        if mode_spin(p) == mode_spin(r) && mode_spin(q) == mode_spin(s) {
            ints.eri(p / 2, r / 2, q / 2, s / 2)
        } else {
            0.0
        }
    };
    let mut anti = vec![0.0; d * d * d * d];
    for p in 0..d {
        for q in 0..d {
            for r in 0..d {
                for s in 0..d {
                    anti[((p * d + q) * d + r) * d + s] = phys(p, q, r, s) - phys(p, q, s, r);
                }
            }
        }
    }
    let mut ham = Hamiltonian {
        basis,
        d,
        h,
        anti,
        e_core: ints.e_core(),
        diag: Vec::new(),
    };
    let diag = par::map_range(ham.basis.len(), |i| ham.diagonal_element(ham.basis.det(i)));
    ham.diag = diag;
    Ok(ham)
}

impl Hamiltonian {
    pub fn basis(&self) -> &Arc<BasisMap> {
        &self.basis
    }

    pub fn e_core(&self) -> f64 {
        self.e_core
    }

    #[inline]
    fn a(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let d = self.d;
        self.anti[((p * d + q) * d + r) * d + s]
    }

    fn diagonal_element(&self, det: Determinant) -> f64 {
        let occ: Vec<usize> = det.occupied().collect();
        let mut e = self.e_core;
        for (x, &p) in occ.iter().enumerate() {
            e += self.h[p * self.d + p];
            for &q in &occ[x + 1..] {
                e += self.a(p, q, p, q);
            }
        }
        e
    }

    /// `⟨i|H|x⟩` for the row determinant `i`, summing over its single and double
    /// excitations. Matrix elements are real, so `⟨i|H|j⟩ = ⟨j|H|i⟩`.
    fn row(&self, i: usize, x: &[C64]) -> C64 {
        let basis = &*self.basis;
        let d = self.d;
        let det = basis.det(i);
        let mut acc = x[i] * self.diag[i];
        for p in det.occupied() {
            let (removed, s1) = det.annihilate(p).expect("occupied");
            for a in det.empty(d) {
                if mode_spin(a) != mode_spin(p) {
                    continue;
                }
                let mut elem = self.h[a * d + p];
                for k in removed.occupied() {
                    elem += self.a(a, k, p, k);
                }
                if elem == 0.0 {
                    continue;
                }
                let (j_det, s2) = removed.create(a).expect("empty");
                if let Some(j) = basis.index_of(j_det) {
                    acc += x[j] * (elem * s1 * s2);
                }
            }
            for q in removed.occupied().filter(|&q| q > p) {
                let (two_removed, s2) = removed.annihilate(q).expect("occupied");
                let spin_sum = mode_spin(p) + mode_spin(q);
                for a in det.empty(d) {
                    for b in det.empty(d).filter(|&b| b > a) {
                        if mode_spin(a) + mode_spin(b) != spin_sum {
                            continue;
                        }
                        let elem = self.a(a, b, p, q);
                        if elem == 0.0 {
                            continue;
                        }
                        // |j⟩ = a† b† q p |i⟩: b is created before a
                        let (tmp, s4) = two_removed.create(b).expect("empty");
                        let (j_det, s5) = tmp.create(a).expect("empty");
                        if let Some(j) = basis.index_of(j_det) {
                            acc += x[j] * (elem * s1 * s2 * s4 * s5);
                        }
                    }
                }
            }
        }
        acc
    }

    /// `H|ψ⟩`, including the core energy.
    pub fn apply(&self, psi: &CiVector) -> Result<CiVector> {
        if !self.basis.same_space(psi.basis()) {
            return Err(Error::domain("state lives on a different sector than the Hamiltonian"));
        }
        let mut y = vec![C64::default(); psi.len()];
        self.apply_into(psi.amplitudes(), &mut y);
        CiVector::new(psi.basis().clone(), y)
    }

    pub fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        par::fill(y, |i| self.row(i, x));
    }

    /// `⟨ψ|H|ψ⟩` (real part).
    pub fn expectation(&self, psi: &CiVector) -> Result<f64> {
        Ok(psi.inner(&self.apply(psi)?)?.re)
    }

    pub fn diagonal_elements(&self) -> &[f64] {
        &self.diag
    }

    /// The same Hamiltonian as a generic one-body matrix and two-body operator
    /// (coefficients `¼ ⟨pq||rs⟩`), without the core energy.
    pub fn as_operators(&self) -> (DMatrix<C64>, TwoBodyOperator) {
        let d = self.d;
        let h = DMatrix::from_fn(d, d, |p, q| Complex::new(self.h[p * d + q], 0.0));
        let v = TwoBodyOperator::from_fn(d, |p, q, r, s| Complex::new(0.25 * self.a(p, q, r, s), 0.0));
        (h, v)
    }
}

impl HermitianOperator for Hamiltonian {
    fn dim(&self) -> usize {
        self.basis.len()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        self.apply_into(x, y);
    }

    fn diagonal(&self) -> Vec<f64> {
        self.diag.clone()
    }
}
