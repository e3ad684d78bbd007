use std::sync::Arc;

use num_complex::Complex;

use super::{BasisMap, Determinant};
use crate::{Error, Result, C64};

/// Amplitude vector over a [`BasisMap`]; represents the pure state `|Ψ⟩`.
#[derive(Clone, Debug)]
pub struct CiVector {
    basis: Arc<BasisMap>,
    amps: Vec<C64>,
}

impl CiVector {
    pub fn new(basis: Arc<BasisMap>, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != basis.len() {
            return Err(Error::domain(format!(
                "{} amplitudes for a basis of {} determinants",
                amps.len(),
                basis.len()
            )));
        }
        Ok(CiVector { basis, amps })
    }

    pub fn from_real(basis: Arc<BasisMap>, amps: &[f64]) -> Result<Self> {
        Self::new(basis, amps.iter().map(|&a| Complex::new(a, 0.0)).collect())
    }

    pub fn zeros(basis: Arc<BasisMap>) -> Self {
        let amps = vec![C64::default(); basis.len()];
        CiVector { basis, amps }
    }

    /// The normalized basis state `|det⟩`.
    pub fn basis_state(basis: Arc<BasisMap>, det: Determinant) -> Result<Self> {
        let idx = basis
            .index_of(det)
            .ok_or_else(|| Error::domain(format!("{det:?} is not in the basis")))?;
        let mut v = Self::zeros(basis);
        v.amps[idx] = Complex::new(1.0, 0.0);
        Ok(v)
    }

    /// Builds a vector from `(determinant, amplitude)` pairs; repeated determinants add up.
    pub fn from_terms(
        basis: Arc<BasisMap>,
        terms: impl IntoIterator<Item = (Determinant, C64)>,
    ) -> Result<Self> {
        let mut v = Self::zeros(basis);
        for (det, a) in terms {
            let idx = v
                .basis
                .index_of(det)
                .ok_or_else(|| Error::domain(format!("{det:?} is not in the basis")))?;
            v.amps[idx] += a;
        }
        Ok(v)
    }

    pub fn basis(&self) -> &Arc<BasisMap> {
        &self.basis
    }

    pub fn d(&self) -> usize {
        self.basis.d()
    }

    pub fn n_particles(&self) -> usize {
        self.basis.n_particles()
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn amplitude(&self, det: Determinant) -> C64 {
        self.basis
            .index_of(det)
            .map_or(C64::default(), |i| self.amps[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (Determinant, C64)> + '_ {
        self.basis.dets().iter().copied().zip(self.amps.iter().copied())
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &CiVector) -> Result<C64> {
        self.check_same_basis(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Rescales to unit norm. Fails on the zero vector.
    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::domain("cannot normalize a zero or non-finite vector"));
        }
        let inv = 1.0 / n;
        self.amps.iter_mut().for_each(|a| *a *= inv);
        Ok(())
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    /// Multiplies by a global phase so that the first amplitude with modulus above
    /// `1e-12` is real and positive.
    pub fn fix_phase(&mut self) {
        if let Some(a) = self.amps.iter().find(|a| a.norm() > 1e-12).copied() {
            let phase = a.conj() / a.norm();
            self.amps.iter_mut().for_each(|x| *x *= phase);
        }
    }

    pub fn scale(&mut self, s: C64) {
        self.amps.iter_mut().for_each(|x| *x *= s);
    }

    /// `self += s · other`.
    pub fn axpy(&mut self, s: C64, other: &CiVector) -> Result<()> {
        self.check_same_basis(other)?;
        self.amps
            .iter_mut()
            .zip(&other.amps)
            .for_each(|(a, b)| *a += s * b);
        Ok(())
    }

    /// Re-expresses the vector over a larger basis with the same `(d, N)`.
    pub fn embed(&self, target: Arc<BasisMap>) -> Result<CiVector> {
        if target.d() != self.d() || target.n_particles() != self.n_particles() {
            return Err(Error::domain("embedding needs the same mode and particle counts"));
        }
        CiVector::from_terms(target, self.iter())
    }

    /// Restricts to `target`, failing if weight above `tol` (squared modulus) would be dropped.
    pub fn restrict(&self, target: Arc<BasisMap>, tol: f64) -> Result<CiVector> {
        let mut out = CiVector::zeros(target);
        let mut dropped = 0.0;
        for (det, a) in self.iter() {
            match out.basis.index_of(det) {
                Some(i) => out.amps[i] = a,
                None => dropped += a.norm_sqr(),
            }
        }
        if dropped > tol {
            return Err(Error::domain(format!(
                "restriction would drop weight {dropped:.3e}"
            )));
        }
        Ok(out)
    }

    pub(crate) fn check_same_basis(&self, other: &CiVector) -> Result<()> {
        if Arc::ptr_eq(&self.basis, &other.basis) || self.basis.same_space(&other.basis) {
            Ok(())
        } else {
            Err(Error::domain("vectors live on different bases"))
        }
    }
}
