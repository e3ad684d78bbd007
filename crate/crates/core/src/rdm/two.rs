use nalgebra::DMatrix;
use num_complex::Complex;

use crate::fock::CiVector;
use crate::{par, Error, Result, C64};

/// Number of ordered pairs `i < j` among `d` modes.
pub const fn pair_count(d: usize) -> usize {
    d * d.saturating_sub(1) / 2
}

/// Position of the pair `i < j` in lexicographic order.
pub const fn pair_index(i: usize, j: usize, d: usize) -> usize {
    i * (2 * d - i - 1) / 2 + (j - i - 1)
}

/// Two-particle reduced density matrix stored over ordered pairs:
/// `pairs[(ij), (kl)] = D[i][j][k][l]` for `i < j`, `k < l`.
/// Other index orders follow from antisymmetry.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoRdm {
    pub(super) d: usize,
    pub(super) pairs: DMatrix<C64>,
}

impl TwoRdm {
    pub fn from_pair_matrix(d: usize, pairs: DMatrix<C64>) -> Result<Self> {
        let n = pair_count(d);
        if pairs.shape() != (n, n) {
            return Err(Error::domain(format!("pair matrix must be {n}×{n} for {d} modes")));
        }
        Ok(TwoRdm { d, pairs })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn pair_matrix(&self) -> &DMatrix<C64> {
        &self.pairs
    }

    /// `D[i][j][k][l] = ⟨f_l† f_k† f_i f_j⟩` for any index order.
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> C64 {
        if i == j || k == l {
            return C64::default();
        }
        let (a, b, s1) = if i < j { (i, j, 1.0) } else { (j, i, -1.0) };
        let (c, e, s2) = if k < l { (k, l, 1.0) } else { (l, k, -1.0) };
        self.pairs[(pair_index(a, b, self.d), pair_index(c, e, self.d))] * (s1 * s2)
    }

    /// `Σ_{i<j} D[i][j][i][j] = N(N−1)/2`.
    pub fn pair_trace(&self) -> f64 {
        self.pairs.trace().re
    }

    /// `Σ_k D[i][k][j][k]`, equal to `(N−1) γ_ij`.
    pub fn contract(&self) -> DMatrix<C64> {
        let d = self.d;
        DMatrix::from_fn(d, d, |i, j| (0..d).map(|k| self.get(i, k, j, k)).sum())
    }

    /// Frobenius distance of the pair matrices.
    pub fn distance(&self, other: &TwoRdm) -> Result<f64> {
        if self.d != other.d {
            return Err(Error::domain("2RDMs over different mode counts"));
        }
        Ok((&self.pairs - &other.pairs).norm())
    }
}

/// `D[i][j][k][l] = ⟨Ψ| f_l† f_k† f_i f_j |Ψ⟩`, assembled row by row over pairs `(ij)`.
pub fn two_rdm(psi: &CiVector) -> TwoRdm {
    let d = psi.d();
    let basis = psi.basis();
    let amps = psi.amplitudes();
    let n = pair_count(d);
    let mut index = Vec::with_capacity(n);
    for i in 0..d {
        for j in i + 1..d {
            index.push((i, j));
        }
    }
    let rows = par::map_range(n, |row| {
        let (i, j) = index[row];
        let mut out = vec![C64::default(); n];
        for (t, det) in basis.dets().iter().enumerate() {
            let a = amps[t];
            if a == C64::default() {
                continue;
            }
            // f_i f_j |det⟩: f_j acts first
            let Some((x, s1)) = det.annihilate(j) else {
                continue;
            };
            let Some((r, s2)) = x.annihilate(i) else {
                continue;
            };
            for (col, &(k, l)) in index.iter().enumerate() {
                // f_l† f_k† |r⟩: f_k† acts first
                let Some((y, s3)) = r.create(k) else {
                    continue;
                };
                let Some((target, s4)) = y.create(l) else {
                    continue;
                };
                if let Some(u) = basis.index_of(target) {
                    out[col] += amps[u].conj() * a * (s1 * s2 * s3 * s4);
                }
            }
        }
        out
    });
    let pairs = DMatrix::from_fn(n, n, |r, c| rows[r][c]);
    TwoRdm {
        d,
        pairs: (&pairs + pairs.adjoint()) * Complex::new(0.5, 0.0),
    }
}
