use nalgebra::DMatrix;

use crate::{Error, Result};

/// One- and two-electron integrals over spatial orbitals, chemist's notation.
///
/// Two-electron integrals `(ij|kl)` are stored once per 8-fold permutation class,
/// so the symmetry holds by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct MolecularIntegrals {
    n_spatial: usize,
    n_elec: usize,
    ms2: i32,
    h_core: DMatrix<f64>,
    eri: Vec<f64>,
    e_core: f64,
}

#[inline]
pub(crate) fn pair_index(i: usize, j: usize) -> usize {
    let (a, b) = if i >= j { (i, j) } else { (j, i) };
    a * (a + 1) / 2 + b
}

#[inline]
pub(crate) fn eri_index(i: usize, j: usize, k: usize, l: usize) -> usize {
    pair_index(pair_index(i, j), pair_index(k, l))
}

impl MolecularIntegrals {
    pub fn zeros(n_spatial: usize, n_elec: usize, ms2: i32) -> Result<Self> {
        if n_elec > 2 * n_spatial {
            return Err(Error::domain(format!(
                "{n_elec} electrons do not fit in {n_spatial} spatial orbitals"
            )));
        }
        let npair = n_spatial * (n_spatial + 1) / 2;
        Ok(MolecularIntegrals {
            n_spatial,
            n_elec,
            ms2,
            h_core: DMatrix::zeros(n_spatial, n_spatial),
            eri: vec![0.0; npair * (npair + 1) / 2],
            e_core: 0.0,
        })
    }

    pub fn n_spatial(&self) -> usize {
        self.n_spatial
    }

    pub fn n_elec(&self) -> usize {
        self.n_elec
    }

    pub fn ms2(&self) -> i32 {
        self.ms2
    }

    pub fn e_core(&self) -> f64 {
        self.e_core
    }

    pub fn h_core(&self) -> &DMatrix<f64> {
        &self.h_core
    }

    #[inline]
    pub fn h(&self, i: usize, j: usize) -> f64 {
        self.h_core[(i, j)]
    }

    /// `(ij|kl)`, zero-based.
    #[inline]
    pub fn eri(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.eri[eri_index(i, j, k, l)]
    }

    /// Sets `h_ij` and `h_ji`.
    pub fn set_h(&mut self, i: usize, j: usize, v: f64) {
        self.h_core[(i, j)] = v;
        self.h_core[(j, i)] = v;
    }

    /// Sets `(ij|kl)` and its seven permutation partners.
    pub fn set_eri(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        self.eri[eri_index(i, j, k, l)] = v;
    }

    pub fn set_e_core(&mut self, e: f64) {
        self.e_core = e;
    }

    pub fn with_n_elec(mut self, n_elec: usize) -> Result<Self> {
        if n_elec > 2 * self.n_spatial {
            return Err(Error::domain(format!(
                "{n_elec} electrons do not fit in {} spatial orbitals",
                self.n_spatial
            )));
        }
        self.n_elec = n_elec;
        Ok(self)
    }

    pub fn with_ms2(mut self, ms2: i32) -> Self {
        self.ms2 = ms2;
        self
    }

    /// Canonical representatives `(i, j, k, l)` with `i ≥ j`, `k ≥ l`, `ij ≥ kl`.
    pub fn canonical_eri(&self) -> impl Iterator<Item = ((usize, usize, usize, usize), f64)> + '_ {
        let n = self.n_spatial;
        (0..n)
            .flat_map(move |i| (0..=i).map(move |j| (i, j)))
            .flat_map(move |(i, j)| {
                (0..n)
                    .flat_map(move |k| (0..=k).map(move |l| (k, l)))
                    .filter(move |&(k, l)| pair_index(i, j) >= pair_index(k, l))
                    .map(move |(k, l)| (i, j, k, l))
            })
            .map(move |idx| (idx, self.eri(idx.0, idx.1, idx.2, idx.3)))
    }

    /// Integrals over the rotated orbitals `φ'_p = Σ_i u_ip φ_i` (real orthogonal `u`).
    pub fn rotated(&self, u: &DMatrix<f64>) -> Result<MolecularIntegrals> {
        let n = self.n_spatial;
        if u.nrows() != n || u.ncols() != n {
            return Err(Error::domain("rotation dimension differs from the orbital count"));
        }
        let mut out = MolecularIntegrals::zeros(n, self.n_elec, self.ms2)?;
        out.e_core = self.e_core;
        out.h_core = u.transpose() * &self.h_core * u;
        // four quarter transformations on a dense n^4 buffer
        let idx = |a: usize, b: usize, c: usize, e: usize| ((a * n + b) * n + c) * n + e;
        let mut t = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        t[idx(i, j, k, l)] = self.eri(i, j, k, l);
                    }
                }
            }
        }
        for axis in 0..4 {
            let mut next = vec![0.0; t.len()];
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        for e in 0..n {
                            let mut acc = 0.0;
                            for m in 0..n {
                                let (src, w) = match axis {
                                    0 => (idx(m, b, c, e), u[(m, a)]),
                                    1 => (idx(a, m, c, e), u[(m, b)]),
                                    2 => (idx(a, b, m, e), u[(m, c)]),
                                    _ => (idx(a, b, c, m), u[(m, e)]),
                                };
                                acc += w * t[src];
                            }
                            next[idx(a, b, c, e)] = acc;
                        }
                    }
                }
            }
            t = next;
        }
        for ((i, j, k, l), _) in self.canonical_eri() {
            out.set_eri(i, j, k, l, t[idx(i, j, k, l)]);
        }
        Ok(out)
    }
}

/// One-band Hubbard chain: `-t` on nearest-neighbour bonds, on-site `U`, half filling.
///
/// The wrap-around bond is added only for `periodic` chains with more than two sites.
pub fn build_hubbard(sites: usize, t: f64, u: f64, periodic: bool) -> Result<MolecularIntegrals> {
    if sites == 0 {
        return Err(Error::domain("a Hubbard chain needs at least one site"));
    }
    if !t.is_finite() || !u.is_finite() {
        return Err(Error::domain("Hubbard parameters must be finite"));
    }
    let mut ints = MolecularIntegrals::zeros(sites, sites, (sites % 2) as i32)?;
    for i in 0..sites.saturating_sub(1) {
        ints.set_h(i, i + 1, -t);
    }
    if periodic && sites > 2 {
        ints.set_h(sites - 1, 0, -t);
    }
    for i in 0..sites {
        ints.set_eri(i, i, i, i, u);
    }
    Ok(ints)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eight_fold_symmetry() {
        let mut ints = MolecularIntegrals::zeros(3, 2, 0).unwrap();
        ints.set_eri(0, 1, 0, 1, 0.5);
        ints.set_eri(2, 0, 1, 1, -0.25);
        for (i, j, k, l) in [(0, 1, 0, 1), (1, 0, 0, 1), (0, 1, 1, 0), (1, 0, 1, 0)] {
            assert_eq!(ints.eri(i, j, k, l), 0.5);
            assert_eq!(ints.eri(k, l, i, j), 0.5);
        }
        assert_eq!(ints.eri(1, 1, 0, 2), -0.25);
        assert_eq!(ints.eri(0, 0, 1, 1), 0.0);
    }

    #[test]
    fn hubbard_dimer() {
        let h = build_hubbard(2, 1.0, 0.0, false).unwrap();
        assert_eq!(h.h_core(), &DMatrix::from_row_slice(2, 2, &[0.0, -1.0, -1.0, 0.0]));
        assert!(h.canonical_eri().all(|(_, v)| v == 0.0));
        assert_eq!(h.n_elec(), 2);

        let h = build_hubbard(2, 1.0, 4.0, false).unwrap();
        assert_eq!(h.eri(0, 0, 0, 0), 4.0);
        assert_eq!(h.eri(1, 1, 1, 1), 4.0);
        assert_eq!(h.eri(0, 0, 1, 1), 0.0);
        assert_eq!(h.e_core(), 0.0);
        // no doubled bond for a periodic dimer
        assert_eq!(build_hubbard(2, 1.0, 4.0, true).unwrap().h(0, 1), -1.0);
    }

    #[test]
    fn hubbard_ring_bonds() {
        let h = build_hubbard(3, 1.0, 2.0, true).unwrap();
        for (i, j) in [(0, 1), (1, 2), (2, 0)] {
            assert_eq!(h.h(i, j), -1.0);
            assert_eq!(h.h(j, i), -1.0);
        }
        let open = build_hubbard(3, 1.0, 2.0, false).unwrap();
        assert_eq!(open.h(0, 2), 0.0);
        assert_eq!(open.ms2(), 1);
        assert!(build_hubbard(0, 1.0, 1.0, false).is_err());
    }

    #[test]
    fn rotation_by_identity_is_exact() {
        let mut ints = build_hubbard(3, 1.0, 2.0, false).unwrap();
        ints.set_eri(0, 1, 2, 1, 0.3);
        let same = ints.rotated(&DMatrix::identity(3, 3)).unwrap();
        assert_eq!(same, ints);
    }
}
