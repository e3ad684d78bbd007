use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::von_neumann_entropy;
use crate::eig::hermitian_eigh;
use crate::fock::CiVector;
use crate::{Error, Result, C64};

/// Largest number of modes for which a reduced state is materialized (`2^12` local configurations).
pub const MAX_LOCAL_MODES: usize = 12;

/// A sorted set of distinct spin-orbital indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitalSubset {
    modes: Vec<usize>,
}

impl OrbitalSubset {
    pub fn new(modes: &[usize], d: usize) -> Result<Self> {
        let mut m = modes.to_vec();
        m.sort_unstable();
        if m.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain(format!("repeated mode in subset {modes:?}")));
        }
        if let Some(&bad) = m.iter().find(|&&x| x >= d) {
            return Err(Error::domain(format!("mode {bad} out of range for {d} modes")));
        }
        Ok(OrbitalSubset { modes: m })
    }

    /// Both spin modes `2k, 2k+1` of each spatial orbital `k`.
    pub fn spatial(orbitals: &[usize], d: usize) -> Result<Self> {
        let modes: Vec<usize> = orbitals.iter().flat_map(|&k| [2 * k, 2 * k + 1]).collect();
        Self::new(&modes, d)
    }

    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn complement(&self, d: usize) -> OrbitalSubset {
        OrbitalSubset {
            modes: (0..d).filter(|m| !self.modes.contains(m)).collect(),
        }
    }

    pub fn is_disjoint(&self, other: &OrbitalSubset) -> bool {
        self.modes.iter().all(|m| !other.modes.contains(m))
    }
}

/// Density matrix on the local Fock space of an ordered list of modes. Local
/// configuration `x` has mode `modes[t]` occupied when bit `t` of `x` is set.
#[derive(Clone, Debug)]
pub struct LocalDensityMatrix {
    modes: Vec<usize>,
    matrix: DMatrix<C64>,
}

impl LocalDensityMatrix {
    pub fn new(modes: Vec<usize>, matrix: DMatrix<C64>) -> Result<Self> {
        let dim = 1usize << modes.len();
        if matrix.shape() != (dim, dim) {
            return Err(Error::domain(format!(
                "{} modes need a {dim}×{dim} matrix",
                modes.len()
            )));
        }
        Ok(LocalDensityMatrix { modes, matrix })
    }

    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigh(&self.matrix).0
    }

    /// Von Neumann entropy; fails when the trace is off by more than `1e-8`.
    pub fn entropy(&self) -> Result<f64> {
        let t = self.trace();
        if (t - 1.0).abs() > 1e-8 {
            return Err(Error::domain(format!("density matrix has trace {t}")));
        }
        Ok(von_neumann_entropy(&self.eigenvalues()))
    }

    /// Local particle numbers carrying weight above `1e-14`.
    pub fn particle_sectors(&self) -> Vec<usize> {
        let mut sectors: Vec<usize> = (0..self.dim())
            .filter(|&x| self.matrix[(x, x)].re > 1e-14)
            .map(|x| x.count_ones() as usize)
            .collect();
        sectors.sort_unstable();
        sectors.dedup();
        sectors
    }

    /// Reduced state on the first `n_first` modes (the low bits).
    ///
    /// This is a plain partial trace. It coincides with the fermionic one whenever
    /// coherences only connect configurations of equal particle number, as for every
    /// reduction of a fixed-N state.
    pub fn keep_first(&self, n_first: usize) -> Result<LocalDensityMatrix> {
        let n = self.modes.len();
        if n_first > n {
            return Err(Error::domain("split larger than the mode count"));
        }
        let da = 1usize << n_first;
        let db = 1usize << (n - n_first);
        let m = DMatrix::from_fn(da, da, |a, a2| {
            (0..db).map(|b| self.matrix[(a | b << n_first, a2 | b << n_first)]).sum()
        });
        LocalDensityMatrix::new(self.modes[..n_first].to_vec(), m)
    }

    /// Reduced state on the modes after the first `n_first`.
    pub fn keep_last(&self, n_first: usize) -> Result<LocalDensityMatrix> {
        let n = self.modes.len();
        if n_first > n {
            return Err(Error::domain("split larger than the mode count"));
        }
        let da = 1usize << n_first;
        let db = 1usize << (n - n_first);
        let m = DMatrix::from_fn(db, db, |b, b2| {
            (0..da).map(|a| self.matrix[(a | b << n_first, a | b2 << n_first)]).sum()
        });
        LocalDensityMatrix::new(self.modes[n_first..].to_vec(), m)
    }

    /// Removes coherences between configurations of different local parity.
    pub fn pinch_parity(&self) -> LocalDensityMatrix {
        let m = DMatrix::from_fn(self.dim(), self.dim(), |x, y| {
            if (x.count_ones() + y.count_ones()) % 2 == 0 {
                self.matrix[(x, y)]
            } else {
                C64::default()
            }
        });
        LocalDensityMatrix {
            modes: self.modes.clone(),
            matrix: m,
        }
    }
}

/// Parity of the permutation bringing `det`'s creation operators from ascending
/// mode order into the order `modes` (occupied ones) followed by the rest ascending.
fn reorder_sign(bits: u64, modes: &[usize]) -> f64 {
    let mut order: Vec<usize> = modes.iter().copied().filter(|&m| bits >> m & 1 == 1).collect();
    let mut in_list = 0u64;
    for &m in modes {
        in_list |= 1 << m;
    }
    let mut rest = bits & !in_list;
    while rest != 0 {
        order.push(rest.trailing_zeros() as usize);
        rest &= rest - 1;
    }
    let mut inversions = 0usize;
    for x in 0..order.len() {
        for y in x + 1..order.len() {
            if order[x] > order[y] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Reduced state of `psi` on `modes` in the given order (at most [`MAX_LOCAL_MODES`]).
///
/// Each determinant is first rewritten with the listed modes in front, which fixes
/// the fermionic signs, and the remaining modes are then traced out.
pub fn reduced_state_ordered(psi: &CiVector, modes: &[usize]) -> Result<LocalDensityMatrix> {
    let d = psi.d();
    if modes.len() > MAX_LOCAL_MODES {
        return Err(Error::Refused(format!(
            "reduced state on {} modes exceeds the limit of {MAX_LOCAL_MODES}",
            modes.len()
        )));
    }
    let mut seen = 0u64;
    for &m in modes {
        if m >= d || seen >> m & 1 == 1 {
            return Err(Error::domain(format!("invalid or repeated mode {m}")));
        }
        seen |= 1 << m;
    }
    // group amplitudes by the configuration of the traced-out modes
    let mut groups: BTreeMap<u64, Vec<(usize, C64)>> = BTreeMap::new();
    for (det, a) in psi.iter() {
        if a == C64::default() {
            continue;
        }
        let bits = det.bits();
        let local = modes
            .iter()
            .enumerate()
            .fold(0usize, |acc, (t, &m)| acc | ((bits >> m & 1) as usize) << t);
        groups
            .entry(bits & !seen)
            .or_default()
            .push((local, a * reorder_sign(bits, modes)));
    }
    let dim = 1usize << modes.len();
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for terms in groups.values() {
        for &(x, ax) in terms {
            for &(y, ay) in terms {
                m[(x, y)] += ax * ay.conj();
            }
        }
    }
    LocalDensityMatrix::new(modes.to_vec(), m)
}

/// `ρ_A` on the subset's modes in ascending order.
pub fn orbital_reduced_state(psi: &CiVector, subset: &OrbitalSubset) -> Result<LocalDensityMatrix> {
    reduced_state_ordered(psi, subset.modes())
}

/// `ρ^P = Σ (Π_τ ⊗ Π_τ') ρ (Π_τ ⊗ Π_τ')` over local parities of the two factors,
/// where the first `n_a` modes form factor A and the next `n_b` factor B.
pub fn parity_superselect(rho: &LocalDensityMatrix, n_a: usize, n_b: usize) -> Result<LocalDensityMatrix> {
    if n_a + n_b != rho.modes.len() {
        return Err(Error::domain(format!(
            "split {n_a}+{n_b} does not match {} modes",
            rho.modes.len()
        )));
    }
    let mask_a = (1usize << n_a) - 1;
    let m = DMatrix::from_fn(rho.dim(), rho.dim(), |x, y| {
        let same_a = ((x & mask_a).count_ones() + (y & mask_a).count_ones()) % 2 == 0;
        let same_b = ((x >> n_a).count_ones() + (y >> n_a).count_ones()) % 2 == 0;
        if same_a && same_b {
            rho.matrix[(x, y)]
        } else {
            C64::default()
        }
    });
    LocalDensityMatrix::new(rho.modes.clone(), m)
}

fn mutual_information_of(rho_ab: &LocalDensityMatrix, n_a: usize) -> Result<f64> {
    let sa = rho_ab.keep_first(n_a)?.entropy()?;
    let sb = rho_ab.keep_last(n_a)?.entropy()?;
    Ok(sa + sb - rho_ab.entropy()?)
}

/// `I(A:B) = S(ρ_A) + S(ρ_B) − S(ρ_AB)`. With `superselected`, `ρ_AB` is replaced by
/// its parity-superselected version, whose marginals are the parity-pinched `ρ_A`, `ρ_B`.
pub fn mutual_information(
    psi: &CiVector,
    a: &OrbitalSubset,
    b: &OrbitalSubset,
    superselected: bool,
) -> Result<f64> {
    if !a.is_disjoint(b) {
        return Err(Error::domain("subsets overlap"));
    }
    let modes: Vec<usize> = a.modes().iter().chain(b.modes()).copied().collect();
    let mut rho = reduced_state_ordered(psi, &modes)?;
    if superselected {
        rho = parity_superselect(&rho, a.len(), b.len())?;
    }
    mutual_information_of(&rho, a.len())
}

/// Entanglement `E = S(ρ_A)` of a pure state between `a` and its complement.
/// Fails if `S(ρ_A)` and `S(ρ_Ā)` disagree by more than `1e-9`.
pub fn pure_bipartite_entanglement(psi: &CiVector, a: &OrbitalSubset) -> Result<f64> {
    let d = psi.d();
    if a.modes().iter().any(|&m| m >= d) {
        return Err(Error::domain("subset out of range"));
    }
    let comp = a.complement(d);
    let sa = (a.len() <= MAX_LOCAL_MODES)
        .then(|| orbital_reduced_state(psi, a).and_then(|r| r.entropy()))
        .transpose()?;
    let sc = (comp.len() <= MAX_LOCAL_MODES)
        .then(|| orbital_reduced_state(psi, &comp).and_then(|r| r.entropy()))
        .transpose()?;
    match (sa, sc) {
        (Some(x), Some(y)) if (x - y).abs() > 1e-9 => Err(Error::Numerical(format!(
            "S(A) = {x} and S(complement) = {y} differ; is the state normalized?"
        ))),
        (Some(x), _) | (None, Some(x)) => Ok(x),
        (None, None) => Err(Error::Refused("both sides exceed the reduced-state limit".into())),
    }
}

/// Result of [`correlation_function`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationValue {
    /// `⟨O_A ⊗ O_B⟩ − ⟨O_A⟩⟨O_B⟩`.
    pub c: f64,
    /// `|C| / (‖O_A‖_F ‖O_B‖_F √2 √I)`; at most one.
    pub bound_ratio: f64,
    /// `I(ρ_AB)` in bits.
    pub mutual_information: f64,
}

fn check_observable(o: &DMatrix<C64>, dim: usize, name: &str) -> Result<f64> {
    if o.shape() != (dim, dim) {
        return Err(Error::domain(format!("{name} must be {dim}×{dim}")));
    }
    if (o - o.adjoint()).camax() > 1e-10 {
        return Err(Error::domain(format!("{name} is not Hermitian")));
    }
    let n = o.norm();
    if n == 0.0 {
        return Err(Error::domain(format!("{name} has zero norm")));
    }
    Ok(n)
}

/// Connected correlation of `O_A ⊗ O_B` in `rho_ab` (first `n_a` modes form A) and its
/// ratio to the mutual-information bound `|C| ≤ √2 √I ‖O_A‖_F ‖O_B‖_F`.
pub fn correlation_function(
    rho_ab: &LocalDensityMatrix,
    n_a: usize,
    o_a: &DMatrix<C64>,
    o_b: &DMatrix<C64>,
) -> Result<CorrelationValue> {
    let n = rho_ab.modes.len();
    if n_a > n {
        return Err(Error::domain("split larger than the mode count"));
    }
    let da = 1usize << n_a;
    let db = 1usize << (n - n_a);
    let na = check_observable(o_a, da, "O_A")?;
    let nb = check_observable(o_b, db, "O_B")?;
    let rho = &rho_ab.matrix;
    let mut joint = C64::default();
    for x in 0..da * db {
        for y in 0..da * db {
            let r = rho[(x, y)];
            if r == C64::default() {
                continue;
            }
            joint += r * o_a[(y & (da - 1), x & (da - 1))] * o_b[(y >> n_a, x >> n_a)];
        }
    }
    let rho_a = rho_ab.keep_first(n_a)?;
    let rho_b = rho_ab.keep_last(n_a)?;
    let ea = (rho_a.matrix() * o_a).trace();
    let eb = (rho_b.matrix() * o_b).trace();
    let c = (joint - ea * eb).re;
    let i = mutual_information_of(rho_ab, n_a)?.max(0.0);
    let bound_ratio = if i < 1e-15 {
        if c.abs() < 1e-12 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        c.abs() / (na * nb * (2.0 * i).sqrt())
    };
    Ok(CorrelationValue {
        c,
        bound_ratio,
        mutual_information: i,
    })
}

/// Diagonal observable on a local space from per-configuration values.
#[cfg(test)]
fn diagonal_observable(values: impl IntoIterator<Item = f64>) -> DMatrix<C64> {
    let v: Vec<C64> = values.into_iter().map(|x| C64::new(x, 0.0)).collect();
    DMatrix::from_diagonal(&nalgebra::DVector::from_vec(v))
}
