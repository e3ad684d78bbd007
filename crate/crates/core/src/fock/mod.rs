//! Determinant-level Fock-space engine.
//!
//! A [`Determinant`] packs the occupation numbers of up to 64 modes into a word,
//! mode 0 in the least significant bit. Under the normal order
//! `|n⟩ = (f₀†)^n₀ … (f_{d-1}†)^n_{d-1} |0⟩` a ladder operator on mode `m` picks up
//! the sign `(-1)^k`, where `k` counts the occupied modes below `m`.

mod civec;
mod fcivec;
mod ops;

use std::fmt;
use std::sync::Arc;

use crate::{Error, Result};

pub use civec::CiVector;
pub use fcivec::{read_fcivec, write_fcivec};
pub use ops::{apply_one_body, apply_two_body, TwoBodyOperator};

/// Hard cap on the number of modes (one machine word per determinant).
pub const MAX_MODES: usize = 64;

const UP_MASK: u64 = 0x5555_5555_5555_5555;
const DOWN_MASK: u64 = 0xAAAA_AAAA_AAAA_AAAA;

/// Occupation-number configuration of up to 64 modes.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Determinant(u64);

/// Which ladder operator to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ladder {
    Create,
    Annihilate,
}

impl Determinant {
    pub const VACUUM: Determinant = Determinant(0);

    pub const fn from_bits(bits: u64) -> Self {
        Determinant(bits)
    }

    pub fn from_modes(modes: &[usize]) -> Self {
        Determinant(modes.iter().fold(0u64, |acc, &m| acc | (1u64 << m)))
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub const fn is_occupied(self, mode: usize) -> bool {
        (self.0 >> mode) & 1 == 1
    }

    pub const fn count(self) -> u32 {
        self.0.count_ones()
    }

    /// Occupied modes in ascending order.
    pub fn occupied(self) -> impl Iterator<Item = usize> {
        BitIter(self.0)
    }

    /// Empty modes below `d` in ascending order.
    pub fn empty(self, d: usize) -> impl Iterator<Item = usize> {
        BitIter(!self.0 & low_mask(d))
    }

    /// `(-1)^(number of occupied modes strictly below mode)`.
    #[inline]
    pub fn sign_below(self, mode: usize) -> f64 {
        if (self.0 & low_mask(mode)).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// `f_mode† |self⟩`, or `None` on an occupied mode.
    #[inline]
    pub fn create(self, mode: usize) -> Option<(Determinant, f64)> {
        if self.is_occupied(mode) {
            None
        } else {
            Some((Determinant(self.0 | (1u64 << mode)), self.sign_below(mode)))
        }
    }

    /// `f_mode |self⟩`, or `None` on an empty mode.
    #[inline]
    pub fn annihilate(self, mode: usize) -> Option<(Determinant, f64)> {
        if self.is_occupied(mode) {
            Some((Determinant(self.0 & !(1u64 << mode)), self.sign_below(mode)))
        } else {
            None
        }
    }

    /// Twice the spin projection under the interleaved convention.
    pub const fn sz_twice(self) -> i32 {
        (self.0 & UP_MASK).count_ones() as i32 - (self.0 & DOWN_MASK).count_ones() as i32
    }

    /// Occupations as a string of `0`/`1`, mode 0 leftmost.
    pub fn to_bitstring(self, d: usize) -> String {
        (0..d)
            .map(|m| if self.is_occupied(m) { '1' } else { '0' })
            .collect()
    }

    pub fn parse_bitstring(s: &str) -> Result<(Determinant, usize)> {
        if s.len() > MAX_MODES {
            return Err(Error::domain(format!(
                "bitstring of length {} exceeds {MAX_MODES} modes",
                s.len()
            )));
        }
        let mut bits = 0u64;
        for (m, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1u64 << m,
                _ => return Err(Error::domain(format!("invalid occupation character {c:?}"))),
            }
        }
        Ok((Determinant(bits), s.len()))
    }
}

impl fmt::Debug for Determinant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Determinant({:#b})", self.0)
    }
}

/// Applies a single creation or annihilation operator with its fermionic sign.
pub fn apply_ladder(
    det: Determinant,
    mode: usize,
    kind: Ladder,
    d: usize,
) -> Result<Option<(Determinant, f64)>> {
    if mode >= d || d > MAX_MODES {
        return Err(Error::domain(format!("mode {mode} out of range for d = {d}")));
    }
    Ok(match kind {
        Ladder::Create => det.create(mode),
        Ladder::Annihilate => det.annihilate(mode),
    })
}

#[inline]
pub(crate) const fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Spin of a mode under interleaving: 0 for up, 1 for down.
#[inline]
pub const fn mode_spin(mode: usize) -> usize {
    mode & 1
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            let m = self.0.trailing_zeros() as usize;
            self.0 &= self.0 - 1;
            Some(m)
        }
    }
}

/// Indexed fixed-particle-number determinant basis, optionally restricted to one
/// `2·Sz` sector. Determinants are sorted by their packed value.
#[derive(Clone, PartialEq, Eq)]
pub struct BasisMap {
    d: usize,
    n_particles: usize,
    sz_twice: Option<i32>,
    dets: Vec<Determinant>,
}

impl fmt::Debug for BasisMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BasisMap")
            .field("d", &self.d)
            .field("n_particles", &self.n_particles)
            .field("sz_twice", &self.sz_twice)
            .field("len", &self.dets.len())
            .finish()
    }
}

/// Enumerates all `N`-particle determinants on `d` modes, optionally restricted to
/// the spin sector `sz_twice` (requires even `d`, interleaved spin-orbitals).
pub fn enumerate_basis(d: usize, n: usize, sz_twice: Option<i32>) -> Result<Arc<BasisMap>> {
    BasisMap::new(d, n, sz_twice).map(Arc::new)
}

impl BasisMap {
    pub fn new(d: usize, n: usize, sz_twice: Option<i32>) -> Result<Self> {
        if d > MAX_MODES {
            return Err(Error::domain(format!("d = {d} exceeds {MAX_MODES} modes")));
        }
        if n > d {
            return Err(Error::domain(format!("n = {n} particles exceed d = {d} modes")));
        }
        if let Some(sz) = sz_twice {
            if d % 2 != 0 {
                return Err(Error::domain("a spin sector needs an even number of modes"));
            }
            let n_i = n as i32;
            if sz.abs() > n_i || (n_i + sz) % 2 != 0 {
                return Err(Error::domain(format!("2Sz = {sz} incompatible with N = {n}")));
            }
            let n_up = ((n_i + sz) / 2) as usize;
            let n_down = ((n_i - sz) / 2) as usize;
            if n_up > d / 2 || n_down > d / 2 {
                return Err(Error::domain(format!(
                    "2Sz = {sz} needs {n_up} up and {n_down} down electrons in {} orbitals",
                    d / 2
                )));
            }
        }
        let mut dets = Vec::new();
        if n == 0 {
            dets.push(Determinant::VACUUM);
        } else {
            // Gosper's hack walks n-bit words in increasing numeric order.
            let last = low_mask(d) ^ low_mask(d - n);
            let mut v = low_mask(n);
            loop {
                let det = Determinant(v);
                if sz_twice.is_none_or(|sz| det.sz_twice() == sz) {
                    dets.push(det);
                }
                if v == last {
                    break;
                }
                let c = v & v.wrapping_neg();
                let r = v + c;
                v = (((r ^ v) >> 2) / c) | r;
            }
        }
        Ok(BasisMap {
            d,
            n_particles: n,
            sz_twice,
            dets,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn sz_twice(&self) -> Option<i32> {
        self.sz_twice
    }

    pub fn len(&self) -> usize {
        self.dets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dets.is_empty()
    }

    pub fn dets(&self) -> &[Determinant] {
        &self.dets
    }

    pub fn det(&self, index: usize) -> Determinant {
        self.dets[index]
    }

    /// Position of `det`, if it belongs to this basis.
    #[inline]
    pub fn index_of(&self, det: Determinant) -> Option<usize> {
        self.dets.binary_search(&det).ok()
    }

    /// Same particle number and mode count, ignoring any spin restriction.
    pub fn full_sector(&self) -> Result<Arc<BasisMap>> {
        enumerate_basis(self.d, self.n_particles, None)
    }

    pub(crate) fn same_space(&self, other: &BasisMap) -> bool {
        self.d == other.d
            && self.n_particles == other.n_particles
            && self.sz_twice == other.sz_twice
    }
}
