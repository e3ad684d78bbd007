use nalgebra::DMatrix;
use num_complex::Complex;

use super::{natural_basis_rotation, BasisRotation};
use crate::corr::binary_entropy;
use crate::fock::CiVector;
use crate::rdm::one_rdm;
use crate::{Error, Result, C64};

/// Options for [`minimize_total_correlation`].
#[derive(Clone, Debug)]
pub struct MinimizeOptions {
    pub max_sweeps: usize,
    /// Stop once a full sweep lowers `I_B` by less than this (bits).
    pub tol: f64,
    /// Width at which the golden-section search stops.
    pub angle_tol: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            max_sweeps: 100,
            tol: 1e-10,
            angle_tol: 1e-7,
        }
    }
}

/// Outcome of a minimization. `converged` is false when `max_sweeps` ran out; the
/// basis and value are then the best found.
#[derive(Clone, Debug)]
pub struct Minimization {
    pub rotation: BasisRotation,
    pub i_min: f64,
    pub sweeps: usize,
    pub converged: bool,
}

const GRID: usize = 24;
const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Occupations of modes `p`, `q` after the Givens rotation by `theta`.
fn rotated_pair(g: &DMatrix<C64>, p: usize, q: usize, theta: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    let (gpp, gqq, re) = (g[(p, p)].re, g[(q, q)].re, g[(p, q)].re);
    (
        c * c * gpp + s * s * gqq + 2.0 * c * s * re,
        s * s * gpp + c * c * gqq - 2.0 * c * s * re,
    )
}

fn pair_cost(g: &DMatrix<C64>, p: usize, q: usize, theta: f64) -> f64 {
    let (a, b) = rotated_pair(g, p, q, theta);
    binary_entropy(a) + binary_entropy(b)
}

/// Grid scan over `[0, π)` followed by golden-section refinement of the best bracket.
fn line_search(f: impl Fn(f64) -> f64, tol: f64) -> (f64, f64) {
    let h = std::f64::consts::PI / GRID as f64;
    let values: Vec<f64> = (0..GRID).map(|k| f(k as f64 * h)).collect();
    let best = (0..GRID).min_by(|&a, &b| values[a].total_cmp(&values[b])).expect("grid");
    let (mut lo, mut hi) = ((best as f64 - 1.0) * h, (best as f64 + 1.0) * h);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let (x, fx) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    if fx <= values[best] {
        (x, fx)
    } else {
        (best as f64 * h, values[best])
    }
}

fn diagonal_cost(g: &DMatrix<C64>) -> f64 {
    g.diagonal().iter().map(|z| binary_entropy(z.re)).sum()
}

/// Minimizes `I_B` over bases by Jacobi sweeps of real Givens rotations, starting from
/// the natural basis of `psi`, where `I_B` equals the nonfreeness.
pub fn minimize_total_correlation(psi: &CiVector, opts: &MinimizeOptions) -> Result<Minimization> {
    let (start, _) = natural_basis_rotation(psi)?;
    minimize_total_correlation_from(psi, &start, opts)
}

/// As [`minimize_total_correlation`] with an explicit starting basis.
pub fn minimize_total_correlation_from(
    psi: &CiVector,
    start: &BasisRotation,
    opts: &MinimizeOptions,
) -> Result<Minimization> {
    let d = psi.d();
    if start.d() != d {
        return Err(Error::domain("starting basis has the wrong dimension"));
    }
    if !(opts.angle_tol > 0.0) {
        return Err(Error::domain("angle tolerance must be positive"));
    }
    let mut u = start.matrix().clone();
    let mut g = one_rdm(psi).transformed(&u)?.matrix().clone();
    let mut cost = diagonal_cost(&g);
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < opts.max_sweeps {
        sweeps += 1;
        let before = cost;
        for p in 0..d {
            for q in p + 1..d {
                let current = pair_cost(&g, p, q, 0.0);
                let (theta, value) = line_search(|t| pair_cost(&g, p, q, t), opts.angle_tol);
                if value < current - 1e-15 {
                    apply_givens(&mut u, &mut g, p, q, theta);
                }
            }
        }
        cost = diagonal_cost(&g);
        if before - cost < opts.tol {
            converged = true;
            break;
        }
    }
    // recompute from scratch to avoid drift in the accumulated γ
    let rotation = BasisRotation::new(u)?;
    let i_min = diagonal_cost(one_rdm(psi).transformed(rotation.matrix())?.matrix());
    Ok(Minimization {
        rotation,
        i_min,
        sweeps,
        converged,
    })
}

/// New modes `p' = c p + s q`, `q' = −s p + c q`; updates `u ← u G` and `γ ← G† γ G`.
fn apply_givens(u: &mut DMatrix<C64>, g: &mut DMatrix<C64>, p: usize, q: usize, theta: f64) {
    let (s, c) = theta.sin_cos();
    let (c, s) = (Complex::new(c, 0.0), Complex::new(s, 0.0));
    let rotate_cols = |m: &mut DMatrix<C64>| {
        for r in 0..m.nrows() {
            let (a, b) = (m[(r, p)], m[(r, q)]);
            m[(r, p)] = c * a + s * b;
            m[(r, q)] = -s * a + c * b;
        }
    };
    rotate_cols(u);
    rotate_cols(g);
    for col in 0..g.ncols() {
        let (a, b) = (g[(p, col)], g[(q, col)]);
        g[(p, col)] = c * a + s * b;
        g[(q, col)] = -s * a + c * b;
    }
}
