//! Lowest-eigenpair solvers for Hermitian operators.
//!
//! [`dense_lowest`] assembles the full matrix and is the reference for small
//! problems; [`davidson_lowest`] only needs matrix-vector products and the diagonal.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::fock::{BasisMap, CiVector};
use crate::{par, Error, Result, C64};

/// Largest dimension [`dense_lowest`] accepts.
pub const DENSE_MAX_DIM: usize = 4096;

/// Gap below which a ground state is flagged as (nearly) degenerate.
pub const DEGENERACY_GAP: f64 = 1e-6;

/// A Hermitian linear map given through its action.
pub trait HermitianOperator: Sync {
    fn dim(&self) -> usize;

    /// `y = A x`. Both slices have length [`dim`](Self::dim).
    fn apply(&self, x: &[C64], y: &mut [C64]);

    /// Real diagonal of `A`. The default probes every unit vector.
    fn diagonal(&self) -> Vec<f64> {
        let n = self.dim();
        par::map_range(n, |i| {
            let mut e = vec![C64::default(); n];
            e[i] = Complex::new(1.0, 0.0);
            let mut y = vec![C64::default(); n];
            self.apply(&e, &mut y);
            y[i].re
        })
    }
}

/// Adapts a closure `(x, y) ↦ y = A x` into a [`HermitianOperator`].
pub struct FnOperator<F> {
    dim: usize,
    f: F,
}

impl<F> FnOperator<F>
where
    F: Fn(&[C64], &mut [C64]) + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        FnOperator { dim, f }
    }
}

impl<F> HermitianOperator for FnOperator<F>
where
    F: Fn(&[C64], &mut [C64]) + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        (self.f)(x, y)
    }
}

/// Dense Hermitian matrix as an operator.
impl HermitianOperator for DMatrix<C64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        let out = self * DVector::from_column_slice(x);
        y.copy_from_slice(out.as_slice());
    }

    fn diagonal(&self) -> Vec<f64> {
        self.diagonal().iter().map(|z| z.re).collect()
    }
}

/// Lowest eigenpair of an operator.
#[derive(Clone, Debug)]
pub struct EigResult {
    pub energy: f64,
    /// Normalized eigenvector; its first amplitude above `1e-12` is real positive.
    pub vector: Vec<C64>,
    /// `‖A v − E v‖`.
    pub residual_norm: f64,
    pub iterations: usize,
    /// Distance to the next eigenvalue (an upper estimate for Davidson).
    pub gap: Option<f64>,
    pub near_degenerate: bool,
    /// Lowest Ritz value after each Davidson iteration.
    pub ritz_history: Vec<f64>,
}

impl EigResult {
    pub fn to_civector(&self, basis: Arc<BasisMap>) -> Result<CiVector> {
        CiVector::new(basis, self.vector.clone())
    }
}

/// Options for [`davidson_lowest`].
#[derive(Clone, Debug)]
pub struct DavidsonOptions {
    /// Convergence threshold on the residual norm.
    pub tol: f64,
    pub max_iter: usize,
    /// Subspace size at which the iteration restarts from the best Ritz vector.
    pub max_subspace: usize,
}

impl Default for DavidsonOptions {
    fn default() -> Self {
        DavidsonOptions {
            tol: 1e-9,
            max_iter: 1000,
            max_subspace: 24,
        }
    }
}

const PRECONDITIONER_FLOOR: f64 = 1e-8;

fn fix_phase(v: &mut [C64]) {
    if let Some(a) = v.iter().find(|a| a.norm() > 1e-12).copied() {
        let phase = a.conj() / a.norm();
        v.iter_mut().for_each(|x| *x *= phase);
    }
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn residual(op: &dyn HermitianOperator, v: &[C64], e: f64) -> f64 {
    let mut y = vec![C64::default(); v.len()];
    op.apply(v, &mut y);
    y.iter()
        .zip(v)
        .map(|(a, b)| (a - b * e).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Eigen-decomposition of a Hermitian matrix, ascending eigenvalues.
/// Uses the real symmetric solver when the matrix has no imaginary part.
pub(crate) fn hermitian_eigh(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = m.nrows();
    let (values, vectors) = if m.iter().all(|z| z.im == 0.0) {
        let re = m.map(|z| z.re);
        let eig = re.symmetric_eigen();
        (eig.eigenvalues.as_slice().to_vec(), eig.eigenvectors.map(|x| Complex::new(x, 0.0)))
    } else {
        let eig = m.clone().symmetric_eigen();
        (eig.eigenvalues.as_slice().to_vec(), eig.eigenvectors)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let sorted_vectors = DMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]);
    (sorted_values, sorted_vectors)
}

/// Exact lowest eigenpair from the assembled matrix (dimension at most [`DENSE_MAX_DIM`]).
pub fn dense_lowest(op: &dyn HermitianOperator) -> Result<EigResult> {
    let n = op.dim();
    if n == 0 {
        return Err(Error::domain("operator of dimension zero"));
    }
    if n > DENSE_MAX_DIM {
        return Err(Error::Refused(format!(
            "dimension {n} exceeds the dense limit {DENSE_MAX_DIM}; use davidson_lowest"
        )));
    }
    let columns = par::map_range(n, |j| {
        let mut e = vec![C64::default(); n];
        e[j] = Complex::new(1.0, 0.0);
        let mut y = vec![C64::default(); n];
        op.apply(&e, &mut y);
        y
    });
    let raw = DMatrix::from_fn(n, n, |i, j| columns[j][i]);
    let m = (&raw + raw.adjoint()) * Complex::new(0.5, 0.0);
    let (values, vectors) = hermitian_eigh(&m);
    let mut v: Vec<C64> = vectors.column(0).iter().copied().collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    fix_phase(&mut v);
    let gap = values.get(1).map(|e1| e1 - values[0]);
    Ok(EigResult {
        energy: values[0],
        residual_norm: residual(op, &v, values[0]),
        vector: v,
        iterations: 0,
        gap,
        near_degenerate: gap.is_some_and(|g| g < DEGENERACY_GAP),
        ritz_history: Vec::new(),
    })
}

/// Davidson iteration for the lowest eigenpair.
///
/// The default guess is the unit vector on the lowest diagonal element. Corrections
/// use the diagonal preconditioner `(θ − A_ii)⁻¹` with the denominator floored at
/// `1e-8`; the subspace restarts from the current Ritz vector once it holds
/// `max_subspace` vectors.
pub fn davidson_lowest(
    op: &dyn HermitianOperator,
    guess: Option<&[C64]>,
    opts: &DavidsonOptions,
) -> Result<EigResult> {
    let n = op.dim();
    if n == 0 {
        return Err(Error::domain("operator of dimension zero"));
    }
    if !(opts.tol > 0.0) || opts.max_subspace < 2 {
        return Err(Error::domain("Davidson needs tol > 0 and a subspace of at least 2"));
    }
    let diag = op.diagonal();
    let mut start = match guess {
        Some(g) if g.len() == n && norm(g) > 0.0 => g.to_vec(),
        Some(_) => return Err(Error::domain("guess has the wrong length or zero norm")),
        None => {
            let k = (0..n)
                .min_by(|&a, &b| diag[a].total_cmp(&diag[b]).then(a.cmp(&b)))
                .expect("n > 0");
            let mut e = vec![C64::default(); n];
            e[k] = Complex::new(1.0, 0.0);
            e
        }
    };
    let s = norm(&start);
    start.iter_mut().for_each(|x| *x /= s);

    let mut basis: Vec<Vec<C64>> = Vec::new();
    let mut images: Vec<Vec<C64>> = Vec::new();
    let push = |v: Vec<C64>, basis: &mut Vec<Vec<C64>>, images: &mut Vec<Vec<C64>>| {
        let mut av = vec![C64::default(); n];
        op.apply(&v, &mut av);
        basis.push(v);
        images.push(av);
    };
    push(start, &mut basis, &mut images);

    let mut history = Vec::new();
    let mut best: Option<EigResult> = None;
    for iter in 1..=opts.max_iter {
        let k = basis.len();
        let g = DMatrix::from_fn(k, k, |i, j| dot(&basis[i], &images[j]));
        let g = (&g + g.adjoint()) * Complex::new(0.5, 0.0);
        let (theta, y) = hermitian_eigh(&g);
        let e0 = theta[0];
        history.push(e0);

        let mut x = vec![C64::default(); n];
        let mut ax = vec![C64::default(); n];
        for (c, (v, av)) in basis.iter().zip(&images).enumerate() {
            let w = y[(c, 0)];
            for i in 0..n {
                x[i] += v[i] * w;
                ax[i] += av[i] * w;
            }
        }
        let xn = norm(&x);
        x.iter_mut().for_each(|z| *z /= xn);
        ax.iter_mut().for_each(|z| *z /= xn);
        let r: Vec<C64> = ax.iter().zip(&x).map(|(a, b)| a - b * e0).collect();
        let rnorm = norm(&r);
        let gap = theta.get(1).map(|e1| e1 - e0);

        let mut vector = x.clone();
        fix_phase(&mut vector);
        let current = EigResult {
            energy: e0,
            vector,
            residual_norm: rnorm,
            iterations: iter,
            gap,
            near_degenerate: gap.is_some_and(|g| g < DEGENERACY_GAP),
            ritz_history: history.clone(),
        };
        if rnorm <= opts.tol {
            return Ok(current);
        }
        best = Some(current);

        if k >= opts.max_subspace {
            basis = vec![x];
            images = vec![ax];
        }

        let mut t: Vec<C64> = r
            .iter()
            .zip(&diag)
            .map(|(ri, di)| {
                let mut den = e0 - di;
                if den.abs() < PRECONDITIONER_FLOOR {
                    den = PRECONDITIONER_FLOOR.copysign(den);
                }
                ri / den
            })
            .collect();
        let (mut tn, mut before) = orthogonalize(&mut t, &basis);
        if tn < 1e-10 * before {
            t = r.clone();
            (tn, before) = orthogonalize(&mut t, &basis);
        }
        if tn < 1e-12 * before || tn == 0.0 {
            break;
        }
        t.iter_mut().for_each(|z| *z /= tn);
        push(t, &mut basis, &mut images);
    }
    let best = best.expect("at least one iteration");
    Err(Error::NotConverged {
        iterations: best.iterations,
        best: Box::new(best),
    })
}

/// Two passes of modified Gram-Schmidt against `basis`.
/// Returns the norms after and before projection.
fn orthogonalize(t: &mut [C64], basis: &[Vec<C64>]) -> (f64, f64) {
    let start = norm(t);
    for _ in 0..2 {
        for v in basis {
            let c = dot(v, t);
            t.iter_mut().zip(v).for_each(|(ti, vi)| *ti -= vi * c);
        }
    }
    (norm(t), start)
}
