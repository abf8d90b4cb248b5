use std::cmp::Ordering;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::LocOperator;
use crate::error::{Error, Result};
use crate::grid::PhaseGrid;
use crate::signal::Signal;

/// Sweep cap handed to the dense Hermitian solver.
pub(crate) const MAX_SWEEPS: usize = 1_000_000;

/// Components below this modulus are skipped when fixing eigenvector phases.
const PHASE_EPS: f64 = 1e-10;

/// Eigenpairs of a localization operator, eigenvalues non-increasing.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    grid: PhaseGrid,
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<Signal>,
    complete: bool,
}

impl EigenSystem {
    pub fn grid(&self) -> PhaseGrid {
        self.grid
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &[Signal] {
        &self.eigenvectors
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Whether all `L` eigenpairs are present.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    /// `max_k ||H h_k - lambda_k h_k||`.
    pub fn max_residual(&self, op: &LocOperator) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (lam, h) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let hh = op.apply(h)?;
            let r = hh
                .values()
                .iter()
                .zip(h.values())
                .map(|(a, b)| (a - b * *lam).norm_sqr())
                .sum::<f64>()
                .sqrt();
            worst = worst.max(r);
        }
        Ok(worst)
    }

    /// `max |<h_i, h_j> - delta_ij|`.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.eigenvectors.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let ip = self.eigenvectors[i].inner(&self.eigenvectors[j]);
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((ip - Complex64::new(want, 0.0)).norm());
            }
        }
        worst
    }

    fn from_columns(
        grid: PhaseGrid,
        values: &[f64],
        vectors: &DMatrix<Complex64>,
        keep: usize,
        complete: bool,
    ) -> Result<Self> {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap_or(Ordering::Equal));
        let mut eigenvalues = Vec::with_capacity(keep);
        let mut eigenvectors = Vec::with_capacity(keep);
        for &j in order.iter().take(keep) {
            eigenvalues.push(values[j]);
            let mut v: Vec<Complex64> = vectors.column(j).iter().copied().collect();
            fix_phase(&mut v);
            eigenvectors.push(Signal::new(grid, v)?);
        }
        Ok(EigenSystem {
            grid,
            eigenvalues,
            eigenvectors,
            complete,
        })
    }
}

/// Rotates `v` so its first non-negligible component is positive real.
fn fix_phase(v: &mut [Complex64]) {
    if let Some(p) = v.iter().find(|c| c.norm() > PHASE_EPS) {
        let rot = p.conj() / p.norm();
        for c in v.iter_mut() {
            *c *= rot;
        }
    }
}

/// Full eigendecomposition through the dense matrix.
pub fn eigh(op: &LocOperator) -> Result<EigenSystem> {
    let grid = op.grid();
    let h = op.assemble()?.clone();
    let eig = h.try_symmetric_eigen(f64::EPSILON, MAX_SWEEPS).ok_or_else(|| {
        Error::NumericFailure(format!(
            "dense Hermitian eigensolver did not converge (L={})",
            grid.len()
        ))
    })?;
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    EigenSystem::from_columns(grid, &values, &eig.eigenvectors, grid.len(), true)
}

/// Settings for [`top_eigs_iterative`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterativeOptions {
    /// Extra block columns beyond the `k` requested pairs.
    pub margin: usize,
    pub max_iter: usize,
    /// Residual norm every returned pair must reach.
    pub tol: f64,
    pub seed: u64,
}

impl Default for IterativeOptions {
    fn default() -> Self {
        IterativeOptions {
            margin: 32,
            max_iter: 300,
            tol: 1e-10,
            seed: 0,
        }
    }
}

/// The `k` leading eigenpairs by block subspace iteration with Rayleigh-Ritz
/// extraction, using only matrix-free applications of `op`.
///
/// Requires `k + 10 <= L`; asking for the whole spectrum (`k = L`) is an
/// invalid argument, use [`eigh`] for that.
pub fn top_eigs_iterative(
    op: &LocOperator,
    k: usize,
    opts: &IterativeOptions,
) -> Result<EigenSystem> {
    let grid = op.grid();
    let l = grid.len();
    if k == 0 || k + 10 > l {
        return Err(Error::invalid(format!(
            "iterative solver needs 1 <= k <= L - 10, got k={k}, L={l}"
        )));
    }
    let p = (k + opts.margin).min(l);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let start: Vec<Signal> = (0..p).map(|_| Signal::random_with(grid, &mut rng)).collect();
    let mut x = DMatrix::<Complex64>::from_fn(l, p, |t, j| start[j].values()[t]);
    x = x.qr().q();

    let mut worst = f64::INFINITY;
    for iter in 0..opts.max_iter {
        let cols: Vec<Vec<Complex64>> = x.column_iter().map(|c| c.iter().copied().collect()).collect();
        let images = op.apply_block(&cols);
        let y = DMatrix::<Complex64>::from_fn(l, p, |t, j| images[j][t]);

        let t = x.adjoint() * &y;
        let t = (&t + t.adjoint()) * Complex64::new(0.5, 0.0);
        let small = t.try_symmetric_eigen(f64::EPSILON, MAX_SWEEPS).ok_or_else(|| {
            Error::NumericFailure("projected eigenproblem did not converge".into())
        })?;
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| {
            small.eigenvalues[b]
                .partial_cmp(&small.eigenvalues[a])
                .unwrap_or(Ordering::Equal)
        });
        let w = DMatrix::<Complex64>::from_fn(p, p, |i, j| small.eigenvectors[(i, order[j])]);
        let theta: Vec<f64> = order.iter().map(|&j| small.eigenvalues[j]).collect();
        let ritz = &x * &w;
        let images = &y * &w;

        worst = (0..k)
            .map(|j| {
                let r = images.column(j) - ritz.column(j) * Complex64::new(theta[j], 0.0);
                r.norm()
            })
            .fold(0.0, f64::max);
        log::debug!("subspace iteration {iter}: max residual {worst:.3e}");
        if worst <= opts.tol {
            return EigenSystem::from_columns(grid, &theta[..k], &ritz.columns(0, k).into_owned(), k, false);
        }
        x = images.qr().q();
    }
    Err(Error::NumericFailure(format!(
        "subspace iteration stalled after {} iterations (residual {worst:.3e}, k={k}, L={l})",
        opts.max_iter
    )))
}
