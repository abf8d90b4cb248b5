//! Localization operators
//! `H_m f = cell_measure * sum_{m,n} symbol(m,n) V_g f(m,n) pi(m,n) g`.

mod eigen;

pub use eigen::{eigh, top_eigs_iterative, EigenSystem, IterativeOptions};

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{PhaseGrid, SpectrogramField};
use crate::mask::{DomainMask, SymbolField};
use crate::signal::{Signal, Window};
use crate::tfa::{self, analysis_row, FftPair};

/// Largest `L` for which a dense matrix is formed.
pub const MAX_DENSE_LEN: usize = 4096;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Localization operator with a general real symbol.
#[derive(Debug, Clone)]
pub struct LocOperator {
    symbol: SymbolField,
    window: Window,
    /// Rows `m` with at least one nonzero symbol entry.
    active_rows: Vec<usize>,
    fft: FftPair,
    dense: OnceLock<DMatrix<Complex64>>,
}

impl LocOperator {
    pub fn new(symbol: SymbolField, window: Window) -> Result<Self> {
        let grid = symbol.grid();
        grid.ensure_same(&window.grid())?;
        tfa::ensure_unit_window(&window)?;
        let l = grid.len();
        let active_rows = (0..l)
            .filter(|&m| symbol.field().row(m).iter().any(|&v| v != 0.0))
            .collect();
        Ok(LocOperator {
            symbol,
            window,
            active_rows,
            fft: FftPair::new(l),
            dense: OnceLock::new(),
        })
    }

    pub fn from_mask(mask: &DomainMask, window: Window) -> Result<Self> {
        Self::new(mask.symbol(), window)
    }

    #[inline]
    pub fn grid(&self) -> PhaseGrid {
        self.symbol.grid()
    }

    pub fn symbol(&self) -> &SymbolField {
        &self.symbol
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    /// Matrix-free application; `O(r L log L)` for `r` active symbol rows.
    pub fn apply(&self, f: &Signal) -> Result<Signal> {
        self.grid().ensure_same(&f.grid())?;
        let l = self.grid().len();
        let mut out = vec![ZERO; l];
        let mut buf = vec![ZERO; l];
        let mut scratch = self.fft.scratch();
        self.apply_into(f.values(), &mut out, &mut buf, &mut scratch);
        Signal::new(self.grid(), out)
    }

    fn apply_into(
        &self,
        f: &[Complex64],
        out: &mut [Complex64],
        buf: &mut [Complex64],
        scratch: &mut [Complex64],
    ) {
        let l = f.len();
        let g = self.window.values();
        let cell = self.grid().cell_measure();
        out.fill(ZERO);
        for &m in &self.active_rows {
            analysis_row(f, g, m, buf, self.fft.fwd.as_ref(), scratch);
            for (v, &s) in buf.iter_mut().zip(self.symbol.field().row(m)) {
                *v *= s;
            }
            self.fft.inv.process_with_scratch(buf, scratch);
            for t in 0..l {
                let gi = if t >= m { t - m } else { t + l - m };
                out[t] += buf[t] * g[gi] * cell;
            }
        }
    }

    /// Applies the operator to every signal of a block, one job per signal.
    pub fn apply_block(&self, fs: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        let l = self.grid().len();
        fs.par_iter()
            .map_init(
                || (vec![ZERO; l], self.fft.scratch()),
                |(buf, scratch), f| {
                    let mut out = vec![ZERO; l];
                    self.apply_into(f, &mut out, buf, scratch);
                    out
                },
            )
            .collect()
    }

    /// Dense matrix
    /// `H[t,s] = sum_m g(t-m) conj(g(s-m)) c_m(t-s)`, where `c_m` is the
    /// normalized inverse DFT of symbol row `m`. Cached after the first call.
    pub fn assemble(&self) -> Result<&DMatrix<Complex64>> {
        if let Some(h) = self.dense.get() {
            return Ok(h);
        }
        let h = self.build_dense()?;
        let _ = self.dense.set(h);
        Ok(self.dense.get().expect("just set"))
    }

    fn build_dense(&self) -> Result<DMatrix<Complex64>> {
        let l = self.grid().len();
        if l > MAX_DENSE_LEN {
            return Err(Error::ResourceLimit(format!(
                "dense assembly needs L <= {MAX_DENSE_LEN}, got L={l}"
            )));
        }
        let g = self.window.values();
        let cell = self.grid().cell_measure();
        let mut scratch = self.fft.scratch();
        let kernels: Vec<(usize, Vec<Complex64>)> = self
            .active_rows
            .iter()
            .map(|&m| {
                let mut c: Vec<Complex64> = self
                    .symbol
                    .field()
                    .row(m)
                    .iter()
                    .map(|&v| Complex64::new(v * cell, 0.0))
                    .collect();
                self.fft.inv.process_with_scratch(&mut c, &mut scratch);
                (m, c)
            })
            .collect();

        let mut h = DMatrix::<Complex64>::zeros(l, l);
        // Column s of a column-major matrix is contiguous.
        h.as_mut_slice()
            .par_chunks_mut(l)
            .enumerate()
            .for_each(|(s, col)| {
                for (m, c) in &kernels {
                    let gs = g[(s + l - m) % l].conj();
                    if gs == ZERO {
                        continue;
                    }
                    for t in 0..l {
                        let gt = g[if t >= *m { t - m } else { t + l - m }];
                        if gt == ZERO {
                            continue;
                        }
                        let d = if t >= s { t - s } else { t + l - s };
                        col[t] += gt * gs * c[d];
                    }
                }
            });
        Ok(h)
    }

    /// `trace(H) = cell_measure * sum symbol`.
    pub fn trace_symbol(&self) -> f64 {
        self.grid().cell_measure() * self.symbol.field().sum()
    }

    /// `trace(H^2)` for a 0/1 symbol, as
    /// `cell_measure * sum_{Omega} (1_Omega * |V_g g|^2)`.
    pub fn trace_square_ambiguity(&self) -> Result<f64> {
        let phi = tfa::ambiguity_sq(&self.window);
        self.trace_square_with(&phi)
    }

    /// As [`trace_square_ambiguity`](Self::trace_square_ambiguity) with a
    /// precomputed `|V_g g|^2`.
    pub fn trace_square_with(&self, ambiguity: &SpectrogramField) -> Result<f64> {
        if !self.symbol.is_boolean() {
            return Err(Error::UnsupportedSymbol(
                "trace of H^2 via the ambiguity function needs a 0/1 symbol".into(),
            ));
        }
        self.grid().ensure_same(&ambiguity.grid())?;
        if self.active_rows.is_empty() {
            return Ok(0.0);
        }
        let ind = self.symbol.field();
        let smoothed = tfa::circ_convolve(ind, ambiguity)?;
        let inside: f64 = ind
            .data()
            .iter()
            .zip(smoothed.data())
            .filter(|(&s, _)| s == 1.0)
            .map(|(_, &v)| v)
            .sum();
        Ok(self.grid().cell_measure() * inside)
    }

    /// `<H f, f>`.
    pub fn quadratic_form(&self, f: &Signal) -> Result<f64> {
        Ok(self.apply(f)?.inner(f).re)
    }
}

/// Trace norm `||H_a - H_b||_{S^1}` of the operator with symbol `a - b`.
pub fn trace_norm_diff(a: &LocOperator, b: &LocOperator) -> Result<f64> {
    a.grid().ensure_same(&b.grid())?;
    if !a.window.same_samples(&b.window) {
        return Err(Error::invalid("trace_norm_diff needs operators with the same window"));
    }
    let diff = LocOperator::new(a.symbol.difference(&b.symbol)?, a.window.clone())?;
    if diff.active_rows.is_empty() {
        return Ok(0.0);
    }
    let h = diff.assemble()?.clone();
    let eig = h
        .try_symmetric_eigen(f64::EPSILON, eigen::MAX_SWEEPS)
        .ok_or_else(|| Error::NumericFailure("Hermitian eigensolver did not converge".into()))?;
    Ok(eig.eigenvalues.iter().map(|v| v.abs()).sum())
}
