//! The discrete phase space: an `L x L` torus of side `sqrt(L)` whose cells
//! have side `1/sqrt(L)` in both time and frequency.

use std::ops::Deref;

use serde::Serialize;

use crate::error::{Error, Result};

/// Phase-space lattice for signals of length `L`.
///
/// Index `(m, n)` is time shift `m` and frequency shift `n`. Coordinates are
/// wrapped to the centered range `[-sqrt(L)/2, sqrt(L)/2)`, so index `(0, 0)`
/// is the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PhaseGrid {
    len: usize,
}

impl PhaseGrid {
    pub const MIN_LEN: usize = 4;

    pub fn new(len: usize) -> Result<Self> {
        if len < Self::MIN_LEN {
            return Err(Error::invalid(format!(
                "grid length L={len} is below the minimum {}",
                Self::MIN_LEN
            )));
        }
        Ok(PhaseGrid { len })
    }

    /// Never zero; there is no `is_empty`.
    #[inline]
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.len
    }

    /// Cell side, `1/sqrt(L)`.
    #[inline]
    pub fn delta(&self) -> f64 {
        1.0 / (self.len as f64).sqrt()
    }

    /// Cell area, `1/L`. Equal to `delta()^2`.
    #[inline]
    pub fn cell_measure(&self) -> f64 {
        1.0 / self.len as f64
    }

    /// Side of the torus, `sqrt(L)`.
    #[inline]
    pub fn side(&self) -> f64 {
        (self.len as f64).sqrt()
    }

    /// Number of cells, `L^2`.
    #[inline]
    pub fn cells(&self) -> usize {
        self.len * self.len
    }

    /// Signed representative of index `i` in `[-L/2, L/2)`.
    #[inline]
    pub fn centered_index(&self, i: usize) -> i64 {
        let i = (i % self.len) as i64;
        if 2 * i >= self.len as i64 {
            i - self.len as i64
        } else {
            i
        }
    }

    /// Reduces a signed index onto `[0, L)`.
    #[inline]
    pub fn wrap(&self, i: i64) -> usize {
        i.rem_euclid(self.len as i64) as usize
    }

    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        self.centered_index(i) as f64 * self.delta()
    }

    /// Centered phase-space point `z = (x, xi)` of cell `(m, n)`.
    #[inline]
    pub fn z(&self, m: usize, n: usize) -> (f64, f64) {
        (self.coord(m), self.coord(n))
    }

    /// Storage index of the cell displayed at row `i` of a centered image
    /// (row 0 is the most negative coordinate).
    #[inline]
    pub fn centered_to_storage(&self, i: usize) -> usize {
        (i + self.len - self.len / 2) % self.len
    }

    pub fn ensure_same(&self, other: &PhaseGrid) -> Result<()> {
        if self.len != other.len {
            return Err(Error::GridMismatch {
                expected: self.len,
                found: other.len,
            });
        }
        Ok(())
    }
}

/// Real `L x L` field, row-major in `(m, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: PhaseGrid,
    data: Vec<f64>,
}

impl RealField {
    pub fn zeros(grid: PhaseGrid) -> Self {
        RealField {
            grid,
            data: vec![0.0; grid.cells()],
        }
    }

    pub fn constant(grid: PhaseGrid, value: f64) -> Self {
        RealField {
            grid,
            data: vec![value; grid.cells()],
        }
    }

    pub fn from_vec(grid: PhaseGrid, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.cells() {
            return Err(Error::invalid(format!(
                "field has {} entries, grid L={} needs {}",
                data.len(),
                grid.len(),
                grid.cells()
            )));
        }
        Ok(RealField { grid, data })
    }

    pub fn from_fn(grid: PhaseGrid, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let l = grid.len();
        let mut data = Vec::with_capacity(grid.cells());
        for m in 0..l {
            for n in 0..l {
                data.push(f(m, n));
            }
        }
        RealField { grid, data }
    }

    #[inline]
    pub fn grid(&self) -> PhaseGrid {
        self.grid
    }

    #[inline]
    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.data[m * self.grid.len() + n]
    }

    #[inline]
    pub fn set(&mut self, m: usize, n: usize, value: f64) {
        let l = self.grid.len();
        self.data[m * l + n] = value;
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn row(&self, m: usize) -> &[f64] {
        let l = self.grid.len();
        &self.data[m * l..(m + 1) * l]
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Position `(m, n)` of the largest entry (first in storage order on ties).
    pub fn argmax(&self) -> (usize, usize) {
        let l = self.grid.len();
        let mut best = 0;
        for (i, &v) in self.data.iter().enumerate() {
            if v > self.data[best] {
                best = i;
            }
        }
        (best / l, best % l)
    }

    /// Pointwise difference `self - other`.
    pub fn sub(&self, other: &RealField) -> Result<RealField> {
        self.grid.ensure_same(&other.grid)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(RealField {
            grid: self.grid,
            data,
        })
    }

    /// Toroidal shift: `out(m + dm, n + dn) = self(m, n)`.
    pub fn translated(&self, dm: i64, dn: i64) -> RealField {
        let g = self.grid;
        let l = g.len();
        let mut out = RealField::zeros(g);
        for m in 0..l {
            let mm = g.wrap(m as i64 + dm);
            for n in 0..l {
                let nn = g.wrap(n as i64 + dn);
                out.data[mm * l + nn] = self.data[m * l + n];
            }
        }
        out
    }
}

/// Nonnegative field holding a spectrogram or a sum of spectrograms.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrogramField(RealField);

impl SpectrogramField {
    /// Wraps a field of squared moduli, clamping rounding-level negatives to 0.
    pub fn new(mut field: RealField) -> Result<Self> {
        for v in field.data_mut() {
            if *v < -1e-12 || !v.is_finite() {
                return Err(Error::invalid(format!(
                    "spectrogram entry {v} is negative or not finite"
                )));
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        Ok(SpectrogramField(field))
    }

    pub(crate) fn from_nonnegative(field: RealField) -> Self {
        debug_assert!(field.data().iter().all(|v| *v >= 0.0));
        SpectrogramField(field)
    }

    pub fn into_inner(self) -> RealField {
        self.0
    }
}

impl Deref for SpectrogramField {
    type Target = RealField;

    fn deref(&self) -> &RealField {
        &self.0
    }
}

impl AsRef<RealField> for SpectrogramField {
    fn as_ref(&self) -> &RealField {
        &self.0
    }
}

impl AsRef<RealField> for RealField {
    fn as_ref(&self) -> &RealField {
        self
    }
}
