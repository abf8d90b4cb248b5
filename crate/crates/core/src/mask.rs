//! Phase-space domains, operator symbols and their discrete geometry.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{PhaseGrid, RealField};

/// Boolean domain on the phase-space grid.
///
/// Area is `#cells / L`; perimeter is the number of 4-neighbour toroidal
/// edges separating an inside cell from an outside cell, times `delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainMask {
    grid: PhaseGrid,
    cells: Vec<bool>,
    count: usize,
    boundary_edges: usize,
}

impl DomainMask {
    pub fn from_cells(grid: PhaseGrid, cells: Vec<bool>) -> Result<Self> {
        if cells.len() != grid.cells() {
            return Err(Error::invalid(format!(
                "mask has {} cells, grid L={} needs {}",
                cells.len(),
                grid.len(),
                grid.cells()
            )));
        }
        let count = cells.iter().filter(|&&c| c).count();
        let boundary_edges = count_boundary_edges(grid, &cells);
        Ok(DomainMask {
            grid,
            cells,
            count,
            boundary_edges,
        })
    }

    pub fn from_fn(grid: PhaseGrid, mut inside: impl FnMut(usize, usize) -> bool) -> Self {
        let l = grid.len();
        let mut cells = Vec::with_capacity(grid.cells());
        for m in 0..l {
            for n in 0..l {
                cells.push(inside(m, n));
            }
        }
        Self::from_cells(grid, cells).expect("cell count matches grid")
    }

    pub fn empty(grid: PhaseGrid) -> Self {
        Self::from_fn(grid, |_, _| false)
    }

    pub fn full(grid: PhaseGrid) -> Self {
        Self::from_fn(grid, |_, _| true)
    }

    /// Closed disk `|z - center| <= radius`.
    ///
    /// The disk enlarged by `2 delta` must stay inside the centered
    /// fundamental domain, otherwise the mask would wrap around the torus.
    pub fn disk(grid: PhaseGrid, center: (f64, f64), radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::invalid(format!("disk radius {radius} must be >= 0")));
        }
        check_fits(grid, center, (radius, radius))?;
        if radius == 0.0 {
            // A zero-radius disk has measure zero.
            return Ok(Self::empty(grid));
        }
        let r2 = radius * radius;
        Ok(Self::from_fn(grid, |m, n| {
            let (x, xi) = grid.z(m, n);
            let (dx, dy) = (x - center.0, xi - center.1);
            dx * dx + dy * dy <= r2
        }))
    }

    /// Axis-aligned rectangle `|x - cx| <= width/2`, `|xi - cy| <= height/2`.
    pub fn rectangle(grid: PhaseGrid, center: (f64, f64), width: f64, height: f64) -> Result<Self> {
        if !(width >= 0.0 && height >= 0.0) {
            return Err(Error::invalid("rectangle sides must be >= 0"));
        }
        check_fits(grid, center, (width / 2.0, height / 2.0))?;
        Ok(Self::from_fn(grid, |m, n| {
            let (x, xi) = grid.z(m, n);
            (x - center.0).abs() <= width / 2.0 && (xi - center.1).abs() <= height / 2.0
        }))
    }

    /// Block of `rows x cols` cells whose lowest centered index is `(m0, n0)`.
    pub fn cell_block(grid: PhaseGrid, m0: i64, n0: i64, rows: usize, cols: usize) -> Self {
        let l = grid.len() as i64;
        let inside = |start: i64, size: usize, i: usize| -> bool {
            let off = (i as i64 - start).rem_euclid(l);
            off < size as i64
        };
        Self::from_fn(grid, |m, n| inside(m0, rows, m) && inside(n0, cols, n))
    }

    /// L-shaped domain: a `size x size` square with its upper-right quarter
    /// removed, centered at the origin.
    pub fn l_shape(grid: PhaseGrid, size: f64) -> Result<Self> {
        let square = Self::rectangle(grid, (0.0, 0.0), size, size)?;
        let h = size / 2.0;
        Ok(Self::from_fn(grid, |m, n| {
            let (x, xi) = grid.z(m, n);
            square.contains(m, n) && !(x > 0.0 && xi > 0.0 && x <= h && xi <= h)
        }))
    }

    /// Union of `count` random disks with radii in `[0.3, 1.0] * extent / 2`
    /// and centers in `[-extent, extent]^2`.
    pub fn random_blobs(grid: PhaseGrid, count: usize, extent: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut disks = Vec::with_capacity(count);
        for _ in 0..count {
            let r = extent / 2.0 * rng.random_range(0.3..=1.0);
            let c = (
                rng.random_range(-extent..=extent),
                rng.random_range(-extent..=extent),
            );
            check_fits(grid, c, (r, r))?;
            disks.push((c, r));
        }
        Ok(Self::from_fn(grid, |m, n| {
            let (x, xi) = grid.z(m, n);
            disks.iter().any(|&((cx, cy), r)| {
                let (dx, dy) = (x - cx, xi - cy);
                dx * dx + dy * dy <= r * r
            })
        }))
    }

    /// Uniformly random cells with inclusion probability `density`.
    pub fn random_cells(grid: PhaseGrid, density: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::from_fn(grid, |_, _| rng.random_bool(density.clamp(0.0, 1.0)))
    }

    #[inline]
    pub fn grid(&self) -> PhaseGrid {
        self.grid
    }

    #[inline]
    pub fn contains(&self, m: usize, n: usize) -> bool {
        self.cells[m * self.grid.len() + n]
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    /// Number of inside cells.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn boundary_edges(&self) -> usize {
        self.boundary_edges
    }

    pub fn area(&self) -> f64 {
        self.count as f64 * self.grid.cell_measure()
    }

    pub fn perimeter(&self) -> f64 {
        self.boundary_edges as f64 * self.grid.delta()
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn is_full(&self) -> bool {
        self.count == self.grid.cells()
    }

    pub fn indicator(&self) -> RealField {
        let data = self.cells.iter().map(|&c| if c { 1.0 } else { 0.0 }).collect();
        RealField::from_vec(self.grid, data).expect("same size")
    }

    pub fn symbol(&self) -> SymbolField {
        SymbolField {
            field: self.indicator(),
            bounded: true,
        }
    }

    /// Toroidal translation by `(dm, dn)` cells.
    pub fn translated(&self, dm: i64, dn: i64) -> DomainMask {
        let g = self.grid;
        let l = g.len();
        let mut cells = vec![false; g.cells()];
        for m in 0..l {
            let mm = g.wrap(m as i64 + dm);
            for n in 0..l {
                cells[mm * l + g.wrap(n as i64 + dn)] = self.cells[m * l + n];
            }
        }
        DomainMask::from_cells(g, cells).expect("same size")
    }

    /// Smallest centered box `[lo, hi]` (in signed indices) enclosing the mask
    /// along each axis, or `None` for an empty mask.
    pub fn bounding_rows(&self) -> Option<(i64, i64)> {
        let l = self.grid.len();
        let rows: Vec<i64> = (0..l)
            .filter(|&m| self.cells[m * l..(m + 1) * l].iter().any(|&c| c))
            .map(|m| self.grid.centered_index(m))
            .collect();
        Some((*rows.iter().min()?, *rows.iter().max()?))
    }
}

fn check_fits(grid: PhaseGrid, center: (f64, f64), half_extent: (f64, f64)) -> Result<()> {
    let limit = grid.side() / 2.0;
    let margin = 2.0 * grid.delta();
    let reach_x = center.0.abs() + half_extent.0 + margin;
    let reach_y = center.1.abs() + half_extent.1 + margin;
    if reach_x >= limit || reach_y >= limit {
        return Err(Error::DomainOverflow(format!(
            "shape reaches {:.4} but the grid L={} only extends to {:.4}",
            reach_x.max(reach_y),
            grid.len(),
            limit
        )));
    }
    Ok(())
}

fn count_boundary_edges(grid: PhaseGrid, cells: &[bool]) -> usize {
    let l = grid.len();
    let mut edges = 0;
    for m in 0..l {
        let down = ((m + 1) % l) * l;
        for n in 0..l {
            let here = cells[m * l + n];
            edges += (here != cells[down + n]) as usize;
            edges += (here != cells[m * l + (n + 1) % l]) as usize;
        }
    }
    edges
}

/// Anisotropic total variation with toroidal differences:
/// `delta * sum |F(m+1,n) - F(m,n)| + |F(m,n+1) - F(m,n)|`.
pub fn variation(field: &RealField) -> f64 {
    let g = field.grid();
    let l = g.len();
    let d = field.data();
    let mut total = 0.0;
    for m in 0..l {
        let down = ((m + 1) % l) * l;
        for n in 0..l {
            let here = d[m * l + n];
            total += (d[down + n] - here).abs() + (d[m * l + (n + 1) % l] - here).abs();
        }
    }
    g.delta() * total
}

/// Real symbol of a localization operator.
///
/// Symbols built by [`SymbolField::new`] take values in `[0, 1]`; signed
/// symbols (differences of two symbols) come from [`SymbolField::signed`].
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolField {
    field: RealField,
    bounded: bool,
}

impl SymbolField {
    /// Tolerated overshoot outside `[0, 1]`, clamped away.
    pub const CLAMP_SLACK: f64 = 1e-8;

    pub fn new(mut field: RealField) -> Result<Self> {
        for v in field.data_mut() {
            if !v.is_finite() || *v < -Self::CLAMP_SLACK || *v > 1.0 + Self::CLAMP_SLACK {
                return Err(Error::invalid(format!("symbol value {v} outside [0, 1]")));
            }
            *v = v.clamp(0.0, 1.0);
        }
        Ok(SymbolField {
            field,
            bounded: true,
        })
    }

    pub fn signed(field: RealField) -> Result<Self> {
        if field.data().iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("symbol has non-finite entries"));
        }
        Ok(SymbolField {
            field,
            bounded: false,
        })
    }

    pub fn zeros(grid: PhaseGrid) -> Self {
        SymbolField {
            field: RealField::zeros(grid),
            bounded: true,
        }
    }

    #[inline]
    pub fn grid(&self) -> PhaseGrid {
        self.field.grid()
    }

    #[inline]
    pub fn field(&self) -> &RealField {
        &self.field
    }

    /// Whether values are known to lie in `[0, 1]`.
    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    /// Whether every value is exactly 0 or 1.
    pub fn is_boolean(&self) -> bool {
        self.field.data().iter().all(|&v| v == 0.0 || v == 1.0)
    }

    /// `self - other` as a signed symbol.
    pub fn difference(&self, other: &SymbolField) -> Result<SymbolField> {
        SymbolField::signed(self.field.sub(&other.field)?)
    }
}
