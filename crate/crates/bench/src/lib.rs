//! Shared fixtures for the benchmarks.

use tfloc::{DomainMask, LocOperator, PhaseGrid, Signal, Window};

/// Centered disk operator with the Gaussian window.
pub struct DiskFixture {
    pub grid: PhaseGrid,
    pub window: Window,
    pub mask: DomainMask,
    pub op: LocOperator,
    pub signal: Signal,
}

impl DiskFixture {
    pub fn new(len: usize, radius: f64) -> Self {
        let grid = PhaseGrid::new(len).expect("benchmark grid");
        let window = Window::gaussian(grid);
        let mask = DomainMask::disk(grid, (0.0, 0.0), radius).expect("disk fits the grid");
        let op = LocOperator::from_mask(&mask, window.clone()).expect("unit window");
        DiskFixture {
            grid,
            window,
            mask,
            op,
            signal: Signal::random(grid, 7),
        }
    }
}
