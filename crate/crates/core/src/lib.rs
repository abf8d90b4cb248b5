//! Time-frequency localization on a discrete Gabor grid.
//!
//! Signals of length `L` live on a phase-space torus of `L x L` cells with
//! side `1/sqrt(L)`. On that grid this crate builds localization operators,
//! their eigensystems and accumulated spectrograms, and measures how fast the
//! accumulated spectrogram of a domain approaches the domain's indicator.
//!
//! Modules:
//! - [`grid`], [`signal`], [`mask`]: the discretization (grid, windows,
//!   domains, area, perimeter, variation).
//! - [`tfa`]: STFT, spectrograms, ambiguity function, convolution.
//! - [`locop`]: localization operators, traces, eigensolvers.
//! - [`accspec`]: accumulated spectrograms and their error decomposition.
//! - [`oracle`]: closed-form Gaussian window / disk reference.
//! - [`harness`]: radius sweeps, rate fits and inequality checks.
//! - [`io`]: CSV / PGM / JSON / PBM readers and writers.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod accspec;
pub mod error;
pub mod grid;
pub mod harness;
pub mod io;
pub mod locop;
pub mod mask;
pub mod oracle;
pub mod signal;
pub mod tfa;

pub use error::{Error, Result};
pub use grid::{PhaseGrid, RealField, SpectrogramField};
pub use locop::{EigenSystem, LocOperator};
pub use mask::{DomainMask, SymbolField};
pub use signal::{Signal, Window, WindowSpec};
