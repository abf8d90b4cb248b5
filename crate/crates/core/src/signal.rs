//! Finite signals on the grid and the analysis windows built from them.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::PhaseGrid;

/// Number of wrap terms on each side used when periodizing continuous
/// windows onto the torus.
const WRAP_TERMS: i64 = 3;

/// Complex vector of length `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    grid: PhaseGrid,
    values: Vec<Complex64>,
}

impl Signal {
    pub fn new(grid: PhaseGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(format!(
                "signal has length {}, grid expects L={}",
                values.len(),
                grid.len()
            )));
        }
        Ok(Signal { grid, values })
    }

    pub fn from_real(grid: PhaseGrid, values: &[f64]) -> Result<Self> {
        Signal::new(grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(grid: PhaseGrid) -> Self {
        Signal {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Unit impulse at sample `t`.
    pub fn impulse(grid: PhaseGrid, t: usize) -> Self {
        let mut s = Signal::zeros(grid);
        s.values[t % grid.len()] = Complex64::new(1.0, 0.0);
        s
    }

    /// Unit-norm vector with i.i.d. complex Gaussian entries.
    pub fn random(grid: PhaseGrid, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(grid, &mut rng)
    }

    pub fn random_with<R: Rng + ?Sized>(grid: PhaseGrid, rng: &mut R) -> Self {
        let values = (0..grid.len())
            .map(|_| Complex64::new(standard_normal(rng), standard_normal(rng)))
            .collect();
        Signal { grid, values }.normalized()
    }

    /// Sampled and periodized Hermite function `h_k`, scaled to unit norm.
    ///
    /// `h_0(t) = 2^{1/4} e^{-pi t^2}`; higher orders follow the three-term
    /// recurrence of the orthonormal Hermite functions at scale `sqrt(2 pi)`.
    pub fn hermite(grid: PhaseGrid, k: usize) -> Self {
        let s = Signal::periodized(grid, |t| hermite_function(k, t));
        s.normalized()
    }

    /// Samples `f` at `t * delta` summed over `WRAP_TERMS` periods on each side.
    pub(crate) fn periodized(grid: PhaseGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|t| {
                let x = grid.coord(t);
                let v: f64 = (-WRAP_TERMS..=WRAP_TERMS)
                    .map(|j| f(x - j as f64 * grid.side()))
                    .sum();
                Complex64::new(v, 0.0)
            })
            .collect();
        Signal { grid, values }
    }

    #[inline]
    pub fn grid(&self) -> PhaseGrid {
        self.grid
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Returns the signal scaled to unit norm (zero signals are returned as is).
    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            for v in &mut self.values {
                *v /= n;
            }
        }
        self
    }

    /// `<self, other> = sum self(t) conj(other(t))`.
    pub fn inner(&self, other: &Signal) -> Complex64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    /// Time shift by `m` samples followed by modulation by `n`:
    /// `t -> f(t - m) e^{2 pi i n t / L}`.
    pub fn time_frequency_shift(&self, m: i64, n: i64) -> Signal {
        let g = self.grid;
        let l = g.len();
        let values = (0..l)
            .map(|t| {
                let src = g.wrap(t as i64 - m);
                let phase = 2.0 * PI * ((n.rem_euclid(l as i64) as usize * t) % l) as f64
                    / l as f64;
                self.values[src] * Complex64::from_polar(1.0, phase)
            })
            .collect();
        Signal { grid: g, values }
    }
}

/// Continuous Hermite function of order `k` with `h_0(t) = 2^{1/4} e^{-pi t^2}`.
pub fn hermite_function(k: usize, t: f64) -> f64 {
    // psi_k(x) with x = sqrt(2 pi) t, times (2 pi)^{1/4}.
    let x = (2.0 * PI).sqrt() * t;
    let scale = (2.0 * PI).powf(0.25);
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * x * x).exp();
    for j in 0..k {
        let next = (2.0 / (j as f64 + 1.0)).sqrt() * x * cur
            - (j as f64 / (j as f64 + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    scale * cur
}

fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller; one of the pair is discarded to keep the stream simple.
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// Description of a window, as used by configs and the command line.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum WindowSpec {
    #[default]
    Gaussian,
    /// `cos^2` bump of total width `width` (continuous units).
    Hann {
        #[serde(default = "default_hann_width")]
        width: f64,
    },
    /// Indicator of `[-width/2, width/2]` (continuous units).
    Boxcar {
        #[serde(default = "default_boxcar_width")]
        width: f64,
    },
    /// Real or complex samples from a CSV file.
    File { path: String },
}

fn default_hann_width() -> f64 {
    2.0
}

fn default_boxcar_width() -> f64 {
    1.0
}

impl WindowSpec {
    pub fn build(&self, grid: PhaseGrid) -> Result<Window> {
        match self {
            WindowSpec::Gaussian => Ok(Window::gaussian(grid)),
            WindowSpec::Hann { width } => Window::hann(grid, *width),
            WindowSpec::Boxcar { width } => Window::boxcar(grid, *width),
            WindowSpec::File { path } => {
                let signal = crate::io::read_signal_csv(path, grid)?;
                Window::from_signal(signal)
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            WindowSpec::Gaussian => "gaussian".into(),
            WindowSpec::Hann { width } => format!("hann:{width}"),
            WindowSpec::Boxcar { width } => format!("boxcar:{width}"),
            WindowSpec::File { path } => format!("file:{path}"),
        }
    }
}

impl std::str::FromStr for WindowSpec {
    type Err = Error;

    /// Parses `gaussian`, `hann[:width]`, `boxcar[:width]` or `file:path`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        let width = |default: f64| -> Result<f64> {
            match arg {
                None => Ok(default),
                Some(a) => a
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad window width '{a}'"))),
            }
        };
        match kind {
            "gaussian" => Ok(WindowSpec::Gaussian),
            "hann" => Ok(WindowSpec::Hann {
                width: width(default_hann_width())?,
            }),
            "boxcar" => Ok(WindowSpec::Boxcar {
                width: width(default_boxcar_width())?,
            }),
            "file" => match arg {
                Some(p) if !p.is_empty() => Ok(WindowSpec::File { path: p.into() }),
                _ => Err(Error::Parse("file window needs a path".into())),
            },
            other => Err(Error::Parse(format!("unknown window '{other}'"))),
        }
    }
}

/// Unit-norm analysis window.
#[derive(Debug, Clone)]
pub struct Window {
    signal: Signal,
    /// Norm of the samples before normalization.
    raw_norm: f64,
    mstar_sq: OnceLock<f64>,
}

impl Window {
    /// Wraps `signal` as a window, rescaling it to unit norm.
    pub fn from_signal(signal: Signal) -> Result<Self> {
        let raw_norm = signal.norm();
        if !(raw_norm > 0.0) || !raw_norm.is_finite() {
            return Err(Error::invalid("window must have finite nonzero norm"));
        }
        Ok(Window {
            signal: signal.normalized(),
            raw_norm,
            mstar_sq: OnceLock::new(),
        })
    }

    /// Periodized sampled Gaussian `e^{-pi t^2}`, normalized.
    pub fn gaussian(grid: PhaseGrid) -> Self {
        let s = Signal::periodized(grid, |t| (-PI * t * t).exp());
        Window::from_signal(s).expect("gaussian samples are nonzero")
    }

    /// `cos^2(pi t / width)` on `|t| < width/2`, normalized.
    pub fn hann(grid: PhaseGrid, width: f64) -> Result<Self> {
        Self::check_width(grid, width)?;
        let s = Signal::periodized(grid, |t| {
            if t.abs() < width / 2.0 {
                (PI * t / width).cos().powi(2)
            } else {
                0.0
            }
        });
        Window::from_signal(s)
    }

    /// Indicator of `|t| <= width/2`, normalized.
    pub fn boxcar(grid: PhaseGrid, width: f64) -> Result<Self> {
        Self::check_width(grid, width)?;
        let s = Signal::periodized(grid, |t| if t.abs() <= width / 2.0 { 1.0 } else { 0.0 });
        Window::from_signal(s)
    }

    fn check_width(grid: PhaseGrid, width: f64) -> Result<()> {
        if !(width > 0.0) || width > grid.side() {
            return Err(Error::invalid(format!(
                "window width {width} must lie in (0, {}]",
                grid.side()
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn grid(&self) -> PhaseGrid {
        self.signal.grid()
    }

    #[inline]
    pub fn signal(&self) -> &Signal {
        &self.signal
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        self.signal.values()
    }

    /// Euclidean norm of the stored samples (1 up to rounding).
    pub fn l2_norm(&self) -> f64 {
        self.signal.norm()
    }

    pub fn raw_norm(&self) -> f64 {
        self.raw_norm
    }

    pub(crate) fn mstar_cache(&self) -> &OnceLock<f64> {
        &self.mstar_sq
    }

    pub fn same_samples(&self, other: &Window) -> bool {
        self.signal == other.signal
    }
}
