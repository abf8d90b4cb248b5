//! Discrete short-time Fourier transform on the full `L x L` lattice and the
//! phase-space field utilities built on it.
//!
//! `V_g f(m, n) = sum_t f(t) conj(g(t - m)) e^{-2 pi i n t / L}`; row `m` of
//! every field is one length-`L` FFT.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{PhaseGrid, RealField, SpectrogramField};
use crate::signal::{Signal, Window};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Forward and inverse plans for one transform length.
#[derive(Clone)]
pub(crate) struct FftPair {
    pub fwd: Arc<dyn Fft<f64>>,
    pub inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FftPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FftPair(len={})", self.fwd.len())
    }
}

impl FftPair {
    pub fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        FftPair {
            fwd: planner.plan_fft_forward(len),
            inv: planner.plan_fft_inverse(len),
        }
    }

    pub fn scratch(&self) -> Vec<Complex64> {
        let n = self
            .fwd
            .get_inplace_scratch_len()
            .max(self.inv.get_inplace_scratch_len());
        vec![ZERO; n]
    }
}

/// Fills `buf` with row `m` of `V_g f`.
#[inline]
pub(crate) fn analysis_row(
    f: &[Complex64],
    g: &[Complex64],
    m: usize,
    buf: &mut [Complex64],
    fft: &dyn Fft<f64>,
    scratch: &mut [Complex64],
) {
    let l = f.len();
    let split = m.min(l);
    // g index (t - m) mod L, split at t = m to avoid a modulo per sample.
    for t in 0..split {
        buf[t] = f[t] * g[t + l - m].conj();
    }
    for t in split..l {
        buf[t] = f[t] * g[t - m].conj();
    }
    fft.process_with_scratch(buf, scratch);
}

/// Short-time Fourier transform sampled on every lattice point.
#[derive(Debug, Clone)]
pub struct StftField {
    grid: PhaseGrid,
    values: Vec<Complex64>,
}

impl StftField {
    pub fn grid(&self) -> PhaseGrid {
        self.grid
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.values[m * self.grid.len() + n]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn modulus_sq(&self) -> SpectrogramField {
        let data = self.values.iter().map(|v| v.norm_sqr()).collect();
        SpectrogramField::from_nonnegative(RealField::from_vec(self.grid, data).expect("size"))
    }
}

pub fn stft(f: &Signal, g: &Window) -> Result<StftField> {
    let grid = f.grid();
    grid.ensure_same(&g.grid())?;
    let l = grid.len();
    let fft = FftPair::new(l);
    let mut values = vec![ZERO; grid.cells()];
    values
        .par_chunks_mut(l)
        .enumerate()
        .for_each_init(
            || fft.scratch(),
            |scratch, (m, row)| {
                analysis_row(f.values(), g.values(), m, row, fft.fwd.as_ref(), scratch)
            },
        );
    Ok(StftField { grid, values })
}

/// `|V_g f|^2`, computed row by row without storing the complex transform.
pub fn spectrogram(f: &Signal, g: &Window) -> Result<SpectrogramField> {
    f.grid().ensure_same(&g.grid())?;
    Ok(accumulate_spectrograms(std::slice::from_ref(f), g))
}

/// Pointwise sum of `|V_g f_k|^2` over `signals`, in the given order.
pub(crate) fn accumulate_spectrograms(signals: &[Signal], g: &Window) -> SpectrogramField {
    let grid = g.grid();
    let l = grid.len();
    let fft = FftPair::new(l);
    let mut out = RealField::zeros(grid);
    out.data_mut()
        .par_chunks_mut(l)
        .enumerate()
        .for_each_init(
            || (vec![ZERO; l], fft.scratch()),
            |(buf, scratch), (m, row)| {
                for f in signals {
                    analysis_row(f.values(), g.values(), m, buf, fft.fwd.as_ref(), scratch);
                    for (r, v) in row.iter_mut().zip(buf.iter()) {
                        *r += v.norm_sqr();
                    }
                }
            },
        );
    SpectrogramField::from_nonnegative(out)
}

/// `|V_g g|^2` with entry `(0, 0)` at `z = 0`.
pub fn ambiguity_sq(g: &Window) -> SpectrogramField {
    accumulate_spectrograms(std::slice::from_ref(g.signal()), g)
}

/// `||g||^2_{M*} = int |z|_1 |V_g g(z)|^2 dz` on the grid, with the l1 norm
/// of the centered coordinates. Cached on the window.
pub fn mstar_norm(g: &Window) -> f64 {
    *g.mstar_cache()
        .get_or_init(|| moment(&ambiguity_sq(g), |x, xi| x.abs() + xi.abs()))
}

/// Same moment with the Euclidean `|z|_2`; reported alongside the l1 value.
pub fn mstar_norm_l2(g: &Window) -> f64 {
    moment(&ambiguity_sq(g), |x, xi| x.hypot(xi))
}

/// `cell_measure * sum w(z) phi(z)` over the grid.
pub fn moment(phi: &RealField, weight: impl Fn(f64, f64) -> f64) -> f64 {
    let grid = phi.grid();
    let l = grid.len();
    let mut total = 0.0;
    for m in 0..l {
        let x = grid.coord(m);
        let row = phi.row(m);
        for (n, &v) in row.iter().enumerate() {
            total += weight(x, grid.coord(n)) * v;
        }
    }
    grid.cell_measure() * total
}

/// In-place 2-D DFT of a row-major `l x l` buffer.
fn fft2(buf: &mut [Complex64], l: usize, fft: &dyn Fft<f64>) {
    const BATCH: usize = 16;
    buf.par_chunks_mut(l).for_each_init(
        || vec![ZERO; fft.get_inplace_scratch_len()],
        |scratch, row| fft.process_with_scratch(row, scratch),
    );
    // Columns in batches: gather into contiguous scratch, transform, scatter.
    let mut cols = vec![ZERO; BATCH * l];
    let mut scratch = vec![ZERO; fft.get_inplace_scratch_len()];
    let mut c0 = 0;
    while c0 < l {
        let width = BATCH.min(l - c0);
        for r in 0..l {
            let src = &buf[r * l + c0..r * l + c0 + width];
            for (j, v) in src.iter().enumerate() {
                cols[j * l + r] = *v;
            }
        }
        for j in 0..width {
            fft.process_with_scratch(&mut cols[j * l..(j + 1) * l], &mut scratch);
        }
        for r in 0..l {
            let dst = &mut buf[r * l + c0..r * l + c0 + width];
            for (j, v) in dst.iter_mut().enumerate() {
                *v = cols[j * l + r];
            }
        }
        c0 += width;
    }
}

/// Toroidal convolution `(a * b)(u) = cell_measure * sum_v a(v) b(u - v)`.
pub fn circ_convolve(a: &RealField, b: &RealField) -> Result<RealField> {
    let grid = a.grid();
    grid.ensure_same(&b.grid())?;
    let l = grid.len();
    let fft = FftPair::new(l);
    let mut fa: Vec<Complex64> = a.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft2(&mut fa, l, fft.fwd.as_ref());
    {
        let mut fb: Vec<Complex64> = b.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft2(&mut fb, l, fft.fwd.as_ref());
        for (x, y) in fa.iter_mut().zip(&fb) {
            *x *= y;
        }
    }
    fft2(&mut fa, l, fft.inv.as_ref());
    let scale = grid.cell_measure() / (grid.cells() as f64);
    let data = fa.into_iter().map(|v| v.re * scale).collect();
    RealField::from_vec(grid, data)
}

/// `cell_measure * sum |a|`.
pub fn field_l1(a: &RealField) -> f64 {
    a.grid().cell_measure() * a.data().iter().map(|v| v.abs()).sum::<f64>()
}

/// `cell_measure * sum |a - b|`.
pub fn field_l1_diff(a: &RealField, b: &RealField) -> Result<f64> {
    a.grid().ensure_same(&b.grid())?;
    Ok(a.grid().cell_measure()
        * a.data()
            .iter()
            .zip(b.data())
            .map(|(x, y)| (x - y).abs())
            .sum::<f64>())
}

/// Checks that `g` is normalized, as every transform identity here assumes.
pub(crate) fn ensure_unit_window(g: &Window) -> Result<()> {
    if (g.l2_norm() - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!(
            "window norm {} is not 1",
            g.l2_norm()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mask::DomainMask;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn grid(l: usize) -> PhaseGrid {
        PhaseGrid::new(l).unwrap()
    }

    /// Direct double sum, independent of the FFT path.
    fn stft_direct(f: &Signal, g: &Window) -> Vec<Complex64> {
        let l = f.grid().len();
        let mut out = vec![ZERO; l * l];
        for m in 0..l {
            for n in 0..l {
                let mut acc = ZERO;
                for t in 0..l {
                    let phase = -2.0 * PI * ((n * t) % l) as f64 / l as f64;
                    acc += f.values()[t]
                        * g.values()[(t + l - m) % l].conj()
                        * Complex64::from_polar(1.0, phase);
                }
                out[m * l + n] = acc;
            }
        }
        out
    }

    #[test]
    fn impulse_stft() {
        let gr = grid(16);
        let d = Signal::impulse(gr, 0);
        let g = Window::from_signal(d.clone()).unwrap();
        let v = stft(&d, &g).unwrap();
        for m in 0..16 {
            for n in 0..16 {
                let want = if m == 0 { 1.0 } else { 0.0 };
                assert!((v.get(m, n) - Complex64::new(want, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn stft_matches_direct_sum_and_parseval() {
        let gr = grid(64);
        let f = Signal::random(gr, 3);
        let g = Window::gaussian(gr);
        let v = stft(&f, &g).unwrap();
        let direct = stft_direct(&f, &g);
        let err = v
            .values()
            .iter()
            .zip(&direct)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12);
        let energy: f64 = direct.iter().map(|v| v.norm_sqr()).sum::<f64>() * gr.cell_measure();
        assert!((energy - 1.0).abs() < 1e-9);
    }

    #[test]
    fn window_against_itself() {
        let gr = grid(64);
        let g = Window::gaussian(gr);
        let v = stft(g.signal(), &g).unwrap();
        assert!((v.get(0, 0).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_spectrogram_matches_continuous_formula() {
        let gr = grid(256);
        let g = Window::gaussian(gr);
        let h0 = Signal::hermite(gr, 0);
        let s = spectrogram(&h0, &g).unwrap();
        assert!((s.get(0, 0) - 1.0).abs() <= 1e-3);
        // |z| = 1 at x = 1 (m = 16 when delta = 1/16).
        let want = (-PI).exp();
        assert!((want - 0.043214).abs() < 1e-6);
        assert!((s.get(16, 0) - want).abs() <= 2e-3);
        assert!((s.get(0, 16) - want).abs() <= 2e-3);
    }

    #[test]
    fn zero_signal_zero_field() {
        let gr = grid(32);
        let s = spectrogram(&Signal::zeros(gr), &Window::gaussian(gr)).unwrap();
        assert_eq!(s.max(), 0.0);
    }

    #[test]
    fn grid_mismatch_rejected() {
        let f = Signal::zeros(grid(32));
        let g = Window::gaussian(grid(64));
        assert!(matches!(stft(&f, &g), Err(Error::GridMismatch { .. })));
    }

    #[test]
    fn ambiguity_properties() {
        let gr = grid(256);
        for g in [
            Window::gaussian(gr),
            Window::hann(gr, 2.0).unwrap(),
            Window::boxcar(gr, 1.0).unwrap(),
        ] {
            let a = ambiguity_sq(&g);
            assert!((a.get(0, 0) - 1.0).abs() < 1e-12);
            assert!((field_l1(&a) - 1.0).abs() < 1e-9);
            // z -> -z symmetry for real symmetric windows.
            for m in 0..256 {
                for n in 0..256 {
                    let d = a.get(m, n) - a.get((256 - m) % 256, (256 - n) % 256);
                    assert!(d.abs() < 1e-9);
                }
            }
        }
        let a = ambiguity_sq(&Window::gaussian(gr));
        let want = (-PI).exp();
        assert!((a.get(16, 0) - want).abs() < 2e-3);
        assert!((a.get(0, 16) - want).abs() < 2e-3);
        assert!((a.get(16, 0) - a.get(0, 16)).abs() < 1e-6);
    }

    #[test]
    fn mstar_gaussian_matches_quadrature() {
        // 1-D oracle: int |x| e^{-pi x^2} dx * int e^{-pi xi^2} dxi, times 2,
        // by composite Simpson on [-8, 8].
        let simpson = |f: &dyn Fn(f64) -> f64| {
            let n = 20_000;
            let h = 16.0 / n as f64;
            let mut s = f(-8.0) + f(8.0);
            for i in 1..n {
                let x = -8.0 + i as f64 * h;
                s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
            }
            s * h / 3.0
        };
        let l1_oracle = 2.0
            * simpson(&|x: f64| x.abs() * (-PI * x * x).exp())
            * simpson(&|x: f64| (-PI * x * x).exp());
        assert!((l1_oracle - 2.0 / PI).abs() < 1e-6);

        let g = Window::gaussian(grid(256));
        let v = mstar_norm(&g);
        assert!(v.is_finite() && v >= 0.0);
        assert!(((v - l1_oracle) / l1_oracle).abs() < 0.1, "mstar {v}");
    }

    #[test]
    fn mstar_l2_gaussian_matches_polar_quadrature() {
        // int_0^inf 2 pi r * r e^{-pi r^2} dr by Simpson on [0, 8].
        let n = 20_000;
        let h = 8.0 / n as f64;
        let f = |r: f64| 2.0 * PI * r * r * (-PI * r * r).exp();
        let mut s = f(0.0) + f(8.0);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        let oracle = s * h / 3.0;
        assert!((oracle - 0.5).abs() < 1e-9);
        let v = mstar_norm_l2(&Window::gaussian(grid(256)));
        assert!(((v - oracle) / oracle).abs() < 0.1, "mstar_l2 {v}");
    }

    #[test]
    fn mstar_impulse_is_finite() {
        let gr = grid(64);
        let g = Window::from_signal(Signal::impulse(gr, 0)).unwrap();
        let v = mstar_norm(&g);
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn convolution_identity_and_mass() {
        let gr = grid(16);
        let a = RealField::from_fn(gr, |m, n| ((m * 7 + n * 3) % 5) as f64 - 1.5);
        let mut spike = RealField::zeros(gr);
        spike.set(0, 0, 1.0 / gr.cell_measure());
        let c = circ_convolve(&a, &spike).unwrap();
        for (x, y) in c.data().iter().zip(a.data()) {
            assert!((x - y).abs() < 1e-9);
        }

        let ind = DomainMask::cell_block(gr, -2, -1, 4, 3).indicator();
        let mut kernel = RealField::from_fn(gr, |m, n| ((m + 2 * n) % 3) as f64);
        let mass = field_l1(&kernel);
        for v in kernel.data_mut() {
            *v /= mass;
        }
        let c = circ_convolve(&ind, &kernel).unwrap();
        assert!((c.sum() * gr.cell_measure() - field_l1(&ind)).abs() < 1e-9);
    }

    #[test]
    fn convolution_support_is_minkowski_sum() {
        let gr = grid(8);
        let a = DomainMask::cell_block(gr, 0, 0, 2, 2).indicator();
        let b = DomainMask::cell_block(gr, 3, 1, 1, 2).indicator();
        let c = circ_convolve(&a, &b).unwrap();
        // Direct-sum oracle.
        for u in 0..8 {
            for w in 0..8 {
                let mut s = 0.0;
                for v1 in 0..8 {
                    for v2 in 0..8 {
                        s += a.get(v1, v2) * b.get((u + 8 - v1) % 8, (w + 8 - v2) % 8);
                    }
                }
                let want = s * gr.cell_measure();
                assert!((c.get(u, w) - want).abs() < 1e-12);
                assert_eq!(c.get(u, w) > 1e-9, want > 0.0);
            }
        }
    }

    #[test]
    fn l1_helpers() {
        let gr = grid(16);
        assert!((field_l1(&RealField::constant(gr, 1.0)) - 16.0).abs() < 1e-12);
        let a = RealField::from_fn(gr, |m, n| (m as f64) - (n as f64));
        assert_eq!(field_l1_diff(&a, &a).unwrap(), 0.0);
        let k = DomainMask::cell_block(gr, 0, 0, 1, 5);
        assert!((field_l1(&k.indicator()) - 5.0 / 16.0).abs() < 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]
        #[test]
        fn parseval(seed in any::<u64>()) {
            let gr = grid(32);
            let f = Signal::random(gr, seed);
            let s = spectrogram(&f, &Window::gaussian(gr)).unwrap();
            prop_assert!((field_l1(&s) - 1.0).abs() < 1e-9);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn covariance_of_modulus(seed in any::<u64>(), dm in -40i64..40, dn in -40i64..40) {
            let gr = grid(32);
            let g = Window::hann(gr, 2.0).unwrap();
            let f = Signal::random(gr, seed);
            let shifted = f.time_frequency_shift(dm, dn);
            let a = spectrogram(&f, &g).unwrap();
            let b = spectrogram(&shifted, &g).unwrap();
            let moved = a.translated(dm, dn);
            for (x, y) in moved.data().iter().zip(b.data()) {
                prop_assert!((x - y).abs() < 1e-9);
            }
        }
    }
}
