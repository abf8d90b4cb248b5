//! Closed-form reference for the Gaussian window and centered disks.
//!
//! With `g = h_0` and `Omega = B_R`, the eigenfunctions are the Hermite
//! functions, the eigenspectrograms are `pi^k/k! |z|^{2k} e^{-pi |z|^2}` and
//! the eigenvalues are `P(k+1, pi R^2)`. All of it is evaluated in log space.

pub mod gamma;
pub mod quadrature;

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

pub use gamma::{gamma_p, gamma_q};

/// Distance beyond `R` where the analytic accumulated spectrogram is
/// treated as zero (its tail there is below `e^{-500}` for `R <= 20`).
const OUTER_CUTOFF: f64 = 12.0;

/// `|V_{h_0} h_k(z)|^2` at `|z| = r`.
pub fn hermite_spectrogram(k: usize, r: f64) -> f64 {
    if r == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let s = PI * r * r;
    (k as f64 * s.ln() - ln_gamma(k as f64 + 1.0) - s).exp()
}

/// `lambda_k(B_R) = P(k+1, pi R^2)`, the `k`-th eigenvalue (from 0) of the
/// disk operator with Gaussian window.
pub fn disk_eigenvalue(k: usize, radius: f64) -> f64 {
    assert!(radius >= 0.0, "radius must be nonnegative");
    if radius == 0.0 {
        return 0.0;
    }
    gamma_p(k as f64 + 1.0, PI * radius * radius).expect("valid incomplete gamma arguments")
}

/// Number of eigenspectrograms accumulated for the disk, `ceil(pi R^2)`.
pub fn disk_a_omega(radius: f64) -> usize {
    (PI * radius * radius).ceil() as usize
}

/// `rho(r) = sum_{k < ceil(pi R^2)} pi^k/k! r^{2k} e^{-pi r^2}`.
pub fn analytic_accumulated(radius: f64, r: f64) -> f64 {
    let terms = disk_a_omega(radius);
    if terms == 0 {
        return 0.0;
    }
    if r == 0.0 {
        return 1.0;
    }
    let s = PI * r * r;
    let ln_s = s.ln();
    // log-sum-exp over ln t_k = k ln s - ln k! - s.
    let mut logs = Vec::with_capacity(terms);
    let mut lt = -s;
    for k in 0..terms {
        if k > 0 {
            lt += ln_s - (k as f64).ln();
        }
        logs.push(lt);
    }
    let mx = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = logs.iter().map(|l| (l - mx).exp()).sum();
    (mx.exp() * sum).clamp(0.0, 1.0)
}

/// `int_{R^2} |rho(z) - 1_{B_R}(z)| dz` by adaptive radial quadrature.
pub fn analytic_l1_error(radius: f64) -> Result<f64> {
    if !(0.5..=20.0).contains(&radius) {
        return Err(Error::invalid(format!(
            "analytic L1 error is supported for R in [0.5, 20], got {radius}"
        )));
    }
    let tol = 1e-10;
    let inside = quadrature::integrate(
        &|r| (1.0 - analytic_accumulated(radius, r)) * r,
        0.0,
        radius,
        tol,
    )?;
    let outside = quadrature::integrate(
        &|r| analytic_accumulated(radius, r) * r,
        radius,
        radius + OUTER_CUTOFF,
        tol,
    )?;
    Ok(2.0 * PI * (inside + outside))
}

/// `pi R^2 + A - 2 sum_{k < A} P(k+1, pi R^2)`: the same error through the
/// eigenvalue identity.
pub fn analytic_l1_from_eigenvalues(radius: f64) -> f64 {
    let a = disk_a_omega(radius);
    let sum: f64 = (0..a).map(|k| disk_eigenvalue(k, radius)).sum();
    PI * radius * radius + a as f64 - 2.0 * sum
}

/// Radial samples `(r, rho(r))` on `[0, r_max]`.
pub fn radial_profile(radius: f64, r_max: f64, samples: usize) -> Vec<(f64, f64)> {
    let n = samples.max(2);
    (0..n)
        .map(|i| {
            let r = r_max * i as f64 / (n - 1) as f64;
            (r, analytic_accumulated(radius, r))
        })
        .collect()
}

/// Truncated list of disk eigenvalues for one radius.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianDiskModel {
    pub radius: f64,
    pub eigenvalues: Vec<f64>,
}

impl GaussianDiskModel {
    pub fn new(radius: f64, k_max: usize) -> Self {
        let eigenvalues = (0..k_max).map(|k| disk_eigenvalue(k, radius)).collect();
        GaussianDiskModel {
            radius,
            eigenvalues,
        }
    }

    pub fn k_max(&self) -> usize {
        self.eigenvalues.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Composite Simpson on `[a, b]` with `n` (even) panels; test oracle only.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn hermite_spectrogram_values() {
        assert_eq!(hermite_spectrogram(0, 0.0), 1.0);
        assert!((hermite_spectrogram(0, 1.0) - 0.0432139).abs() < 1e-7);
        assert!((hermite_spectrogram(0, 1.0) - (-PI).exp()).abs() < 1e-15);
        assert_eq!(hermite_spectrogram(3, 0.0), 0.0);
        // No overflow for very large orders.
        let v = hermite_spectrogram(1_000_000, (1_000_000.0 / PI).sqrt());
        assert!(v.is_finite() && v > 0.0 && v < 1.0);
    }

    #[test]
    fn first_disk_eigenvalue() {
        let oracle = simpson(|r| 2.0 * PI * r * (-PI * r * r).exp(), 0.0, 1.0, 2000);
        assert!((oracle - 0.9567861).abs() < 1e-6);
        assert!((disk_eigenvalue(0, 1.0) - oracle).abs() < 1e-10);
        assert!((disk_eigenvalue(0, 1.0) - (1.0 - (-PI).exp())).abs() < 1e-15);
        assert_eq!(disk_eigenvalue(5, 0.0), 0.0);
    }

    #[test]
    fn disk_eigenvalues_match_radial_quadrature() {
        for &radius in &[0.5, 1.0, 2.0, 3.5, 5.0] {
            for k in [0usize, 1, 2, 5, 10, 20, 35, 50] {
                let oracle = simpson(
                    |r| 2.0 * PI * r * hermite_spectrogram(k, r),
                    0.0,
                    radius,
                    20_000,
                );
                let got = disk_eigenvalue(k, radius);
                assert!((got - oracle).abs() < 1e-10, "k={k} R={radius}: {got} vs {oracle}");
            }
        }
    }

    #[test]
    fn monotonicity() {
        let m = GaussianDiskModel::new(2.0, 60);
        assert!(m.eigenvalues.windows(2).all(|w| w[0] > w[1] || w[1] == 0.0));
        assert!(m.eigenvalues[0] < 1.0 && *m.eigenvalues.last().unwrap() > 0.0);
        assert!(m.eigenvalues.iter().sum::<f64>() <= PI * 4.0 + 1e-9);
        for k in 0..10 {
            assert!(disk_eigenvalue(k, 1.5) < disk_eigenvalue(k, 1.6));
        }
    }

    #[test]
    fn poisson_cdf_identity() {
        for &radius in &[0.7, 2.0, 4.5] {
            let terms = disk_a_omega(radius);
            for &r in &[0.0, 0.3, 1.0, radius, radius + 0.5, radius + 3.0] {
                let direct: f64 = (0..terms).map(|k| hermite_spectrogram(k, r)).sum();
                let q = if r == 0.0 { 1.0 } else { gamma_q(terms as f64, PI * r * r).unwrap() };
                assert!((direct - q).abs() < 1e-10);
                assert!((analytic_accumulated(radius, r) - q).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn accumulated_profile() {
        for &radius in &[0.5, 2.0, 9.0] {
            assert_eq!(analytic_accumulated(radius, 0.0), 1.0);
        }
        assert!(analytic_accumulated(12.0, 6.0) >= 0.99);
        for (_, v) in radial_profile(3.0, 8.0, 200) {
            assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn l1_error_identity_and_rate() {
        for &radius in &[0.5, 1.0, 2.0, 4.0, 8.0, 15.0] {
            let quad = analytic_l1_error(radius).unwrap();
            let ident = analytic_l1_from_eigenvalues(radius);
            assert!(quad > 0.0);
            assert!((quad - ident).abs() < 1e-6, "R={radius}: {quad} vs {ident}");
        }
        let ratio = analytic_l1_error(8.0).unwrap() / analytic_l1_error(4.0).unwrap();
        assert!((1.7..=2.3).contains(&ratio), "ratio {ratio}");
        assert!(analytic_l1_error(0.1).is_err());
        assert!(analytic_l1_error(25.0).is_err());
    }
}
