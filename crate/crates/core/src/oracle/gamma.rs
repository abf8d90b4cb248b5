//! Regularized incomplete gamma functions for the disk eigenvalues.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

const MAX_ITER: usize = 100_000;
const EPS: f64 = 1e-17;
const TINY: f64 = 1e-300;

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn gamma_p(a: f64, x: f64) -> Result<f64> {
    gamma_pq(a, x).map(|(p, _)| p)
}

/// Regularized upper incomplete gamma `Q(a, x) = 1 - P(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> Result<f64> {
    gamma_pq(a, x).map(|(_, q)| q)
}

/// `(P, Q)` by the power series below `x = a + 1` and Lentz's continued
/// fraction above it, each computing the smaller tail directly.
fn gamma_pq(a: f64, x: f64) -> Result<(f64, f64)> {
    if !(a > 0.0) || !(x >= 0.0) || !a.is_finite() {
        return Err(Error::invalid(format!("incomplete gamma needs a > 0, x >= 0; got a={a}, x={x}")));
    }
    if x == 0.0 {
        return Ok((0.0, 1.0));
    }
    if x.is_infinite() {
        return Ok((1.0, 0.0));
    }
    let log_prefactor = a * x.ln() - x - ln_gamma(a);
    if x < a + 1.0 {
        let p = series(a, x)? * log_prefactor.exp();
        Ok((p, 1.0 - p))
    } else {
        let q = continued_fraction(a, x)? * log_prefactor.exp();
        Ok((1.0 - q, q))
    }
}

/// `sum_n x^n / (a (a+1) ... (a+n))`.
fn series(a: f64, x: f64) -> Result<f64> {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            return Ok(sum);
        }
    }
    Err(Error::NumericFailure(format!("gamma series did not converge (a={a}, x={x})")))
}

/// Continued fraction for `Gamma(a, x) e^x x^{-a}`.
fn continued_fraction(a: f64, x: f64) -> Result<f64> {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            return Ok(h);
        }
    }
    Err(Error::NumericFailure(format!("gamma continued fraction did not converge (a={a}, x={x})")))
}
