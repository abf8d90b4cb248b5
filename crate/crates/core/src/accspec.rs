//! Accumulated spectrograms `rho = sum_{k <= A} |V_g h_k|^2`, their L1
//! distance to the domain indicator and the plunge-region statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SpectrogramField;
use crate::locop::{EigenSystem, LocOperator};
use crate::mask::DomainMask;
use crate::signal::Window;
use crate::tfa;

/// Default plunge threshold: eigenvalues in `[0.1, 0.9]` count as mid-range.
pub const DEFAULT_MID_DELTA: f64 = 0.1;

/// Gap `lambda_A - lambda_{A+1}` below which the cutoff splits a cluster.
pub const DEGENERACY_GAP: f64 = 1e-8;

/// `A_Omega = ceil(|Omega|)`, computed on the integer cell count.
pub fn a_omega(mask: &DomainMask) -> Result<usize> {
    if mask.is_empty() {
        return Err(Error::invalid("A_Omega is undefined for an empty domain"));
    }
    let l = mask.grid().len();
    Ok(mask.count().div_ceil(l))
}

/// Sum of the spectrograms of the first `k` eigenvectors.
pub fn accumulate(eigs: &EigenSystem, g: &Window, k: usize) -> Result<SpectrogramField> {
    eigs.grid().ensure_same(&g.grid())?;
    if k == 0 || k > eigs.len() {
        return Err(Error::invalid(format!(
            "cannot accumulate {k} spectrograms from {} eigenpairs",
            eigs.len()
        )));
    }
    Ok(tfa::accumulate_spectrograms(&eigs.eigenvectors()[..k], g))
}

/// `rho_{g, Omega}` together with what it was built from.
#[derive(Debug, Clone)]
pub struct AccumulatedSpectrogram {
    field: SpectrogramField,
    a_omega: usize,
    mask: DomainMask,
    eigenvalues_used: Vec<f64>,
    degenerate_cutoff: bool,
}

impl AccumulatedSpectrogram {
    pub fn new(eigs: &EigenSystem, g: &Window, mask: &DomainMask) -> Result<Self> {
        mask.grid().ensure_same(&eigs.grid())?;
        let a = a_omega(mask)?;
        let field = accumulate(eigs, g, a)?;
        let lam = eigs.eigenvalues();
        let degenerate_cutoff = lam.len() > a && (lam[a - 1] - lam[a]).abs() < DEGENERACY_GAP;
        if degenerate_cutoff {
            log::warn!(
                "A_Omega={a} splits a near-degenerate cluster (lambda_A={:.12}, lambda_A+1={:.12}); \
                 rho depends on the basis chosen inside the cluster",
                lam[a - 1],
                lam[a]
            );
        }
        Ok(AccumulatedSpectrogram {
            field,
            a_omega: a,
            mask: mask.clone(),
            eigenvalues_used: lam[..a].to_vec(),
            degenerate_cutoff,
        })
    }

    pub fn field(&self) -> &SpectrogramField {
        &self.field
    }

    pub fn a_omega(&self) -> usize {
        self.a_omega
    }

    pub fn mask(&self) -> &DomainMask {
        &self.mask
    }

    pub fn eigenvalues_used(&self) -> &[f64] {
        &self.eigenvalues_used
    }

    /// Whether the cutoff at `A_Omega` falls inside a near-degenerate cluster.
    pub fn has_degenerate_cutoff(&self) -> bool {
        self.degenerate_cutoff
    }
}

/// `|| rho - 1_Omega ||_1`.
pub fn l1_error(rho: &AccumulatedSpectrogram) -> Result<f64> {
    tfa::field_l1_diff(rho.field(), &rho.mask.indicator())
}

/// `|Omega| + A_Omega - 2 sum_{k <= A_Omega} lambda_k`.
pub fn l1_error_from_eigenvalues(eigs: &EigenSystem, mask: &DomainMask) -> Result<f64> {
    let a = a_omega(mask)?;
    let lam = leading(eigs, a)?;
    Ok(mask.area() + a as f64 - 2.0 * lam.iter().sum::<f64>())
}

fn leading(eigs: &EigenSystem, a: usize) -> Result<&[f64]> {
    eigs.eigenvalues().get(..a).ok_or_else(|| {
        Error::invalid(format!(
            "need {a} eigenvalues, only {} available",
            eigs.len()
        ))
    })
}

/// Trace quantities of the plunge region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlungeStats {
    pub area: f64,
    pub a_omega: usize,
    pub trace: f64,
    pub trace_sq: f64,
    /// `trace(H) - trace(H^2) = sum lambda (1 - lambda)`.
    pub deficit: f64,
    /// `|Omega| - sum_{k <= A} lambda_k`.
    pub eigen_deficit: f64,
    /// `lambda_{A_Omega}`.
    pub lambda_cutoff: f64,
    pub mid_delta: f64,
    /// Number of eigenvalues in `[delta, 1 - delta]`.
    pub mid_count: usize,
    /// False when a partial spectrum stops before dropping below `delta`,
    /// in which case `mid_count` is only a lower bound.
    pub mid_count_exact: bool,
}

impl PlungeStats {
    /// `deficit - eigen_deficit - lambda_A (A - |Omega|)`, nonnegative by the
    /// eigenvalue splitting argument.
    pub fn step2_slack(&self) -> f64 {
        self.deficit - self.eigen_deficit - self.lambda_cutoff * (self.a_omega as f64 - self.area)
    }
}

pub fn plunge_stats(
    eigs: &EigenSystem,
    mask: &DomainMask,
    op: &LocOperator,
    delta: f64,
) -> Result<PlungeStats> {
    let ambiguity = tfa::ambiguity_sq(op.window());
    plunge_stats_with(eigs, mask, op, delta, &ambiguity)
}

/// As [`plunge_stats`] with a precomputed `|V_g g|^2`.
pub fn plunge_stats_with(
    eigs: &EigenSystem,
    mask: &DomainMask,
    op: &LocOperator,
    delta: f64,
    ambiguity: &SpectrogramField,
) -> Result<PlungeStats> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::invalid(format!("plunge delta {delta} must lie in (0, 1/2)")));
    }
    let a = a_omega(mask)?;
    let lam = eigs.eigenvalues();
    let top = leading(eigs, a)?;
    let trace = op.trace_symbol();
    let trace_sq = op.trace_square_with(ambiguity)?;
    let mid_count = lam.iter().filter(|&&v| v >= delta && v <= 1.0 - delta).count();
    let mid_count_exact = eigs.is_complete() || lam.last().is_some_and(|&v| v < delta);
    Ok(PlungeStats {
        area: mask.area(),
        a_omega: a,
        trace,
        trace_sq,
        deficit: trace - trace_sq,
        eigen_deficit: mask.area() - top.iter().sum::<f64>(),
        lambda_cutoff: top[a - 1],
        mid_delta: delta,
        mid_count,
        mid_count_exact,
    })
}

/// Per-domain summary written as `stats.json`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainStats {
    pub area: f64,
    pub perimeter: f64,
    #[serde(rename = "A")]
    pub a_omega: usize,
    pub trace: f64,
    pub trace_sq: f64,
    pub deficit: f64,
    pub eigen_deficit: f64,
    pub l1_error: f64,
    pub mid_count: usize,
}

impl DomainStats {
    pub fn new(mask: &DomainMask, plunge: &PlungeStats, l1_error: f64) -> Self {
        DomainStats {
            area: mask.area(),
            perimeter: mask.perimeter(),
            a_omega: plunge.a_omega,
            trace: plunge.trace,
            trace_sq: plunge.trace_sq,
            deficit: plunge.deficit,
            eigen_deficit: plunge.eigen_deficit,
            l1_error,
            mid_count: plunge.mid_count,
        }
    }
}
