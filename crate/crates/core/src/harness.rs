//! Experiment harness: disk radius sweeps with log-log rate fits, the
//! convolution lemma check and the inequality suite over a fixed corpus.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::accspec::{self, AccumulatedSpectrogram, DomainStats, PlungeStats, DEFAULT_MID_DELTA};
use crate::error::{Error, Result};
use crate::grid::{PhaseGrid, SpectrogramField};
use crate::io;
use crate::locop::{self, eigh, top_eigs_iterative, EigenSystem, IterativeOptions, LocOperator};
use crate::mask::{DomainMask, SymbolField};
use crate::signal::{Window, WindowSpec};
use crate::tfa;

/// Slack applied to every inequality of the suite.
pub const SUITE_SLACK: f64 = 1e-8;

/// Slack of the convolution lemma check.
pub const LEMMA_SLACK: f64 = 1e-9;

/// Fields larger than this are cropped around the disk before being
/// written as PGM heatmaps.
const HEATMAP_MAX_SIDE: usize = 1024;

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root mean square of the fit errors in log space.
    pub residual: f64,
}

pub fn fit_loglog(points: &[(f64, f64)]) -> Result<LogLogFit> {
    if points.len() < 2 {
        return Err(Error::invalid("a log-log fit needs at least two points"));
    }
    if let Some(&(x, y)) = points.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(Error::invalid(format!("log-log point ({x}, {y}) is not positive")));
    }
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    if xs.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid("log-log fit needs distinct x values"));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = logs.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Ok(LogLogFit {
        slope,
        intercept,
        residual: (sse / n).sqrt(),
    })
}

/// Eigensolver used per radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum SolverSpec {
    Dense,
    /// Leading `A_Omega + margin` pairs by subspace iteration.
    Iterative {
        #[serde(default = "default_margin")]
        margin: usize,
    },
}

fn default_margin() -> usize {
    64
}

impl Default for SolverSpec {
    fn default() -> Self {
        SolverSpec::Iterative {
            margin: default_margin(),
        }
    }
}

impl std::str::FromStr for SolverSpec {
    type Err = Error;

    /// `dense`, `iterative` or `iterative:<margin>`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "dense" => Ok(SolverSpec::Dense),
            None if s == "iterative" => Ok(SolverSpec::default()),
            Some(("iterative", m)) => m
                .parse()
                .map(|margin| SolverSpec::Iterative { margin })
                .map_err(|_| Error::Parse(format!("bad solver margin '{m}'"))),
            _ => Err(Error::Parse(format!("unknown solver '{s}'"))),
        }
    }
}

impl SolverSpec {
    /// Eigenpairs sufficient for `A_Omega = a`, with the dense solver as
    /// fallback when the requested block would not be smaller than `L`.
    pub fn solve(&self, op: &LocOperator, a: usize, seed: u64) -> Result<EigenSystem> {
        match *self {
            SolverSpec::Dense => eigh(op),
            SolverSpec::Iterative { margin } => {
                let l = op.grid().len();
                let k = a + margin;
                if k + 10 > l {
                    log::info!("k={k} too close to L={l}, using the dense solver");
                    return eigh(op);
                }
                let opts = IterativeOptions {
                    seed,
                    ..IterativeOptions::default()
                };
                top_eigs_iterative(op, k, &opts)
            }
        }
    }
}

fn default_radii() -> Vec<f64> {
    vec![2.0, 2.5, 3.0, 4.0, 5.0, 6.0]
}

fn default_len() -> usize {
    4096
}

fn default_true() -> bool {
    true
}

fn default_mid_delta() -> f64 {
    DEFAULT_MID_DELTA
}

/// Radius sweep settings, readable from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
    #[serde(rename = "L", default = "default_len")]
    pub len: usize,
    #[serde(default)]
    pub window: WindowSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    /// Where CSV, JSON and PGM outputs go; nothing is written when absent.
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    /// Radii processed at once; defaults to the size of the thread pool.
    #[serde(default)]
    pub jobs: Option<usize>,
    #[serde(default = "default_true")]
    pub heatmaps: bool,
    #[serde(default = "default_mid_delta")]
    pub mid_delta: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            radii: default_radii(),
            len: default_len(),
            window: WindowSpec::default(),
            solver: SolverSpec::default(),
            out_dir: None,
            seed: 0,
            jobs: None,
            heatmaps: true,
            mid_delta: DEFAULT_MID_DELTA,
        }
    }
}

impl SweepConfig {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("config {}: {e}", path.display())))
    }
}

/// One radius of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRecord {
    #[serde(rename = "R")]
    pub radius: f64,
    #[serde(rename = "L")]
    pub len: usize,
    pub area: f64,
    pub perimeter: f64,
    #[serde(rename = "A")]
    pub a_omega: usize,
    pub l1_error: f64,
    pub l1_identity: f64,
    pub trace: f64,
    pub trace_sq: f64,
    pub deficit: f64,
    pub eigen_deficit: f64,
    pub mid_count: usize,
    pub mid_count_exact: bool,
    pub degenerate_cutoff: bool,
    /// Wall time in seconds; kept out of the CSV so it stays reproducible.
    pub runtime: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

impl Range {
    fn of(values: impl IntoIterator<Item = f64>) -> Option<Range> {
        values.into_iter().fold(None, |acc, v| {
            Some(match acc {
                None => Range { min: v, max: v },
                Some(r) => Range {
                    min: r.min.min(v),
                    max: r.max.max(v),
                },
            })
        })
    }

    /// `max / min`.
    pub fn spread(&self) -> f64 {
        self.max / self.min
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateConstants {
    /// Range of `l1_error / perimeter`.
    pub l1_per_perimeter: Range,
    /// Range of `deficit / R`.
    pub deficit_per_radius: Range,
}

/// Outcome of [`run_rate_sweep`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub window: String,
    #[serde(rename = "L")]
    pub len: usize,
    pub solver: SolverSpec,
    /// M*-norm with the l1 and the Euclidean phase-space norm.
    pub mstar_l1: f64,
    pub mstar_l2: f64,
    pub records: Vec<RateRecord>,
    /// `ln l1_error` against `ln R`; absent for a single radius.
    pub fit: Option<LogLogFit>,
    pub constants: RateConstants,
    /// `l1_error / sqrt(perimeter * area)` per record.
    pub old_bound_ratio: Vec<f64>,
    pub warnings: Vec<String>,
}

impl RateReport {
    pub fn from_records(
        window: &Window,
        label: String,
        solver: SolverSpec,
        mut records: Vec<RateRecord>,
    ) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::invalid("a rate report needs at least one record"));
        }
        records.sort_by(|a, b| a.radius.total_cmp(&b.radius));
        if let Some(r) = records.iter().find(|r| !(r.l1_error > 0.0)) {
            return Err(Error::NumericFailure(format!(
                "R={}: nonpositive l1 error {}",
                r.radius, r.l1_error
            )));
        }
        let mut warnings = Vec::new();
        let fit = if records.len() >= 2 {
            let pts: Vec<(f64, f64)> = records.iter().map(|r| (r.radius, r.l1_error)).collect();
            Some(fit_loglog(&pts)?)
        } else {
            warnings.push("single radius: no rate fit".to_string());
            None
        };
        for r in &records {
            if !r.mid_count_exact {
                warnings.push(format!("R={}: mid_count is a lower bound", r.radius));
            }
            if r.degenerate_cutoff {
                warnings.push(format!("R={}: A_Omega splits a near-degenerate cluster", r.radius));
            }
        }
        let constants = RateConstants {
            l1_per_perimeter: Range::of(records.iter().map(|r| r.l1_error / r.perimeter))
                .expect("nonempty records"),
            deficit_per_radius: Range::of(records.iter().map(|r| r.deficit / r.radius))
                .expect("nonempty records"),
        };
        let old_bound_ratio = records
            .iter()
            .map(|r| r.l1_error / (r.perimeter * r.area).sqrt())
            .collect();
        Ok(RateReport {
            window: label,
            len: records[0].len,
            solver,
            mstar_l1: tfa::mstar_norm(window),
            mstar_l2: tfa::mstar_norm_l2(window),
            records,
            fit,
            constants,
            old_bound_ratio,
            warnings,
        })
    }

    pub fn has_fit_warning(&self) -> bool {
        self.fit.is_none()
    }

    /// Whether `l1_error / sqrt(perimeter * area)` strictly decreases in R.
    pub fn old_bound_decreasing(&self) -> bool {
        self.old_bound_ratio.windows(2).all(|w| w[1] < w[0])
    }

    /// One row per radius, without timings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "R,L,area,perimeter,A,l1_error,l1_identity,trace,trace_sq,deficit,eigen_deficit,mid_count,old_bound_ratio\n",
        );
        for (r, ob) in self.records.iter().zip(&self.old_bound_ratio) {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.radius,
                r.len,
                r.area,
                r.perimeter,
                r.a_omega,
                r.l1_error,
                r.l1_identity,
                r.trace,
                r.trace_sq,
                r.deficit,
                r.eigen_deficit,
                r.mid_count,
                ob
            );
        }
        out
    }
}

/// Everything computed for one domain and window.
#[derive(Debug, Clone)]
pub struct DomainRun {
    pub eigs: EigenSystem,
    pub rho: AccumulatedSpectrogram,
    pub plunge: PlungeStats,
    pub l1_error: f64,
    pub l1_identity: f64,
}

impl DomainRun {
    pub fn stats(&self) -> DomainStats {
        DomainStats::new(self.rho.mask(), &self.plunge, self.l1_error)
    }
}

/// Eigendecomposes, accumulates and collects the trace quantities.
pub fn run_domain(
    mask: &DomainMask,
    window: &Window,
    solver: SolverSpec,
    seed: u64,
    mid_delta: f64,
    ambiguity: &SpectrogramField,
) -> Result<DomainRun> {
    let op = LocOperator::from_mask(mask, window.clone())?;
    let a = accspec::a_omega(mask)?;
    let eigs = solver.solve(&op, a, seed)?;
    let rho = AccumulatedSpectrogram::new(&eigs, window, mask)?;
    let l1_error = accspec::l1_error(&rho)?;
    let l1_identity = accspec::l1_error_from_eigenvalues(&eigs, mask)?;
    let plunge = accspec::plunge_stats_with(&eigs, mask, &op, mid_delta, ambiguity)?;
    Ok(DomainRun {
        eigs,
        rho,
        plunge,
        l1_error,
        l1_identity,
    })
}

fn radius_tag(r: f64) -> String {
    format!("R{r}")
}

fn sweep_one(
    config: &SweepConfig,
    grid: PhaseGrid,
    window: &Window,
    ambiguity: &SpectrogramField,
    radius: f64,
) -> Result<RateRecord> {
    let start = Instant::now();
    let tag = |e: Error| match e {
        Error::NumericFailure(m) => Error::NumericFailure(format!("R={radius}: {m}")),
        other => other,
    };
    let mask = DomainMask::disk(grid, (0.0, 0.0), radius)?;
    if mask.is_empty() {
        return Err(Error::invalid(format!("R={radius} gives an empty disk")));
    }
    let run = run_domain(&mask, window, config.solver, config.seed, config.mid_delta, ambiguity)
        .map_err(tag)?;
    if let Some(dir) = &config.out_dir {
        io::write_json(dir.join(format!("stats_{}.json", radius_tag(radius))), &run.stats())?;
        if config.heatmaps {
            let l = grid.len();
            let half = if l > HEATMAP_MAX_SIDE {
                // Disk plus a few window widths, in cells.
                Some((((radius + 3.0) / grid.delta()).ceil() as usize).min(HEATMAP_MAX_SIDE / 2))
            } else {
                None
            };
            io::write_field_pgm_cropped(
                dir.join(format!("heatmap_{}.pgm", radius_tag(radius))),
                run.rho.field(),
                half,
            )?;
        }
    }
    log::info!(
        "R={radius}: A={} l1={:.6} deficit={:.6} ({:.1}s)",
        run.plunge.a_omega,
        run.l1_error,
        run.plunge.deficit,
        start.elapsed().as_secs_f64()
    );
    Ok(RateRecord {
        radius,
        len: grid.len(),
        area: mask.area(),
        perimeter: mask.perimeter(),
        a_omega: run.plunge.a_omega,
        l1_error: run.l1_error,
        l1_identity: run.l1_identity,
        trace: run.plunge.trace,
        trace_sq: run.plunge.trace_sq,
        deficit: run.plunge.deficit,
        eigen_deficit: run.plunge.eigen_deficit,
        mid_count: run.plunge.mid_count,
        mid_count_exact: run.plunge.mid_count_exact,
        degenerate_cutoff: run.rho.has_degenerate_cutoff(),
        runtime: start.elapsed().as_secs_f64(),
    })
}

/// Disk sweep: one centered disk per radius, all with the same window.
pub fn run_rate_sweep(config: &SweepConfig) -> Result<RateReport> {
    if config.radii.is_empty() {
        return Err(Error::invalid("sweep needs at least one radius"));
    }
    if let Some(r) = config.radii.iter().find(|r| !(**r > 0.0) || !r.is_finite()) {
        return Err(Error::invalid(format!("sweep radius {r} must be positive")));
    }
    let mut radii = config.radii.clone();
    radii.sort_by(f64::total_cmp);
    if radii.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid("sweep radii must be distinct"));
    }
    let grid = PhaseGrid::new(config.len)?;
    // Fail before any heavy work if the largest disk does not fit.
    DomainMask::disk(grid, (0.0, 0.0), *radii.last().expect("nonempty"))?;
    let window = config.window.build(grid)?;
    tfa::ensure_unit_window(&window)?;
    if let Some(dir) = &config.out_dir {
        std::fs::create_dir_all(dir)?;
    }
    let ambiguity = tfa::ambiguity_sq(&window);

    let jobs = config.jobs.unwrap_or_else(rayon::current_num_threads).max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::ResourceLimit(format!("cannot start worker pool: {e}")))?;
    let records = pool.install(|| {
        radii
            .par_iter()
            .map(|&r| sweep_one(config, grid, &window, &ambiguity, r))
            .collect::<Result<Vec<_>>>()
    })?;

    let report = RateReport::from_records(&window, config.window.label(), config.solver, records)?;
    for w in &report.warnings {
        log::warn!("{w}");
    }
    if let Some(dir) = &config.out_dir {
        std::fs::write(dir.join("sweep.csv"), report.to_csv())?;
        io::write_json(dir.join("rate_report.json"), &report)?;
    }
    Ok(report)
}

/// Both sides of the discrete convolution lemma
/// `|| 1_Omega * phi - 1_Omega ||_1 <= perimeter * ||g||_{M*}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

pub fn lemma_var_check(mask: &DomainMask, g: &Window) -> Result<VarCheck> {
    lemma_var_check_with(mask, g, &tfa::ambiguity_sq(g), LEMMA_SLACK)
}

/// As [`lemma_var_check`] with a precomputed `|V_g g|^2` and a given slack.
pub fn lemma_var_check_with(
    mask: &DomainMask,
    g: &Window,
    ambiguity: &SpectrogramField,
    slack: f64,
) -> Result<VarCheck> {
    mask.grid().ensure_same(&g.grid())?;
    tfa::ensure_unit_window(g)?;
    let indicator = mask.indicator();
    let smoothed = tfa::circ_convolve(&indicator, ambiguity)?;
    let lhs = tfa::field_l1_diff(&smoothed, &indicator)?;
    let rhs = mask.perimeter() * tfa::mstar_norm(g);
    Ok(VarCheck {
        lhs,
        rhs,
        pass: lhs <= rhs + slack,
    })
}

/// One line of the inequality suite, read as `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityEntry {
    pub name: String,
    pub statement: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl InequalityEntry {
    fn le(name: &str, statement: &str, lhs: f64, rhs: f64, slack: f64) -> Self {
        InequalityEntry {
            name: name.into(),
            statement: statement.into(),
            lhs,
            rhs,
            pass: lhs <= rhs + slack,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub stats: DomainStats,
    pub mstar: f64,
    pub trace_norm: f64,
    pub entries: Vec<InequalityEntry>,
}

impl InequalityReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &InequalityEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }
}

/// Evaluates the five discrete inequalities with the full spectrum.
pub fn inequality_suite(mask: &DomainMask, g: &Window) -> Result<InequalityReport> {
    inequality_suite_with(mask, g, SUITE_SLACK)
}

/// As [`inequality_suite`] with a given slack.
pub fn inequality_suite_with(mask: &DomainMask, g: &Window, slack: f64) -> Result<InequalityReport> {
    let ambiguity = tfa::ambiguity_sq(g);
    let run = run_domain(mask, g, SolverSpec::Dense, 0, DEFAULT_MID_DELTA, &ambiguity)?;
    let p = &run.plunge;
    let mstar = tfa::mstar_norm(g);
    let bound = mstar * mask.perimeter();

    let rho_symbol = SymbolField::new(run.rho.field().as_ref().clone())?;
    let h_rho = LocOperator::new(rho_symbol, g.clone())?;
    let h_omega = LocOperator::from_mask(mask, g.clone())?;
    let trace_norm = locop::trace_norm_diff(&h_rho, &h_omega)?;
    log::debug!(
        "trace norm / l1 error = {:.4}",
        if run.l1_error > 0.0 { trace_norm / run.l1_error } else { 0.0 }
    );

    let mut deficit_entry = InequalityEntry::le(
        "deficit_bound",
        "0 <= trace(H) - trace(H^2) <= M*(g) * perimeter",
        p.deficit,
        bound,
        slack,
    );
    deficit_entry.pass &= p.deficit >= -slack;
    let mut eigen_entry = InequalityEntry::le(
        "eigen_deficit",
        "0 <= |Omega| - sum_{k<=A} lambda_k <= trace(H) - trace(H^2)",
        p.eigen_deficit,
        p.deficit,
        slack,
    );
    eigen_entry.pass &= p.eigen_deficit >= -slack;
    let entries = vec![
        deficit_entry,
        eigen_entry,
        InequalityEntry::le(
            "l1_upper",
            "||rho - 1_Omega||_1 <= 1 + 2 (|Omega| - sum_{k<=A} lambda_k)",
            run.l1_error,
            1.0 + 2.0 * p.eigen_deficit,
            slack,
        ),
        InequalityEntry::le(
            "l1_lower",
            "trace(H) - trace(H^2) <= ||rho - 1_Omega||_1",
            p.deficit,
            run.l1_error,
            slack,
        ),
        InequalityEntry::le(
            "trace_norm",
            "||H_rho - H_Omega||_S1 <= ||rho - 1_Omega||_1",
            trace_norm,
            run.l1_error,
            slack,
        ),
    ];
    Ok(InequalityReport {
        stats: run.stats(),
        mstar,
        trace_norm,
        entries,
    })
}

/// A domain and window from the regression corpus.
#[derive(Debug, Clone)]
pub struct CorpusCase {
    pub name: String,
    pub mask: DomainMask,
    pub window: WindowSpec,
}

/// Domains of the regression corpus: disk, square, 4:1 rectangle, L-shape
/// and a union of ten random disks. They fit any grid with `L >= 128`.
pub fn corpus_masks(grid: PhaseGrid, seed: u64) -> Result<Vec<(String, DomainMask)>> {
    Ok(vec![
        ("disk".into(), DomainMask::disk(grid, (0.0, 0.0), 2.0)?),
        ("square".into(), DomainMask::rectangle(grid, (0.0, 0.0), 3.0, 3.0)?),
        ("rectangle".into(), DomainMask::rectangle(grid, (0.0, 0.0), 4.0, 1.0)?),
        ("l_shape".into(), DomainMask::l_shape(grid, 3.5)?),
        ("blobs".into(), DomainMask::random_blobs(grid, 10, 2.5, seed)?),
    ])
}

pub fn corpus_windows() -> Vec<WindowSpec> {
    vec![
        WindowSpec::Gaussian,
        WindowSpec::Hann { width: 2.0 },
        WindowSpec::Boxcar { width: 1.0 },
    ]
}

/// Every corpus domain paired with every corpus window.
pub fn regression_corpus(grid: PhaseGrid, seed: u64) -> Result<Vec<CorpusCase>> {
    let masks = corpus_masks(grid, seed)?;
    let mut cases = Vec::with_capacity(masks.len() * 3);
    for (name, mask) in &masks {
        for w in corpus_windows() {
            cases.push(CorpusCase {
                name: format!("{name}/{}", w.label()),
                mask: mask.clone(),
                window: w,
            });
        }
    }
    Ok(cases)
}

/// Result of [`check_corpus`] for one case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseCheck {
    pub name: String,
    pub lemma: VarCheck,
    pub suite: InequalityReport,
}

impl CaseCheck {
    pub fn pass(&self) -> bool {
        self.lemma.pass && self.suite.all_pass()
    }
}

/// Slack used by [`check_corpus`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckTolerances {
    pub suite: f64,
    pub lemma: f64,
}

impl Default for CheckTolerances {
    fn default() -> Self {
        CheckTolerances {
            suite: SUITE_SLACK,
            lemma: LEMMA_SLACK,
        }
    }
}

/// Inequality suite and lemma check on every case, in order.
pub fn check_corpus(cases: &[CorpusCase], tol: CheckTolerances) -> Result<Vec<CaseCheck>> {
    cases
        .par_iter()
        .map(|c| {
            let g = c.window.build(c.mask.grid())?;
            let ambiguity = tfa::ambiguity_sq(&g);
            Ok(CaseCheck {
                name: c.name.clone(),
                lemma: lemma_var_check_with(&c.mask, &g, &ambiguity, tol.lemma)?,
                suite: inequality_suite_with(&c.mask, &g, tol.suite)?,
            })
        })
        .collect()
}
