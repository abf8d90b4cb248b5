use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use tfloc::accspec::{self, DEFAULT_MID_DELTA};
use tfloc::harness::{self, CaseCheck, CheckTolerances, CorpusCase, SolverSpec, SweepConfig};
use tfloc::io::{self, MaskDescriptor};
use tfloc::locop::{eigh, top_eigs_iterative, IterativeOptions};
use tfloc::{oracle, tfa, DomainMask, LocOperator, PhaseGrid, Signal, Window, WindowSpec};

use crate::error::{CliError, CliResult};
use crate::manifest::Run;
use crate::{AccspecArgs, CheckArgs, EigsArgs, GridArgs, OracleArgs, SpectrogramArgs, SweepArgs};

/// Test signal selected on the command line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum SignalSpec {
    Hermite(usize),
    Impulse(usize),
    Random,
    File(String),
}

impl FromStr for SignalSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        let index = |a: Option<&str>| -> Result<usize, String> {
            a.ok_or_else(|| format!("'{kind}' needs an index, e.g. {kind}:0"))?
                .parse()
                .map_err(|_| format!("bad index in '{s}'"))
        };
        match kind {
            "hermite" => Ok(SignalSpec::Hermite(index(arg)?)),
            "impulse" => Ok(SignalSpec::Impulse(index(arg)?)),
            "random" if arg.is_none() => Ok(SignalSpec::Random),
            "file" => match arg {
                Some(p) if !p.is_empty() => Ok(SignalSpec::File(p.into())),
                _ => Err("file signal needs a path".into()),
            },
            _ => Err(format!("unknown signal '{s}'")),
        }
    }
}

impl SignalSpec {
    fn build(&self, grid: PhaseGrid, seed: u64) -> CliResult<Signal> {
        Ok(match self {
            SignalSpec::Hermite(k) => Signal::hermite(grid, *k),
            SignalSpec::Impulse(t) => {
                if *t >= grid.len() {
                    return Err(CliError::Usage(format!("impulse position {t} is outside 0..{}", grid.len())));
                }
                Signal::impulse(grid, *t)
            }
            SignalSpec::Random => Signal::random(grid, seed),
            SignalSpec::File(p) => io::read_signal_csv(p, grid)?,
        })
    }
}

fn grid_and_window(args: &GridArgs, run: &mut Run) -> CliResult<(PhaseGrid, Window)> {
    run.input("L", args.len);
    run.input("window", &args.window);
    let grid = PhaseGrid::new(args.len)?;
    let window = args.window.build(grid)?;
    Ok((grid, window))
}

/// Reads `--mask`: an existing file, inline JSON, `disk:<R>` or `full`.
fn load_mask(arg: &str, grid: PhaseGrid, run: &mut Run) -> CliResult<DomainMask> {
    run.input("mask", arg);
    if Path::new(arg).is_file() {
        return Ok(io::read_mask(arg, grid)?);
    }
    if arg.trim_start().starts_with('{') {
        let desc: MaskDescriptor =
            serde_json::from_str(arg).map_err(|e| CliError::Usage(format!("bad mask JSON: {e}")))?;
        return Ok(desc.build(grid)?);
    }
    if let Some(r) = arg.strip_prefix("disk:") {
        let radius: f64 = r.parse().map_err(|_| CliError::Usage(format!("bad disk radius '{r}'")))?;
        return Ok(DomainMask::disk(grid, (0.0, 0.0), radius)?);
    }
    if arg == "full" {
        return Ok(DomainMask::full(grid));
    }
    Err(CliError::Usage(format!("mask file not found: {arg}")))
}

fn require_nonempty(mask: &DomainMask) -> CliResult<()> {
    if mask.is_empty() {
        return Err(CliError::Usage("mask is empty".into()));
    }
    Ok(())
}

pub fn spectrogram(args: &SpectrogramArgs, seed: u64, run: &mut Run) -> CliResult<()> {
    let (grid, window) = grid_and_window(&args.grid, run)?;
    run.input("signal", &args.signal);
    let f = args.signal.build(grid, seed)?;
    run.set_out_dir(&args.out)?;
    let field = tfa::spectrogram(&f, &window)?;
    io::write_field_csv(run.output("spectrogram.csv"), &field)?;
    io::write_field_pgm(run.output("spectrogram.pgm"), &field)?;
    run.record_outputs(["spectrogram.pgm.json".to_string()]);
    let (m, n) = field.argmax();
    println!(
        "spectrogram: max {:.6} at z = ({:.4}, {:.4})",
        field.max(),
        grid.coord(m),
        grid.coord(n)
    );
    Ok(())
}

/// What `eigs` writes next to the eigenvalues.
#[derive(Debug, Serialize)]
struct EigsStats {
    #[serde(rename = "L")]
    len: usize,
    solver: String,
    k: usize,
    area: f64,
    perimeter: f64,
    #[serde(rename = "A")]
    a_omega: usize,
    trace: f64,
    trace_sq: f64,
    deficit: f64,
    /// Present when at least `A` eigenpairs were computed.
    eigen_deficit: Option<f64>,
    l1_error_identity: Option<f64>,
    mid_count: usize,
    mid_count_exact: bool,
    max_residual: f64,
    orthonormality_error: f64,
}

pub fn eigs(args: &EigsArgs, seed: u64, run: &mut Run) -> CliResult<()> {
    let (grid, window) = grid_and_window(&args.grid, run)?;
    let mask = load_mask(&args.mask, grid, run)?;
    require_nonempty(&mask)?;
    run.input("solver", args.solver);
    run.input("k", args.k);
    let op = LocOperator::from_mask(&mask, window)?;
    let a = accspec::a_omega(&mask)?;
    let (es, solver) = match args.solver {
        SolverSpec::Dense => (eigh(&op)?, "dense".to_string()),
        SolverSpec::Iterative { margin } => {
            let k = args.k.unwrap_or(a + margin);
            let opts = IterativeOptions {
                seed,
                ..IterativeOptions::default()
            };
            (top_eigs_iterative(&op, k, &opts)?, "iterative".to_string())
        }
    };
    let k = args.k.unwrap_or(es.len());
    if k == 0 || k > es.len() {
        return Err(CliError::Usage(format!("--k {k} must lie in 1..={}", es.len())));
    }
    run.set_out_dir(&args.out)?;
    let lam = &es.eigenvalues()[..k];
    io::write_eigenvalues_csv(run.output("eigenvalues.csv"), lam)?;

    let trace = op.trace_symbol();
    let trace_sq = op.trace_square_ambiguity()?;
    let (eigen_deficit, l1_identity, mid_count, mid_exact) = if es.len() >= a {
        let ps = accspec::plunge_stats(&es, &mask, &op, DEFAULT_MID_DELTA)?;
        let l1 = accspec::l1_error_from_eigenvalues(&es, &mask)?;
        (Some(ps.eigen_deficit), Some(l1), ps.mid_count, ps.mid_count_exact)
    } else {
        let d = DEFAULT_MID_DELTA;
        let count = es.eigenvalues().iter().filter(|&&v| v >= d && v <= 1.0 - d).count();
        (None, None, count, false)
    };
    let stats = EigsStats {
        len: grid.len(),
        solver,
        k,
        area: mask.area(),
        perimeter: mask.perimeter(),
        a_omega: a,
        trace,
        trace_sq,
        deficit: trace - trace_sq,
        eigen_deficit,
        l1_error_identity: l1_identity,
        mid_count,
        mid_count_exact: mid_exact,
        max_residual: es.max_residual(&op)?,
        orthonormality_error: es.orthonormality_error(),
    };
    io::write_json(run.output("stats.json"), &stats)?;
    if args.vectors {
        let dir = run.out_dir().expect("output directory set").to_path_buf();
        io::write_eigenvectors(&dir, "eigenvectors", &es)?;
        run.record_outputs(["eigenvectors.bin".to_string(), "eigenvectors.json".to_string()]);
    }
    println!(
        "eigs: {k} eigenvalues, lambda_1 = {:.10}, A = {a}, residual {:.2e}",
        lam[0], stats.max_residual
    );
    Ok(())
}

pub fn accspec(args: &AccspecArgs, seed: u64, run: &mut Run) -> CliResult<()> {
    let (grid, window) = grid_and_window(&args.grid, run)?;
    let mask = load_mask(&args.mask, grid, run)?;
    require_nonempty(&mask)?;
    run.input("solver", args.solver);
    let ambiguity = tfa::ambiguity_sq(&window);
    let result = harness::run_domain(&mask, &window, args.solver, seed, DEFAULT_MID_DELTA, &ambiguity)?;
    run.set_out_dir(&args.out)?;
    let field = result.rho.field();
    io::write_field_pgm(run.output("rho.pgm"), field)?;
    run.record_outputs(["rho.pgm.json".to_string()]);
    if args.csv {
        io::write_field_csv(run.output("rho.csv"), field)?;
    }
    io::write_eigenvalues_csv(run.output("eigenvalues.csv"), result.eigs.eigenvalues())?;
    let stats = result.stats();
    io::write_json(run.output("stats.json"), &stats)?;
    if result.rho.has_degenerate_cutoff() {
        eprintln!("warning: A_Omega cuts through a near-degenerate eigenvalue cluster");
    }
    println!(
        "accspec: A = {}, l1_error = {:.10}, deficit = {:.10}, max rho = {:.10}",
        stats.a_omega,
        stats.l1_error,
        stats.deficit,
        field.max()
    );
    Ok(())
}

pub fn sweep(args: &SweepArgs, seed: u64, run: &mut Run) -> CliResult<()> {
    let mut config = SweepConfig::from_json_file(&args.config)?;
    if let Some(out) = &args.out {
        config.out_dir = Some(out.clone());
    }
    if args.jobs.is_some() {
        config.jobs = args.jobs;
    }
    if seed != 0 {
        config.seed = seed;
    }
    run.input("config", &config);
    let out = config
        .out_dir
        .clone()
        .ok_or_else(|| CliError::Usage("sweep needs an output directory (out_dir or --out)".into()))?;
    run.set_out_dir(&out)?;
    let report = harness::run_rate_sweep(&config)?;
    run.record_outputs(["sweep.csv".to_string(), "rate_report.json".to_string()]);
    for r in &report.records {
        let mut names = vec![format!("stats_R{}.json", r.radius)];
        if config.heatmaps {
            names.push(format!("heatmap_R{}.pgm", r.radius));
            names.push(format!("heatmap_R{}.pgm.json", r.radius));
        }
        run.record_outputs(names);
    }
    for (r, ob) in report.records.iter().zip(&report.old_bound_ratio) {
        println!(
            "R={:<5} A={:<5} l1={:.6} l1/per={:.4} deficit={:.6} old-bound ratio={:.4}",
            r.radius,
            r.a_omega,
            r.l1_error,
            r.l1_error / r.perimeter,
            r.deficit,
            ob
        );
    }
    match &report.fit {
        Some(f) => println!("slope {:.4} (residual {:.2e})", f.slope, f.residual),
        None => println!("warning: single radius, no fit"),
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct OracleSummary {
    #[serde(rename = "R")]
    radius: f64,
    #[serde(rename = "A")]
    a_omega: usize,
    area: f64,
    /// By radial quadrature; absent outside the supported radius range.
    l1_error: Option<f64>,
    l1_error_identity: f64,
}

pub fn oracle(args: &OracleArgs, run: &mut Run) -> CliResult<()> {
    let r = args.radius;
    if !(r > 0.0 && r.is_finite()) {
        return Err(CliError::Usage(format!("--R must be positive, got {r}")));
    }
    run.input("R", r);
    let a = oracle::disk_a_omega(r);
    let k_max = args.k_max.unwrap_or(2 * a + 20);
    let r_max = args.r_max.unwrap_or(r + 4.0);
    if r_max.is_nan() || r_max <= 0.0 || args.samples < 2 {
        return Err(CliError::Usage("--r-max must be positive and --samples at least 2".into()));
    }
    run.input("k_max", k_max);
    run.input("r_max", r_max);
    run.set_out_dir(&args.out)?;
    let model = oracle::GaussianDiskModel::new(r, k_max);
    io::write_oracle_csv(run.output("oracle_eigenvalues.csv"), &model.eigenvalues)?;
    io::write_radial_csv(
        run.output("radial_profile.csv"),
        &oracle::radial_profile(r, r_max, args.samples),
    )?;
    let summary = OracleSummary {
        radius: r,
        a_omega: a,
        area: std::f64::consts::PI * r * r,
        l1_error: oracle::analytic_l1_error(r).ok(),
        l1_error_identity: oracle::analytic_l1_from_eigenvalues(r),
    };
    io::write_json(run.output("oracle.json"), &summary)?;
    println!(
        "oracle: R = {r}, A = {a}, lambda_0 = {:.10}, l1 = {:.10}",
        model.eigenvalues.first().copied().unwrap_or(0.0),
        summary.l1_error_identity
    );
    Ok(())
}

fn default_check_len() -> usize {
    128
}

/// Corpus for `check`; every field optional.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    #[serde(rename = "L", default = "default_check_len")]
    pub len: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Replaces the built-in domains.
    #[serde(default)]
    pub masks: Option<Vec<MaskDescriptor>>,
    /// Replaces the built-in windows.
    #[serde(default)]
    pub windows: Option<Vec<WindowSpec>>,
    #[serde(default)]
    pub tolerances: CheckTolerances,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            len: default_check_len(),
            seed: None,
            masks: None,
            windows: None,
            tolerances: CheckTolerances::default(),
        }
    }
}

fn corpus_from(config: &CheckConfig, seed: u64) -> CliResult<Vec<CorpusCase>> {
    let grid = PhaseGrid::new(config.len)?;
    let masks = match &config.masks {
        None => harness::corpus_masks(grid, seed)?,
        Some(list) => list
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let shape = serde_json::to_value(d)
                    .ok()
                    .and_then(|v| v.get("shape").and_then(|s| s.as_str()).map(String::from))
                    .unwrap_or_else(|| "mask".into());
                Ok((format!("{shape}{i}"), d.build(grid)?))
            })
            .collect::<CliResult<_>>()?,
    };
    let windows = config.windows.clone().unwrap_or_else(harness::corpus_windows);
    let mut cases = Vec::new();
    for (name, mask) in masks {
        if mask.is_empty() {
            return Err(CliError::Usage(format!("corpus mask '{name}' is empty")));
        }
        for w in &windows {
            cases.push(CorpusCase {
                name: format!("{name}/{}", w.label()),
                mask: mask.clone(),
                window: w.clone(),
            });
        }
    }
    Ok(cases)
}

pub fn check(args: &CheckArgs, seed: u64, run: &mut Run) -> CliResult<()> {
    let config = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", p.display())))?;
            serde_json::from_str::<CheckConfig>(&text)
                .map_err(|e| CliError::Usage(format!("config {}: {e}", p.display())))?
        }
        None => CheckConfig::default(),
    };
    let seed = config.seed.unwrap_or(seed);
    run.input("config", &config);
    if let Some(out) = &args.out {
        run.set_out_dir(out)?;
    }
    let cases = corpus_from(&config, seed)?;
    let results: Vec<CaseCheck> = harness::check_corpus(&cases, config.tolerances)?;
    let mut failed = 0;
    for c in &results {
        if c.pass() {
            println!("PASS {}", c.name);
            continue;
        }
        failed += 1;
        println!("FAIL {}", c.name);
        if !c.lemma.pass {
            println!("  convolution lemma: {:.3e} > {:.3e}", c.lemma.lhs, c.lemma.rhs);
        }
        for e in c.suite.failures() {
            println!("  {} ({}): lhs {:.3e}, rhs {:.3e}", e.name, e.statement, e.lhs, e.rhs);
        }
    }
    if args.out.is_some() {
        io::write_json(run.output("check_report.json"), &results)?;
    }
    println!("{} of {} cases passed", results.len() - failed, results.len());
    if failed > 0 {
        return Err(CliError::CheckFailed(format!("{failed} case(s) violate a discrete inequality")));
    }
    Ok(())
}
