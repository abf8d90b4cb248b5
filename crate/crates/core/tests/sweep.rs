use tfloc::harness::{check_corpus, regression_corpus, run_rate_sweep, SolverSpec, SweepConfig};
use tfloc::PhaseGrid;

#[test]
fn corpus_passes_every_check_at_l128() {
    let cases = regression_corpus(PhaseGrid::new(128).unwrap(), 0).unwrap();
    for c in check_corpus(&cases, Default::default()).unwrap() {
        assert!(c.pass(), "{}: {:?}", c.name, c);
    }
}

#[test]
fn sweep_outputs_are_reproducible() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut csvs = Vec::new();
    for d in &dirs {
        let config = SweepConfig {
            radii: vec![2.0, 1.0, 1.5],
            len: 256,
            solver: SolverSpec::Iterative { margin: 16 },
            out_dir: Some(d.path().to_path_buf()),
            ..SweepConfig::default()
        };
        let report = run_rate_sweep(&config).unwrap();
        let radii: Vec<f64> = report.records.iter().map(|r| r.radius).collect();
        assert_eq!(radii, vec![1.0, 1.5, 2.0]);
        for name in ["rate_report.json", "stats_R1.5.json", "heatmap_R2.pgm", "heatmap_R2.pgm.json"] {
            assert!(d.path().join(name).exists(), "{name}");
        }
        csvs.push(std::fs::read(d.path().join("sweep.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
    let text = String::from_utf8(csvs.remove(0)).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.starts_with("R,L,area,perimeter,A,l1_error"));
}

#[test]
fn iterative_and_dense_sweeps_agree() {
    let base = SweepConfig {
        radii: vec![1.0, 2.0],
        len: 256,
        ..SweepConfig::default()
    };
    let dense = run_rate_sweep(&SweepConfig { solver: SolverSpec::Dense, ..base.clone() }).unwrap();
    let iter = run_rate_sweep(&base).unwrap();
    for (a, b) in dense.records.iter().zip(&iter.records) {
        assert!((a.l1_error - b.l1_error).abs() < 1e-8);
        assert!((a.deficit - b.deficit).abs() < 1e-12);
        assert_eq!(a.mid_count, b.mid_count);
    }
}

/// The fitted exponent should not depend on the resolution.
#[test]
fn slope_is_stable_across_resolutions() {
    let slope = |len| {
        let config = SweepConfig {
            radii: vec![2.0, 3.0, 4.0],
            len,
            ..SweepConfig::default()
        };
        run_rate_sweep(&config).unwrap().fit.unwrap().slope
    };
    let (coarse, fine) = (slope(1024), slope(4096));
    assert!((coarse - fine).abs() < 0.15, "{coarse} vs {fine}");
}
