//! Randomized checks of the discrete identities and inequalities.

use proptest::prelude::*;
use tfloc::accspec::{self, AccumulatedSpectrogram};
use tfloc::harness::{inequality_suite, lemma_var_check};
use tfloc::locop::eigh;
use tfloc::tfa::{self, field_l1};
use tfloc::{DomainMask, LocOperator, PhaseGrid, Signal, Window};

fn window(grid: PhaseGrid, kind: usize) -> Window {
    match kind {
        0 => Window::gaussian(grid),
        1 => Window::hann(grid, 2.0).unwrap(),
        _ => Window::boxcar(grid, 1.0).unwrap(),
    }
}

fn mask(grid: PhaseGrid, blobs: bool, param: f64, seed: u64) -> DomainMask {
    if blobs {
        DomainMask::random_blobs(grid, 1 + (seed % 6) as usize, param * 2.0, seed).unwrap()
    } else {
        DomainMask::random_cells(grid, param * 0.5, seed)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn spectrum_and_traces(seed in any::<u64>(), blobs in any::<bool>(), param in 0.1f64..1.0, kind in 0usize..3) {
        let g = PhaseGrid::new(64).unwrap();
        let m = mask(g, blobs, param, seed);
        prop_assume!(!m.is_empty());
        let w = window(g, kind);
        let op = LocOperator::from_mask(&m, w).unwrap();
        let h = op.assemble().unwrap();
        let trace: f64 = (0..64).map(|i| h[(i, i)].re).sum();
        prop_assert!((trace - m.area()).abs() <= 1e-9 * m.area());
        let frob = h.norm_squared();
        let tsq = op.trace_square_ambiguity().unwrap();
        prop_assert!((frob - tsq).abs() <= 1e-8 * frob.max(1e-300));

        let es = eigh(&op).unwrap();
        prop_assert!(es.eigenvalues().iter().all(|&l| (-1e-9..=1.0 + 1e-9).contains(&l)));
        prop_assert!(es.max_residual(&op).unwrap() <= 1e-8);
        prop_assert!(es.orthonormality_error() <= 1e-8);

        // Min-max: no unit vector beats the top eigenvalue.
        let top = es.eigenvalues()[0];
        for s in 0..10 {
            let f = Signal::random(g, seed ^ s).normalized();
            prop_assert!(op.quadratic_form(&f).unwrap() <= top + 1e-9);
        }
        prop_assert!((op.quadratic_form(&es.eigenvectors()[0]).unwrap() - top).abs() <= 1e-9);
    }

    #[test]
    fn accumulated_spectrogram_contracts(seed in any::<u64>(), blobs in any::<bool>(), param in 0.1f64..1.0, kind in 0usize..3) {
        let g = PhaseGrid::new(64).unwrap();
        let m = mask(g, blobs, param, seed);
        prop_assume!(!m.is_empty());
        let w = window(g, kind);
        let op = LocOperator::from_mask(&m, w.clone()).unwrap();
        let es = eigh(&op).unwrap();
        let rho = AccumulatedSpectrogram::new(&es, &w, &m).unwrap();
        prop_assert!(rho.field().max() <= 1.0 + 1e-8);
        prop_assert!((field_l1(rho.field()) - rho.a_omega() as f64).abs() <= 1e-8);
        let err = accspec::l1_error(&rho).unwrap();
        let ident = accspec::l1_error_from_eigenvalues(&es, &m).unwrap();
        prop_assert!((err - ident).abs() <= 1e-8, "{} vs {}", err, ident);

        let ps = accspec::plunge_stats(&es, &m, &op, accspec::DEFAULT_MID_DELTA).unwrap();
        prop_assert!(ps.eigen_deficit >= -1e-8);
        prop_assert!(ps.eigen_deficit <= ps.deficit + 1e-8);
        prop_assert!(ps.deficit <= tfa::mstar_norm(&w) * m.perimeter() + 1e-8);
        prop_assert!(err >= ps.deficit - 1e-8);
        prop_assert!(err <= 1.0 + 2.0 * ps.eigen_deficit + 1e-8);
        prop_assert!(ps.step2_slack() >= -1e-8);
    }

    #[test]
    fn convolution_lemma(seed in any::<u64>(), blobs in any::<bool>(), param in 0.05f64..1.0, kind in 0usize..3) {
        let g = PhaseGrid::new(128).unwrap();
        let m = mask(g, blobs, param, seed);
        let v = lemma_var_check(&m, &window(g, kind)).unwrap();
        prop_assert!(v.pass, "{:?}", v);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn suite_holds_on_random_domains(seed in any::<u64>(), param in 0.2f64..1.0, kind in 0usize..3) {
        let g = PhaseGrid::new(64).unwrap();
        let m = mask(g, true, param, seed);
        let r = inequality_suite(&m, &window(g, kind)).unwrap();
        prop_assert!(r.all_pass(), "{:?}", r.failures().collect::<Vec<_>>());
    }
}
