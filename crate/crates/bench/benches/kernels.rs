use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use tfloc::accspec;
use tfloc::locop::{eigh, top_eigs_iterative, IterativeOptions};
use tfloc::tfa;
use tfloc::LocOperator;
use tfloc_bench::DiskFixture;

fn stft(c: &mut Criterion) {
    let mut group = c.benchmark_group("spectrogram");
    for len in [256, 1024] {
        let f = DiskFixture::new(len, 2.0);
        group.bench_with_input(BenchmarkId::from_parameter(len), &f, |b, f| {
            b.iter(|| tfa::spectrogram(black_box(&f.signal), &f.window).unwrap())
        });
    }
    group.finish();
}

fn apply(c: &mut Criterion) {
    let mut group = c.benchmark_group("apply_disk_r2");
    for len in [1024, 4096] {
        let f = DiskFixture::new(len, 2.0);
        group.bench_with_input(BenchmarkId::from_parameter(len), &f, |b, f| {
            b.iter(|| f.op.apply(black_box(&f.signal)).unwrap())
        });
    }
    group.finish();
}

fn trace_square(c: &mut Criterion) {
    let f = DiskFixture::new(1024, 4.0);
    let amb = tfa::ambiguity_sq(&f.window);
    c.bench_function("trace_square_1024", |b| b.iter(|| f.op.trace_square_with(black_box(&amb)).unwrap()));
}

fn assemble(c: &mut Criterion) {
    let f = DiskFixture::new(256, 2.0);
    c.bench_function("assemble_256", |b| {
        b.iter(|| {
            // A fresh operator each time, since the dense matrix is cached.
            let op = LocOperator::from_mask(&f.mask, f.window.clone()).unwrap();
            op.assemble().unwrap().nrows()
        })
    });
}

fn eigensolvers(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigensolvers");
    group.sample_size(10).measurement_time(Duration::from_secs(20));
    let f = DiskFixture::new(256, 2.0);
    group.bench_function("eigh_256", |b| {
        b.iter(|| {
            let op = LocOperator::from_mask(&f.mask, f.window.clone()).unwrap();
            eigh(&op).unwrap().len()
        })
    });
    let f = DiskFixture::new(1024, 2.0);
    let k = accspec::a_omega(&f.mask).unwrap() + 16;
    group.bench_function("iterative_1024_r2", |b| {
        b.iter(|| top_eigs_iterative(&f.op, k, &IterativeOptions::default()).unwrap().len())
    });
    group.finish();
}

criterion_group!(benches, stft, apply, trace_square, assemble, eigensolvers);
criterion_main!(benches);
