use criterion::{criterion_group, criterion_main, Criterion};
use qualecon_core::sensitivity::{analyze_template, efast_indices, generate_samples, presets, OutputMeasure};

fn ishigami(c: &mut Criterion) {
    let design = presets::ishigami_design(1025, 2);
    let mut g = c.benchmark_group("efast");
    g.sample_size(20);
    g.bench_function("ishigami sampling", |b| b.iter(|| generate_samples(&design, 1).unwrap()));
    g.bench_function("ishigami indices", |b| {
        b.iter(|| efast_indices(|x| Ok(presets::ishigami(x)), &design, 1).unwrap())
    });
    g.finish();
}

fn abstract_grouping(c: &mut Criterion) {
    let design = presets::abstract_design();
    let template = presets::synthetic_ideal_template();
    let mut g = c.benchmark_group("efast");
    g.sample_size(10);
    g.bench_function("abstract design on synthetic template", |b| {
        b.iter(|| analyze_template(&design, &template, OutputMeasure::Roi, 1).unwrap())
    });
    g.finish();
}

criterion_group!(benches, ishigami, abstract_grouping);
criterion_main!(benches);
