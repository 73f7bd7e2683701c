use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use monadforge_core::exec::with_jobs;
use monadforge_core::monad::{build_monad, rank_certificate, Profile};
use monadforge_core::oracle::{h0_wedge_kernel, OracleOptions};
use monadforge_core::picard::{Polarization, SpaceSpec, Twist};

fn rank_trials(c: &mut Criterion) {
    let md = build_monad(
        &SpaceSpec::new(vec![2, 2]).unwrap(),
        &Polarization::new(vec![2, 2]).unwrap(),
        2,
        Profile::Paper,
    )
    .unwrap();
    let mut group = c.benchmark_group("rank_certificate");
    group.sample_size(10);
    for jobs in [Some(1), None] {
        let label = jobs.map_or("pool".to_string(), |j| format!("jobs={j}"));
        group.bench_with_input(BenchmarkId::from_parameter(label), &jobs, |b, &jobs| {
            b.iter(|| with_jobs(jobs, || rank_certificate(&md, 64, 1_000_003, 0).unwrap()))
        });
    }
    group.finish();
}

fn wedge_kernel(c: &mut Criterion) {
    let md = build_monad(
        &SpaceSpec::new(vec![2]).unwrap(),
        &Polarization::new(vec![1]).unwrap(),
        2,
        Profile::Homogeneous,
    )
    .unwrap();
    let b = Twist::new(vec![1, 1]);
    let opts = OracleOptions::default();
    let mut group = c.benchmark_group("h0_wedge_kernel");
    group.sample_size(10);
    for jobs in [Some(1), None] {
        let label = jobs.map_or("pool".to_string(), |j| format!("jobs={j}"));
        group.bench_with_input(BenchmarkId::from_parameter(label), &jobs, |bch, &jobs| {
            bch.iter(|| with_jobs(jobs, || h0_wedge_kernel(&md, 2, &b, &opts).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, rank_trials, wedge_kernel);
criterion_main!(benches);
