use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pvfreq::analyze::default_metrics;
use pvfreq::parallel;
use pvfreq::scenario_io::catalog::{self, CatalogEntry};
use pvfreq::scenario_io::Scenario;
use pvfreq::simulate::run_scenario;

fn batch() -> Vec<Scenario> {
    let sweep = match catalog::get("rcc-sweep").unwrap() {
        CatalogEntry::Sweep(s) => s,
        _ => unreachable!(),
    };
    let mut v = sweep.expand(true).unwrap();
    for id in ["table1-1", "table1-2", "table1-3", "table1-4", "fast-pfc"] {
        v.push(catalog::scenario(id).unwrap());
    }
    v
}

fn nadir(s: &Scenario) -> f64 {
    let r = run_scenario(s, &s.sim).unwrap();
    default_metrics(&r).unwrap().nadir_hz
}

fn scenario_batch(c: &mut Criterion) {
    let scenarios = batch();
    let mut g = c.benchmark_group("scenario_batch");
    g.sample_size(10).measurement_time(Duration::from_secs(5));
    g.bench_function(BenchmarkId::new("sequential", scenarios.len()), |b| {
        b.iter(|| parallel::map_sequential(&scenarios, nadir))
    });
    g.bench_function(BenchmarkId::new("parallel", scenarios.len()), |b| {
        b.iter(|| parallel::map(&scenarios, None, nadir))
    });
    g.finish();
}

fn multifarm(c: &mut Criterion) {
    let seeds: Vec<u64> = (0..8).collect();
    let base = catalog::scenario("multifarm-nodb").unwrap();
    let run_seed = |seed: &u64| {
        let mut s = base.clone();
        s.sim.rng_seed = *seed;
        s.sim.t_end = 60.0;
        nadir(&s)
    };
    let mut g = c.benchmark_group("multifarm_seeds");
    g.sample_size(10).measurement_time(Duration::from_secs(5));
    g.bench_function("sequential", |b| b.iter(|| parallel::map_sequential(&seeds, run_seed)));
    g.bench_function("parallel", |b| b.iter(|| parallel::map(&seeds, None, run_seed)));
    g.finish();
}

criterion_group!(benches, scenario_batch, multifarm);
criterion_main!(benches);
