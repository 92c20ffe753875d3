//! Parallel against sequential execution of the batch workloads. With the
//! `parallel` feature each workload runs on a one-thread pool and on the
//! default pool; `--no-default-features` benches the sequential fallback.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tempo_pcsp::gen;
use tempo_pcsp::minorcond::{report_template, Probes};
use tempo_pcsp::par;
use tempo_pcsp::repro::templates;
use tempo_pcsp::tempsolve::{solve, TemporalInstance};

fn planted_batch() -> Vec<TemporalInstance> {
    let b = templates::x();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    (0..16).map(|_| gen::planted_with(b.declared(), 16, 50, &mut rng).0).collect()
}

fn solve_batch(xs: &[TemporalInstance]) -> usize {
    let b = templates::x();
    par::map(xs, |x| solve(x, &b).expect("solver runs").is_sat()).into_iter().filter(|&s| s).count()
}

fn ineq_report() -> bool {
    report_template(2, &templates::i_neq(), &Probes::standard()).is_ok()
}

#[cfg(feature = "parallel")]
fn modes() -> Vec<(String, rayon::ThreadPool)> {
    let mut counts = vec![1, rayon::current_num_threads()];
    counts.dedup();
    counts
        .into_iter()
        .map(|n| (format!("threads={n}"), rayon::ThreadPoolBuilder::new().num_threads(n).build().expect("pool")))
        .collect()
}

fn bench(c: &mut Criterion) {
    let xs = planted_batch();
    let mut g = c.benchmark_group("engines");
    g.sample_size(10);
    #[cfg(feature = "parallel")]
    for (name, pool) in modes() {
        g.bench_with_input(BenchmarkId::new("solve_planted_x", &name), &xs, |bch, xs| {
            bch.iter(|| pool.install(|| solve_batch(xs)))
        });
        g.bench_function(BenchmarkId::new("report_ineq", &name), |bch| bch.iter(|| pool.install(ineq_report)));
    }
    #[cfg(not(feature = "parallel"))]
    {
        g.bench_with_input(BenchmarkId::new("solve_planted_x", "sequential"), &xs, |bch, xs| bch.iter(|| solve_batch(xs)));
        g.bench_function(BenchmarkId::new("report_ineq", "sequential"), |bch| bch.iter(ineq_report));
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
