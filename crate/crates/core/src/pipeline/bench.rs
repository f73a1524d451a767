use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use crate::engine::QueryEngine;
use crate::matcher::evaluate;
use crate::query::QueryGraph;
use crate::rdf::RdfGraph;

pub const BENCH_HEADER: &str = "strategy\tqueries\tmean_ms\tmedian_ms\tqpm\tmean_sites\tshipped\tmismatches";

/// Aggregates of one workload replay.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub strategy: String,
    pub queries: usize,
    pub mean_ms: f64,
    pub median_ms: f64,
    /// Queries per minute of wall-clock time.
    pub qpm: f64,
    pub mean_sites: f64,
    pub shipped: usize,
    /// Queries whose answer differs from single-machine evaluation.
    pub mismatches: usize,
}

impl BenchRow {
    pub fn to_tsv(&self) -> String {
        format!(
            "{}\t{}\t{:.3}\t{:.3}\t{:.1}\t{:.3}\t{}\t{}",
            self.strategy, self.queries, self.mean_ms, self.median_ms, self.qpm, self.mean_sites, self.shipped, self.mismatches
        )
    }
}

struct Sample {
    elapsed: Duration,
    sites: usize,
    shipped: usize,
    mismatch: bool,
}

/// Replays `queries` on `concurrency` worker threads sharing one engine.
/// With an `oracle` graph every answer is also checked against direct
/// evaluation. `None` when there are no queries.
pub fn run_bench(
    engine: &QueryEngine,
    strategy: &str,
    queries: &[QueryGraph],
    concurrency: usize,
    oracle: Option<&RdfGraph>,
) -> Option<BenchRow> {
    if queries.is_empty() {
        return None;
    }
    let next = AtomicUsize::new(0);
    let samples = Mutex::new(Vec::with_capacity(queries.len()));
    let start = Instant::now();
    thread::scope(|scope| {
        for _ in 0..concurrency.clamp(1, queries.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(q) = queries.get(i) else { break };
                let out = engine.run(q);
                let mismatch = oracle.is_some_and(|g| evaluate(q, g) != out.report.bindings);
                samples.lock().expect("bench worker panicked").push(Sample {
                    elapsed: out.report.elapsed,
                    sites: out.report.sites_touched.len(),
                    shipped: out.report.shipped_bindings,
                    mismatch,
                });
            });
        }
    });
    let wall = start.elapsed();
    let samples = samples.into_inner().expect("bench worker panicked");
    let n = samples.len();
    let mut ms: Vec<f64> = samples.iter().map(|s| s.elapsed.as_secs_f64() * 1e3).collect();
    ms.sort_by(f64::total_cmp);
    let median_ms = if n % 2 == 1 { ms[n / 2] } else { (ms[n / 2 - 1] + ms[n / 2]) / 2.0 };
    Some(BenchRow {
        strategy: strategy.to_string(),
        queries: n,
        mean_ms: ms.iter().sum::<f64>() / n as f64,
        median_ms,
        qpm: n as f64 / wall.as_secs_f64().max(1e-9) * 60.0,
        mean_sites: samples.iter().map(|s| s.sites).sum::<usize>() as f64 / n as f64,
        shipped: samples.iter().map(|s| s.shipped).sum(),
        mismatches: samples.iter().filter(|s| s.mismatch).count(),
    })
}

/// Header plus one line per row.
pub fn bench_table(rows: &[BenchRow]) -> String {
    let mut out = format!("{BENCH_HEADER}\n");
    for r in rows {
        out.push_str(&r.to_tsv());
        out.push('\n');
    }
    out
}
