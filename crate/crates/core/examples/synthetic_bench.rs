//! Compare both strategies on a generated graph and workload.
//!
//! `cargo run --release --example synthetic_bench -- 50000 500 3`

use rdffrag::fragmenter::Strategy;
use rdffrag::pipeline::{bench_table, run_bench, run_offline, Params};
use rdffrag::synth::bench_dataset;

fn arg(i: usize, default: usize) -> usize {
    std::env::args().nth(i).and_then(|s| s.parse().ok()).unwrap_or(default)
}

fn main() {
    let (triples, queries, sites) = (arg(1, 5000), arg(2, 100), arg(3, 3));
    let (g, w) = bench_dataset(1, triples, queries);
    let mut rows = Vec::new();
    for strategy in [Strategy::Vertical, Strategy::Horizontal] {
        let params = Params { theta: 2, min_sup: 2, sites, strategy, ..Params::default() };
        let off = run_offline(&g, &w, &params).unwrap();
        let s = off.summary();
        eprintln!("{strategy}: {} patterns, redundancy {:.3}, site edges {:?}", s.patterns, s.redundancy, s.site_edges);
        rows.extend(run_bench(&off.engine(), &strategy.to_string(), w.queries(), 4, Some(&g)));
    }
    print!("{}", bench_table(&rows));
}
