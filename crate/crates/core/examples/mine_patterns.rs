//! Mine frequent access patterns from a workload.

use rdffrag::miner::{mine_frequent_patterns, MinerConfig};
use rdffrag::query::parse_workload;
use rdffrag::rdf::{parse_ntriples, split_hot_cold};

fn main() {
    let g = parse_ntriples(include_str!("../fixtures/g0.nt")).unwrap();
    let w = parse_workload(include_str!("../fixtures/w0.rq")).unwrap();
    let split = split_hot_cold(&g, &w, 2);
    let cfg = MinerConfig { min_sup: 2, ..MinerConfig::default() };
    for fp in mine_frequent_patterns(&w, &split.frequent_properties, cfg) {
        println!("{}\tacc={}\tedges={}", fp.pattern.code(), fp.acc, fp.pattern.edge_count());
    }
}
