//! Greedy pattern selection under an edge budget.

use rdffrag::miner::{mine_frequent_patterns, MinerConfig, PatternStats};
use rdffrag::query::parse_workload;
use rdffrag::rdf::{parse_ntriples, split_hot_cold};
use rdffrag::selector::{select_patterns, SelectionConfig};

fn main() {
    let g = parse_ntriples(include_str!("../fixtures/g0.nt")).unwrap();
    let w = parse_workload(include_str!("../fixtures/w0.rq")).unwrap();
    let split = split_hot_cold(&g, &w, 2);
    let mined = mine_frequent_patterns(&w, &split.frequent_properties, MinerConfig { min_sup: 2, ..Default::default() });
    let candidates: Vec<PatternStats> = mined.into_iter().map(|fp| PatternStats::measure(fp, &split.hot)).collect();

    for sc in [9, 8, 5, 4] {
        let cfg = SelectionConfig { storage_capacity: sc, min_sup: 2, theta: 2 };
        match select_patterns(&candidates, &w, &cfg) {
            Ok(r) => {
                let codes: Vec<String> = r.selected.iter().map(|s| s.pattern.code().to_string()).collect();
                println!("SC={sc}: benefit={} cost={} {}", r.benefit, r.total_edge_cost, codes.join(" "));
            }
            Err(e) => println!("SC={sc}: {e}"),
        }
    }
}
