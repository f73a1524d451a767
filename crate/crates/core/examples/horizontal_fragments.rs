//! Split pattern matches by the constants the workload filters on.

use rdffrag::fragmenter::{enumerate_minterms, harvest_simple_predicates, horizontal_fragmentation};
use rdffrag::miner::{access_frequency, FrequentPattern, Pattern, PatternStats};
use rdffrag::query::{parse_query, parse_workload};
use rdffrag::rdf::{parse_ntriples, split_hot_cold};

fn main() {
    let g = parse_ntriples(include_str!("../fixtures/g0.nt")).unwrap();
    let w = parse_workload(include_str!("../fixtures/w1.rq")).unwrap();
    let split = split_hot_cold(&g, &w, 2);

    let star = parse_query("SELECT * WHERE { ?x <influencedBy> ?y . ?x <mainInterest> ?z }").unwrap().remove(0);
    let p = Pattern::from_shape(&star).unwrap();
    let sps = harvest_simple_predicates(&p, &w);
    for sp in &sps {
        println!("simple predicate: {sp}");
    }
    let set = enumerate_minterms(&p, &sps, &w, 1);
    for m in &set.minterms {
        println!("minterm [{}] acc={}", m.descriptor(), m.acc);
    }

    let acc = access_frequency(&w, &p);
    let stats = PatternStats::measure(FrequentPattern { pattern: p, acc }, &split.hot);
    let frags = horizontal_fragmentation(&[stats], &split.hot, &w, 1);
    for f in &frags.fragments {
        println!("{} [{}] edges={} matches={}", f.id, f.source.descriptor(), f.edge_count(), f.match_count);
    }
}
