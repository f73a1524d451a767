//! Separate edges of frequently queried properties from the rest.

use rdffrag::query::parse_workload;
use rdffrag::rdf::{parse_ntriples, property_frequencies, split_hot_cold};

fn main() {
    let g = parse_ntriples(include_str!("../fixtures/g0.nt")).unwrap();
    let w = parse_workload(include_str!("../fixtures/w0.rq")).unwrap();
    for (p, n) in property_frequencies(&w) {
        println!("{p}: used by {n} queries");
    }
    let split = split_hot_cold(&g, &w, 2);
    println!("hot edges: {}", split.hot.edge_count());
    println!("cold edges: {}", split.cold.edge_count());
}
