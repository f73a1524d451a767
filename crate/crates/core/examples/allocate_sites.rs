//! Cluster fragments that are queried together onto the same site.

use rdffrag::allocator::allocate_fragmentation;
use rdffrag::pipeline::{allocation_text, run_offline, Params};
use rdffrag::query::parse_workload;
use rdffrag::rdf::parse_ntriples;

fn main() {
    let g = parse_ntriples(include_str!("../fixtures/g0.nt")).unwrap();
    let w = parse_workload(include_str!("../fixtures/w0.rq")).unwrap();
    let off = run_offline(&g, &w, &Params { theta: 2, min_sup: 2, sc: Some(9), ..Params::default() }).unwrap();

    for ((a, b), weight) in &off.allocation_graph.edges {
        println!("affinity {a}-{b}: {weight}");
    }
    for m in 1..=3 {
        let (_, alloc) = allocate_fragmentation(&off.fragmentation, &w, m);
        println!("m={m}");
        print!("{}", allocation_text(&alloc));
        println!("skew={}", alloc.skew(&off.fragmentation));
    }
}
