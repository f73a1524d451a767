//! One fragment per selected pattern, holding every edge of its matches.

use rdffrag::pipeline::{run_offline, Params};
use rdffrag::query::parse_workload;
use rdffrag::rdf::{parse_ntriples, serialize_ntriples};

fn main() {
    let g = parse_ntriples(include_str!("../fixtures/g0.nt")).unwrap();
    let w = parse_workload(include_str!("../fixtures/w0.rq")).unwrap();
    let off = run_offline(&g, &w, &Params { theta: 2, min_sup: 2, sc: Some(9), ..Params::default() }).unwrap();
    for f in &off.fragmentation.fragments {
        println!("{} [{}] matches={}", f.id, f.source.descriptor(), f.match_count);
        print!("{}", serialize_ntriples(&f.graph));
    }
    println!("redundancy: {:.3}", off.fragmentation.redundancy(g.edge_count()));
}
