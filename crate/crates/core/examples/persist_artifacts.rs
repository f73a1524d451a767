//! Write fragments, dictionary and allocation to disk and reload them.

use rdffrag::pipeline::{run_offline, Artifacts, Params};
use rdffrag::query::{parse_query, parse_workload};
use rdffrag::rdf::parse_ntriples;

fn main() {
    let g = parse_ntriples(include_str!("../fixtures/g0.nt")).unwrap();
    let w = parse_workload(include_str!("../fixtures/w0.rq")).unwrap();
    let off = run_offline(&g, &w, &Params { theta: 2, min_sup: 2, sc: Some(9), ..Params::default() }).unwrap();

    let dir = std::env::temp_dir().join(format!("rdffrag-example-{}", std::process::id()));
    off.persist(&dir).expect("write artifacts");
    print!("{}", off.summary());
    for entry in std::fs::read_dir(&dir).unwrap() {
        println!("wrote {}", entry.unwrap().path().display());
    }

    let loaded = Artifacts::load(&dir).expect("read artifacts");
    let q = parse_query("SELECT * WHERE { ?b <author> ?x . ?x <influencedBy> ?y }").unwrap().remove(0);
    print!("{}", loaded.engine().run(&q).report.bindings.to_table());
    std::fs::remove_dir_all(&dir).ok();
}
