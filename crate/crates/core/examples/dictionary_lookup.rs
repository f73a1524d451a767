//! Build the data dictionary and resolve subqueries to fragments.

use rdffrag::dictionary::Dictionary;
use rdffrag::fragmenter::Strategy;
use rdffrag::pipeline::{run_offline, Params};
use rdffrag::query::{parse_query, parse_workload};
use rdffrag::rdf::parse_ntriples;

fn main() {
    let g = parse_ntriples(include_str!("../fixtures/g0.nt")).unwrap();
    let w = parse_workload(include_str!("../fixtures/w1.rq")).unwrap();
    let params = Params { theta: 2, min_sup: 2, sc: Some(9), strategy: Strategy::Horizontal, ..Params::default() };
    let off = run_offline(&g, &w, &params).unwrap();
    let dict = &off.dictionary;
    print!("{}", dict.to_text());

    for text in [
        "SELECT * WHERE { ?x <influencedBy> ?y . ?x <mainInterest> <m1> }",
        "SELECT * WHERE { ?x <influencedBy> ?y . ?x <mainInterest> <m2> }",
        "SELECT * WHERE { ?b <author> ?x }",
    ] {
        let q = parse_query(text).unwrap().remove(0);
        match dict.lookup(&q) {
            Some(l) => println!("{q}\n  -> {:?} card={}", l.fragments, l.card),
            None => println!("{q}\n  -> no pattern, estimate {}", dict.estimate_card(&q)),
        }
    }
    let back = Dictionary::from_text(&dict.to_text()).unwrap();
    assert_eq!(&back, dict);
}
