//! Parse an N-Triples graph and answer a basic graph pattern on one machine.

use rdffrag::matcher::evaluate;
use rdffrag::query::parse_query;
use rdffrag::rdf::parse_ntriples;

fn main() {
    let g = parse_ntriples(include_str!("../fixtures/g0.nt")).expect("fixture parses");
    println!("{} triples, {} vertices", g.edge_count(), g.vertex_count());

    let text = "SELECT * WHERE { ?x <influencedBy> ?y . ?x <mainInterest> ?z }";
    for q in parse_query(text).expect("query parses") {
        println!("query: {q}");
        print!("{}", evaluate(&q, &g).to_table());
    }
}
