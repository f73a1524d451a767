//! Decompose, plan and execute a query over simulated sites.

use rdffrag::engine::{decompose, execute, optimize};
use rdffrag::matcher::evaluate;
use rdffrag::pipeline::{run_offline, Params};
use rdffrag::query::{parse_query, parse_workload};
use rdffrag::rdf::parse_ntriples;

fn main() {
    let g = parse_ntriples(include_str!("../fixtures/g0.nt")).unwrap();
    let w = parse_workload(include_str!("../fixtures/w0.rq")).unwrap();
    let off = run_offline(&g, &w, &Params { theta: 2, min_sup: 2, sc: Some(9), ..Params::default() }).unwrap();
    let engine = off.engine();

    let q = parse_query(include_str!("../fixtures/q7.rq")).unwrap().remove(0);
    let d = decompose(&q, &engine.dictionary);
    for s in &d.subqueries {
        println!("subquery {} card={} edges={:?}", s.kind, s.card, s.edges);
    }
    let plan = optimize(&d);
    println!("decomposition cost={} plan={:?} est_cost={}", d.cost, plan.order, plan.est_cost);

    let report = execute(&q, &plan, &d, &engine.cluster, &engine.dictionary);
    print!("{}", report.bindings.to_table());
    println!("sites={:?} shipped={}", report.sites_touched, report.shipped_bindings);
    assert_eq!(report.bindings, evaluate(&q, &g));
}
