//! Dynamic-programming join ordering over estimated cardinalities.

use std::collections::BTreeSet;

use rdffrag::engine::optimize_cards;

fn vars(names: &[&str]) -> BTreeSet<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn main() {
    let cards = [2, 3, 5];
    let shared = vec![vars(&["?x"]); 3];
    let plan = optimize_cards(&cards, &shared);
    println!("chain of {cards:?}: order={:?} cost={}", plan.order, plan.est_cost);

    let cards = [100, 4, 7, 1];
    let v = vec![vars(&["?a", "?b"]), vars(&["?b", "?c"]), vars(&["?c"]), vars(&["?z"])];
    let plan = optimize_cards(&cards, &v);
    println!("mixed {cards:?}: order={:?} cost={}", plan.order, plan.est_cost);
}
