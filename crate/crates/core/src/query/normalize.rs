use std::collections::BTreeSet;

use super::{QVertex, QueryGraph, TriplePattern};

/// Replaces every constant vertex with a fresh `?cN` variable.
///
/// `N` counts up in vertex order, skipping names the query already uses, so
/// the output is deterministic. Each constant vertex gets one variable, which
/// keeps repeated occurrences of a constant joined.
pub fn normalize(q: &QueryGraph) -> QueryGraph {
    if q.is_all_variable() {
        return q.clone();
    }
    let taken: BTreeSet<String> = q.variables().into_iter().collect();
    let mut next = 0usize;
    let renamed: Vec<QVertex> = q
        .vertices()
        .iter()
        .map(|v| match v {
            QVertex::Var(_) => v.clone(),
            QVertex::Const(_) => loop {
                let name = format!("?c{next}");
                next += 1;
                if !taken.contains(&name) {
                    break QVertex::Var(name);
                }
            },
        })
        .collect();
    QueryGraph::assemble(q.edges().iter().map(|e| {
        TriplePattern::new(renamed[e.subject].clone(), e.label.clone(), renamed[e.object].clone())
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::parse_query;

    fn q(text: &str) -> QueryGraph {
        parse_query(text).unwrap().remove(0)
    }

    #[test]
    fn constants_become_fresh_variables() {
        let n = normalize(&q("SELECT * WHERE { ?x <influencedBy> <Aristotle> . ?x <mainInterest> \"Ethics\" }"));
        assert!(n.is_all_variable());
        assert_eq!(n.to_string(), "SELECT * WHERE { ?x <influencedBy> ?c0 . ?x <mainInterest> ?c1 }");
    }

    #[test]
    fn all_variable_is_fixpoint() {
        let orig = q("SELECT * WHERE { ?x <p> ?y . ?y <q> ?z }");
        assert_eq!(normalize(&orig), orig);
    }

    #[test]
    fn shared_constant_shares_variable_and_skips_taken_names() {
        let n = normalize(&q("SELECT * WHERE { ?c0 <p> <m1> . ?y <q> <m1> }"));
        assert_eq!(n.to_string(), "SELECT * WHERE { ?c0 <p> ?c1 . ?y <q> ?c1 }");
        assert_eq!(n.vertex_count(), 3);
    }
}
