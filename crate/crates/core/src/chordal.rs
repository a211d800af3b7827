//! Chordality via maximum cardinality search.

use std::collections::BTreeMap;

use crate::graph::{Graph, Vertex};

/// A perfect elimination order (each vertex's later neighbors form a clique),
/// or `None` if the graph has an induced cycle of length at least four.
pub fn perfect_elimination_order(g: &Graph) -> Option<Vec<Vertex>> {
    // MCS visits vertices in reverse elimination order. Ties go to the
    // smallest id so the order is deterministic.
    let mut weight: BTreeMap<Vertex, usize> = g.vertices().map(|v| (v, 0)).collect();
    let mut visit = Vec::with_capacity(weight.len());
    while let Some((&v, _)) = weight.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))) {
        weight.remove(&v);
        for w in g.neighbors(v) {
            if let Some(c) = weight.get_mut(&w) {
                *c += 1;
            }
        }
        visit.push(v);
    }
    visit.reverse();
    let position: BTreeMap<Vertex, usize> = visit.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    for (i, &v) in visit.iter().enumerate() {
        let later: Vec<Vertex> = g.neighbors(v).filter(|w| position[w] > i).collect();
        for (j, &a) in later.iter().enumerate() {
            if later[j + 1..].iter().any(|&b| !g.has_edge(a, b)) {
                return None;
            }
        }
    }
    Some(visit)
}

pub fn is_chordal(g: &Graph) -> bool {
    perfect_elimination_order(g).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn trees_and_cliques_are_chordal() {
        assert!(is_chordal(&Graph::path(&[1, 2, 3, 4, 5])));
        assert!(is_chordal(&Graph::from_edges([(1, 2), (1, 3), (1, 4), (4, 5)])));
        assert!(is_chordal(&Graph::complete(1..=6)));
        assert!(is_chordal(&Graph::empty()));
    }

    #[test]
    fn long_cycles_are_not() {
        assert!(!is_chordal(&Graph::cycle(&[1, 2, 3, 4])));
        assert!(!is_chordal(&Graph::cycle(&[1, 2, 3, 4, 5, 6])));
        assert!(is_chordal(&Graph::cycle(&[1, 2, 3, 4]).with_edge(1, 3).unwrap()));
    }

    #[test]
    fn glued_cliques() {
        assert!(is_chordal(&fixtures::two_k5_on_triangle()));
        assert!(is_chordal(&fixtures::clique_chain(4, 5, 3)));
        assert!(!is_chordal(&fixtures::double_banana().graph.with_edge(3, 6).unwrap()));
    }

    #[test]
    fn order_is_perfect() {
        let g = fixtures::clique_chain(3, 4, 2);
        let order = perfect_elimination_order(&g).unwrap();
        assert_eq!(order.len(), g.vertex_count());
        let first = order[0];
        let later: Vec<Vertex> = g.neighbors(first).collect();
        assert!(later.iter().all(|&a| later.iter().all(|&b| a == b || g.has_edge(a, b))));
    }
}
