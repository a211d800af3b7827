use std::collections::BTreeSet;

use crate::graph::{Graph, Vertex, VertexSet};

/// Maximal cliques by Bron–Kerbosch with Tomita pivoting. Each clique is
/// sorted and the list is sorted lexicographically.
pub fn maximal_cliques(g: &Graph) -> Vec<VertexSet> {
    let mut out = Vec::new();
    let p: BTreeSet<Vertex> = g.vertices().collect();
    expand(g, &mut Vec::new(), p, BTreeSet::new(), &mut out);
    out.sort();
    out
}

fn expand(
    g: &Graph,
    r: &mut Vec<Vertex>,
    mut p: BTreeSet<Vertex>,
    mut x: BTreeSet<Vertex>,
    out: &mut Vec<VertexSet>,
) {
    if p.is_empty() {
        if x.is_empty() {
            out.push(r.iter().copied().collect());
        }
        return;
    }
    let pivot = p
        .iter()
        .chain(x.iter())
        .copied()
        .max_by_key(|&u| p.iter().filter(|&&w| g.has_edge(u, w)).count())
        .expect("p is nonempty");
    let candidates: Vec<Vertex> = p.iter().copied().filter(|&v| !g.has_edge(pivot, v)).collect();
    for v in candidates {
        let np = p.iter().copied().filter(|&w| g.has_edge(v, w)).collect();
        let nx = x.iter().copied().filter(|&w| g.has_edge(v, w)).collect();
        r.push(v);
        expand(g, r, np, nx, out);
        r.pop();
        p.remove(&v);
        x.insert(v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert_eq!(maximal_cliques(&Graph::complete(1..=4)), vec![VertexSet::from([1, 2, 3, 4])]);
        assert_eq!(
            maximal_cliques(&Graph::path(&[1, 2, 3])),
            vec![VertexSet::from([1, 2]), VertexSet::from([2, 3])]
        );
        assert_eq!(
            maximal_cliques(&Graph::edgeless([4, 5])),
            vec![VertexSet::from([4]), VertexSet::from([5])]
        );
        // Octahedron K_{2,2,2}: eight triangles.
        let oct = Graph::complete(1..=6)
            .without_edge(1, 2)
            .without_edge(3, 4)
            .without_edge(5, 6);
        assert_eq!(maximal_cliques(&oct).len(), 8);
    }
}
