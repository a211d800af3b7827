//! Random graph families for property campaigns.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::connectivity::{fragments_of_separator, scan_separators, FragmentSelection};
use crate::graph::{glue, Graph, Vertex, VertexSet};
use crate::cliques::maximal_cliques;

/// `G(n, p)` on vertices `1..=n`.
pub fn erdos_renyi<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut g = Graph::edgeless(1..=n as Vertex);
    for u in 1..=n as Vertex {
        for v in u + 1..=n as Vertex {
            if rng.gen_bool(p) {
                g = g.with_edge(u, v).expect("vertices exist");
            }
        }
    }
    g
}

/// Complete graphs glued one at a time until `n` vertices exist. Each new
/// clique shares between `min_overlap` and its size minus one vertices with
/// the current graph; with `within_clique` the shared vertices come from a
/// single maximal clique, which keeps the result chordal.
pub fn clique_gluing<R: Rng>(
    n: usize,
    min_overlap: usize,
    within_clique: bool,
    rng: &mut R,
) -> Graph {
    let first = rng.gen_range(min_overlap + 1..=(min_overlap + 3).min(n).max(min_overlap + 1));
    let mut g = Graph::complete(1..=first as Vertex);
    let mut next = first as Vertex + 1;
    while (next as usize) <= n {
        let pool: Vec<Vertex> = if within_clique {
            let cliques = maximal_cliques(&g);
            cliques[rng.gen_range(0..cliques.len())].to_vec()
        } else {
            g.vertices().collect()
        };
        let fresh_max = (n + 1 - next as usize).min(3);
        let fresh = rng.gen_range(1..=fresh_max);
        let hi = pool.len().min(min_overlap + 2);
        let shared = rng.gen_range(min_overlap.min(pool.len())..=hi);
        let mut members: Vec<Vertex> = pool.choose_multiple(rng, shared).copied().collect();
        members.extend(next..next + fresh as Vertex);
        next += fresh as Vertex;
        g = glue(&g, &Graph::complete(members));
    }
    g
}

/// A d-connected chordal graph on at most `n` vertices.
pub fn d_connected_chordal<R: Rng>(n: usize, d: usize, rng: &mut R) -> Graph {
    clique_gluing(n, d, true, rng)
}

/// A random mix: Erdős–Rényi with a random density, or a clique gluing.
pub fn mixed<R: Rng>(n: usize, d: usize, rng: &mut R) -> Graph {
    match rng.gen_range(0..3) {
        0 => erdos_renyi(n, rng.gen_range(0.3..0.95), rng),
        1 => clique_gluing(n, rng.gen_range(1..=d.max(1)), false, rng),
        _ => clique_gluing(n, d, rng.gen_bool(0.5), rng),
    }
}

/// Member sets for a random reduced-sequence candidate: at most one
/// fragment per d-separator, each picked with probability `1/2`.
pub fn random_fragment_sets<R: Rng>(g: &Graph, d: usize, rng: &mut R) -> Vec<VertexSet> {
    let mut out = Vec::new();
    for s in scan_separators(g, d) {
        if !rng.gen_bool(0.5) {
            continue;
        }
        let Ok(frags) = fragments_of_separator(g, &s, FragmentSelection::AllUnions) else {
            continue;
        };
        if let Some(x) = frags.choose(rng) {
            out.push(x.members().clone());
        }
    }
    out.shuffle(rng);
    out
}

/// Renames vertices through `map`.
pub fn relabel(g: &Graph, map: impl Fn(Vertex) -> Vertex) -> Graph {
    let mut h = Graph::edgeless(g.vertices().map(&map));
    for (u, v) in g.edges() {
        h = h.with_edge(map(u), map(v)).expect("vertices exist");
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chordal::is_chordal;
    use crate::connectivity::is_d_connected;
    use crate::seed;

    #[test]
    fn chordal_generator_is_chordal_and_connected() {
        let mut rng = seed::rng(1, "random-test");
        for d in 1..=3 {
            for n in d + 2..=12 {
                let g = d_connected_chordal(n, d, &mut rng);
                assert!(is_chordal(&g), "{g:?}");
                assert!(is_d_connected(&g, d), "{g:?}");
                assert!(g.vertex_count() <= n);
            }
        }
    }

    #[test]
    fn erdos_renyi_extremes() {
        let mut rng = seed::rng(2, "random-test");
        assert_eq!(erdos_renyi(6, 1.0, &mut rng), Graph::complete(1..=6));
        assert_eq!(erdos_renyi(6, 0.0, &mut rng).edge_count(), 0);
    }
}
