//! Named graphs and frameworks used across tests, campaigns and the CLI.

use std::collections::BTreeMap;

use crate::graph::{glue, Graph, Vertex, VertexSet};

/// Two copies of `K5` minus an edge sharing the two endpoints of the missing
/// edge. Hinges are 1 and 2; interiors are {3,4,5} and {6,7,8}.
#[derive(Debug, Clone)]
pub struct DoubleBanana {
    pub graph: Graph,
    pub hinges: VertexSet,
    pub banana1: VertexSet,
    pub banana2: VertexSet,
    /// Interior vertices joined by the bracing edge of [`braced_double_banana`].
    pub x: Vertex,
    pub y: Vertex,
}

pub fn double_banana() -> DoubleBanana {
    let b1 = Graph::complete([1, 2, 3, 4, 5]).without_edge(1, 2);
    let b2 = Graph::complete([1, 2, 6, 7, 8]).without_edge(1, 2);
    DoubleBanana {
        graph: glue(&b1, &b2),
        hinges: VertexSet::from([1, 2]),
        banana1: VertexSet::from([1, 2, 3, 4, 5]),
        banana2: VertexSet::from([1, 2, 6, 7, 8]),
        x: 3,
        y: 6,
    }
}

/// The double banana plus one edge between the two interiors. Expected to be
/// 3-joined (its 3-dimensional closure adds the hinge edge and is chordal), but
/// the certification routes may fail to prove it.
pub fn braced_double_banana() -> DoubleBanana {
    let mut b = double_banana();
    b.graph = b.graph.with_edge(b.x, b.y).expect("fixture vertices exist");
    b
}

/// `K_{d+2}` on `1..=d+2` minus the edge {1,2}.
pub fn complete_minus_edge(d: usize) -> Graph {
    Graph::complete(1..=(d as Vertex + 2)).without_edge(1, 2)
}

/// The planar analogue of the double banana: two copies of `K4` minus an
/// edge sharing the nonadjacent hinge {1,2}. Rigid and 2-joined, but proving
/// the hinge globally linked needs the conditional branch of recognition.
pub fn planar_banana_pair() -> Graph {
    glue(
        &Graph::complete([1, 2, 3, 4]).without_edge(1, 2),
        &Graph::complete([1, 2, 5, 6]).without_edge(1, 2),
    )
}

/// `count` complete graphs on `clique` vertices, each consecutive pair sharing
/// `overlap` vertices. Block `i` is `{i*(clique-overlap)+1, ..}`.
pub fn clique_chain(count: usize, clique: usize, overlap: usize) -> Graph {
    assert!(overlap < clique, "overlap must be smaller than the clique size");
    let step = (clique - overlap) as Vertex;
    (0..count as Vertex)
        .map(|i| Graph::complete((0..clique as Vertex).map(|j| i * step + j + 1)))
        .fold(Graph::empty(), |acc, b| glue(&acc, &b))
}

/// Two `K4`s sharing the edge {3,4}.
pub fn two_k4_on_edge() -> Graph {
    clique_chain(2, 4, 2)
}

/// Two `K5`s glued along the three vertices {1,2,3}; the sides are {4,5} and {6,7}.
pub fn two_k5_on_triangle() -> Graph {
    glue(
        &Graph::complete([1, 2, 3, 4, 5]),
        &Graph::complete([1, 2, 3, 6, 7]),
    )
}

/// Four `K5`s in a chain, consecutive copies sharing two vertices, the three
/// hinge pairs pairwise disjoint. `x,y,z = 10,11,12` avoid the hinges in the
/// first copy and `w = 21` avoids them in the last.
pub fn k5_hinge_chain() -> Graph {
    [
        [10, 11, 12, 13, 14],
        [13, 14, 15, 16, 17],
        [16, 17, 18, 19, 20],
        [19, 20, 21, 22, 23],
    ]
    .into_iter()
    .map(Graph::complete)
    .fold(Graph::empty(), |acc, b| glue(&acc, &b))
}

/// [`two_k5_on_triangle`] and [`k5_hinge_chain`] with `a1,a2,s1,b1 = 4,5,1,6`
/// identified with `x,y,z,w`.
pub fn identified_k5_construction() -> Graph {
    let relabel: BTreeMap<Vertex, Vertex> = [(10, 4), (11, 5), (12, 1), (21, 6)].into();
    let h = k5_hinge_chain();
    let map = |v: Vertex| *relabel.get(&v).unwrap_or(&v);
    let h = Graph::from_edges(h.edges().map(|(a, b)| (map(a), map(b))));
    glue(&two_k5_on_triangle(), &h)
}

/// Two graphs on {u,x,y,v} = {1,2,3,4} with a pair of reduced 1-dimensional
/// reflection sequences, where {u,y} strongly separates the sequences and
/// {u,v} does not.
#[derive(Debug, Clone)]
pub struct StrongSeparationFixture {
    pub g1: Graph,
    pub g2: Graph,
    /// Member sets of the steps of the first sequence (fragments of `g1`).
    pub f1: Vec<VertexSet>,
    /// Member sets of the steps of the second sequence (fragments of `g2`).
    pub f2: Vec<VertexSet>,
    pub u: Vertex,
    pub x: Vertex,
    pub y: Vertex,
    pub v: Vertex,
}

pub fn strong_separation() -> StrongSeparationFixture {
    let (u, x, y, v) = (1, 2, 3, 4);
    StrongSeparationFixture {
        g1: Graph::from_edges([(u, x), (x, y), (y, v)]),
        g2: Graph::from_edges([(u, y), (x, y), (x, v)]),
        f1: vec![VertexSet::from([y, v]), VertexSet::from([v])],
        f2: vec![VertexSet::from([x, v]), VertexSet::from([v])],
        u,
        x,
        y,
        v,
    }
}

/// A non-generic 1-dimensional realization of the path u-y-x-w-v
/// (ids 1-2-3-4-5) on which the reduced sequence
/// (R_{u,x,y}, R_{u,y}, R_{u}) returns u and v to their original distance.
///
/// Derivation: the three steps reflect the complement in p(w), p(x), p(y) in
/// turn, so v ends at 2p(y) - 2p(x) + 2p(w) - p(v) while u stays put. Setting
/// this equal to 2p(u) - p(v) gives p(u) = p(y) - p(x) + p(w). Choosing
/// p(y)=1, p(x)=3, p(w)=2 forces p(u)=0; p(v)=5 is free. Then F(p)(v) = -5 and
/// |F(p)(u) - F(p)(v)| = 5 = |p(u) - p(v)|.
#[derive(Debug, Clone)]
pub struct NonGenericPath {
    pub graph: Graph,
    pub coords: BTreeMap<Vertex, Vec<f64>>,
    pub steps: Vec<VertexSet>,
    pub u: Vertex,
    pub v: Vertex,
}

pub fn non_generic_path() -> NonGenericPath {
    let (u, y, x, w, v) = (1, 2, 3, 4, 5);
    NonGenericPath {
        graph: Graph::path(&[u, y, x, w, v]),
        coords: [
            (u, vec![0.0]),
            (y, vec![1.0]),
            (x, vec![3.0]),
            (w, vec![2.0]),
            (v, vec![5.0]),
        ]
        .into(),
        steps: vec![
            VertexSet::from([u, x, y]),
            VertexSet::from([u, y]),
            VertexSet::from([u]),
        ],
        u,
        v,
    }
}

/// Every named graph with a short label and the dimension it is usually studied in.
pub fn catalog() -> Vec<(&'static str, usize, Graph)> {
    vec![
        ("double-banana", 3, double_banana().graph),
        ("braced-double-banana", 3, braced_double_banana().graph),
        ("k4-minus-edge", 2, complete_minus_edge(2)),
        ("k5-minus-edge", 3, complete_minus_edge(3)),
        ("two-k4-on-edge", 2, two_k4_on_edge()),
        ("planar-banana-pair", 2, planar_banana_pair()),
        ("k4-chain-3", 2, clique_chain(3, 4, 2)),
        ("two-k5-on-triangle", 3, two_k5_on_triangle()),
        ("k5-hinge-chain", 3, k5_hinge_chain()),
        ("identified-k5-construction", 3, identified_k5_construction()),
        ("path-3", 1, Graph::path(&[1, 2, 3])),
    ]
}

pub fn by_name(name: &str) -> Option<(usize, Graph)> {
    catalog()
        .into_iter()
        .find(|(n, _, _)| *n == name)
        .map(|(_, d, g)| (d, g))
}
