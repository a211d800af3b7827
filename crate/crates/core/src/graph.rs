//! Finite simple graphs with user-supplied integer vertex ids.
//!
//! Vertex ids are never re-indexed, so fixtures can cite stable ids. Every set
//! and every iteration order is ascending by id.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};

pub type Vertex = u32;

/// An unordered vertex pair stored with the smaller id first.
pub type Edge = (Vertex, Vertex);

pub fn edge(u: Vertex, v: Vertex) -> Edge {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

/// A sorted set of vertex ids.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(BTreeSet<Vertex>);

impl VertexSet {
    pub fn new() -> Self {
        VertexSet(BTreeSet::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.contains(&v)
    }

    pub fn insert(&mut self, v: Vertex) -> bool {
        self.0.insert(v)
    }

    pub fn remove(&mut self, v: Vertex) -> bool {
        self.0.remove(&v)
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = Vertex> + '_ {
        self.0.iter().copied()
    }

    pub fn first(&self) -> Option<Vertex> {
        self.0.first().copied()
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.union(&other.0).copied().collect())
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.intersection(&other.0).copied().collect())
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.difference(&other.0).copied().collect())
    }

    pub fn symmetric_difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.symmetric_difference(&other.0).copied().collect())
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn as_set(&self) -> &BTreeSet<Vertex> {
        &self.0
    }

    pub fn to_vec(&self) -> Vec<Vertex> {
        self.0.iter().copied().collect()
    }
}

impl FromIterator<Vertex> for VertexSet {
    fn from_iter<I: IntoIterator<Item = Vertex>>(iter: I) -> Self {
        VertexSet(iter.into_iter().collect())
    }
}

impl<const N: usize> From<[Vertex; N]> for VertexSet {
    fn from(arr: [Vertex; N]) -> Self {
        arr.into_iter().collect()
    }
}

impl From<&[Vertex]> for VertexSet {
    fn from(s: &[Vertex]) -> Self {
        s.iter().copied().collect()
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = Vertex;
    type IntoIter = std::iter::Copied<std::collections::btree_set::Iter<'a, Vertex>>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// Finite simple undirected graph.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    adj: BTreeMap<Vertex, BTreeSet<Vertex>>,
}

/// Wire form: `{"vertices":[..],"edges":[[u,v],..]}`.
#[derive(Serialize, Deserialize)]
struct GraphRepr {
    vertices: Vec<Vertex>,
    edges: Vec<[Vertex; 2]>,
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphRepr {
            vertices: self.vertices().collect(),
            edges: self.edges().map(|(u, v)| [u, v]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = GraphRepr::deserialize(d)?;
        Graph::new(repr.vertices, repr.edges.into_iter().map(|[u, v]| (u, v)))
            .map_err(serde::de::Error::custom)
    }
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate vertices, duplicate
    /// edges and edges with unlisted endpoints.
    pub fn new(
        vertices: impl IntoIterator<Item = Vertex>,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Graph> {
        let mut adj: BTreeMap<Vertex, BTreeSet<Vertex>> = BTreeMap::new();
        for v in vertices {
            if adj.insert(v, BTreeSet::new()).is_some() {
                return input(format!("duplicate vertex id {v}"));
            }
        }
        for (u, v) in edges {
            if u == v {
                return input(format!("self-loop at vertex {u}"));
            }
            if !adj.contains_key(&u) || !adj.contains_key(&v) {
                return input(format!("edge ({u},{v}) has an unlisted endpoint"));
            }
            if !adj.get_mut(&u).unwrap().insert(v) {
                return input(format!("duplicate edge ({u},{v})"));
            }
            adj.get_mut(&v).unwrap().insert(u);
        }
        Ok(Graph { adj })
    }

    /// Builds a graph from an edge list; the vertex set is the set of endpoints.
    /// Duplicate edges are merged and self-loops dropped.
    pub fn from_edges(edges: impl IntoIterator<Item = Edge>) -> Graph {
        let mut g = Graph::empty();
        for (u, v) in edges {
            g.add_vertex(u);
            g.add_vertex(v);
            if u != v {
                g.add_edge_unchecked(u, v);
            }
        }
        g
    }

    pub fn empty() -> Graph {
        Graph {
            adj: BTreeMap::new(),
        }
    }

    pub fn complete(vertices: impl IntoIterator<Item = Vertex>) -> Graph {
        let vs: Vec<Vertex> = vertices.into_iter().collect();
        let mut g = Graph::empty();
        for &v in &vs {
            g.add_vertex(v);
        }
        for (i, &u) in vs.iter().enumerate() {
            for &v in &vs[i + 1..] {
                g.add_edge_unchecked(u, v);
            }
        }
        g
    }

    pub fn edgeless(vertices: impl IntoIterator<Item = Vertex>) -> Graph {
        let mut g = Graph::empty();
        for v in vertices {
            g.add_vertex(v);
        }
        g
    }

    pub fn path(vertices: &[Vertex]) -> Graph {
        let mut g = Graph::edgeless(vertices.iter().copied());
        for w in vertices.windows(2) {
            g.add_edge_unchecked(w[0], w[1]);
        }
        g
    }

    pub fn cycle(vertices: &[Vertex]) -> Graph {
        let mut g = Graph::path(vertices);
        if vertices.len() > 2 {
            g.add_edge_unchecked(vertices[vertices.len() - 1], vertices[0]);
        }
        g
    }

    fn add_vertex(&mut self, v: Vertex) {
        self.adj.entry(v).or_default();
    }

    fn add_edge_unchecked(&mut self, u: Vertex, v: Vertex) {
        self.adj.get_mut(&u).unwrap().insert(v);
        self.adj.get_mut(&v).unwrap().insert(u);
    }

    /// Returns `g + uv`. Both endpoints must be vertices of `g`.
    pub fn with_edge(&self, u: Vertex, v: Vertex) -> Result<Graph> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return input(format!("self-loop at vertex {u}"));
        }
        let mut g = self.clone();
        g.add_edge_unchecked(u, v);
        Ok(g)
    }

    /// Returns `g - uv` (no-op when the edge is absent).
    pub fn without_edge(&self, u: Vertex, v: Vertex) -> Graph {
        let mut g = self.clone();
        if let Some(n) = g.adj.get_mut(&u) {
            n.remove(&v);
        }
        if let Some(n) = g.adj.get_mut(&v) {
            n.remove(&u);
        }
        g
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.values().map(|n| n.len()).sum::<usize>() / 2
    }

    pub fn vertices(&self) -> impl DoubleEndedIterator<Item = Vertex> + '_ {
        self.adj.keys().copied()
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.vertices().collect()
    }

    /// Edges in lexicographic order, smaller endpoint first.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adj
            .iter()
            .flat_map(|(&u, n)| n.range(u + 1..).map(move |&v| (u, v)))
    }

    pub fn edge_list(&self) -> Vec<Edge> {
        self.edges().collect()
    }

    pub fn has_vertex(&self, v: Vertex) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj.get(&u).is_some_and(|n| n.contains(&v))
    }

    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.adj.get(&v).into_iter().flat_map(|n| n.iter().copied())
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj.get(&v).map_or(0, |n| n.len())
    }

    pub fn is_complete(&self) -> bool {
        let n = self.vertex_count();
        self.edge_count() == n * n.saturating_sub(1) / 2
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<()> {
        if self.has_vertex(v) {
            Ok(())
        } else {
            input(format!("unknown vertex id {v}"))
        }
    }

    pub fn check_subset(&self, x: &VertexSet) -> Result<()> {
        x.iter().try_for_each(|v| self.check_vertex(v))
    }

    /// Stable 64-bit FNV-1a digest of the vertex and edge lists.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv64::default();
        for v in self.vertices() {
            h.write_u32(v);
        }
        h.write_u32(u32::MAX);
        for (u, v) in self.edges() {
            h.write_u32(u);
            h.write_u32(v);
        }
        h.finish()
    }

    pub fn is_connected(&self) -> bool {
        components(self).len() <= 1
    }

    /// Connected components of `g - removed`, each sorted, list sorted by
    /// smallest member.
    pub fn components_without(&self, removed: &VertexSet) -> Vec<VertexSet> {
        let mut seen: BTreeSet<Vertex> = removed.as_set().clone();
        let mut out = Vec::new();
        for s in self.vertices() {
            if seen.contains(&s) {
                continue;
            }
            let mut comp = VertexSet::new();
            let mut queue = VecDeque::from([s]);
            seen.insert(s);
            while let Some(v) = queue.pop_front() {
                comp.insert(v);
                for w in self.neighbors(v) {
                    if seen.insert(w) {
                        queue.push_back(w);
                    }
                }
            }
            out.push(comp);
        }
        out
    }
}

impl Hash for Graph {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.fingerprint().hash(state)
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("vertices", &self.vertices().collect::<Vec<_>>())
            .field("edges", &self.edge_list())
            .finish()
    }
}

#[derive(Clone, Copy)]
struct Fnv64(u64);

impl Default for Fnv64 {
    fn default() -> Self {
        Fnv64(0xcbf2_9ce4_8422_2325)
    }
}

impl Hasher for Fnv64 {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }
}

/// `G[x]`: vertices `x` and the edges of `g` with both endpoints in `x`.
pub fn induced_subgraph(g: &Graph, x: &VertexSet) -> Result<Graph> {
    g.check_subset(x)?;
    let adj = x
        .iter()
        .map(|v| {
            let n = g.adj[&v].iter().copied().filter(|w| x.contains(*w)).collect();
            (v, n)
        })
        .collect();
    Ok(Graph { adj })
}

/// `N_G(x)`: vertices outside `x` adjacent to some member of `x`.
pub fn neighborhood(g: &Graph, x: &VertexSet) -> Result<VertexSet> {
    g.check_subset(x)?;
    Ok(x
        .iter()
        .flat_map(|v| g.neighbors(v))
        .filter(|w| !x.contains(*w))
        .collect())
}

pub fn components(g: &Graph) -> Vec<VertexSet> {
    g.components_without(&VertexSet::new())
}

pub fn is_clique(g: &Graph, x: &VertexSet) -> Result<bool> {
    g.check_subset(x)?;
    let vs = x.to_vec();
    Ok(vs
        .iter()
        .enumerate()
        .all(|(i, &u)| vs[i + 1..].iter().all(|&v| g.has_edge(u, v))))
}

/// Union graph; shared ids denote identified vertices.
pub fn glue(g1: &Graph, g2: &Graph) -> Graph {
    let mut g = g1.clone();
    for (v, n) in &g2.adj {
        g.adj.entry(*v).or_default().extend(n.iter().copied());
    }
    g
}

/// Adds a fresh vertex (one above the current maximum id) adjacent to every vertex.
pub fn cone(g: &Graph) -> (Graph, Vertex) {
    let apex = g.vertices().next_back().map_or(0, |m| m + 1);
    let mut h = g.clone();
    h.add_vertex(apex);
    for v in g.vertices() {
        h.add_edge_unchecked(apex, v);
    }
    (h, apex)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn vs<const N: usize>(a: [Vertex; N]) -> VertexSet {
        VertexSet::from(a)
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(Graph::new([1, 2], [(1, 1)]).is_err());
        assert!(Graph::new([1, 2], [(1, 2), (2, 1)]).is_err());
        assert!(Graph::new([1, 2], [(1, 3)]).is_err());
        assert!(Graph::new([1, 1], []).is_err());
    }

    #[test]
    fn json_round_trip_orders_edges() {
        let g: Graph =
            serde_json::from_str(r#"{"vertices":[3,1,2],"edges":[[3,1],[2,1]]}"#).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"vertices":[1,2,3],"edges":[[1,2],[1,3]]}"#);
        assert!(serde_json::from_str::<Graph>(r#"{"vertices":[1],"edges":[[1,1]]}"#).is_err());
    }

    #[test]
    fn induced_subgraph_examples() {
        let k4 = Graph::complete([1, 2, 3, 4]);
        let t = induced_subgraph(&k4, &vs([1, 2, 3])).unwrap();
        assert_eq!(t, Graph::complete([1, 2, 3]));
        assert_eq!(induced_subgraph(&k4, &k4.vertex_set()).unwrap(), k4);
        assert!(induced_subgraph(&k4, &vs([1, 9])).is_err());

        let b = fixtures::double_banana();
        let banana = induced_subgraph(&b.graph, &b.banana1).unwrap();
        assert_eq!(banana.vertex_count(), 5);
        assert_eq!(banana.edge_count(), 9);
    }

    #[test]
    fn neighborhood_examples() {
        let p = Graph::path(&[1, 2, 3]);
        assert_eq!(neighborhood(&p, &vs([1])).unwrap(), vs([2]));
        let k5 = Graph::complete(1..=5);
        assert_eq!(neighborhood(&k5, &vs([1, 2])).unwrap(), vs([3, 4, 5]));
        let b = fixtures::double_banana();
        let interior = b.banana1.difference(&b.hinges);
        assert_eq!(neighborhood(&b.graph, &interior).unwrap(), b.hinges);
        assert!(neighborhood(&p, &vs([7])).is_err());
    }

    #[test]
    fn components_examples() {
        let e = Graph::edgeless([1, 2, 3]);
        assert_eq!(components(&e), vec![vs([1]), vs([2]), vs([3])]);
        let k4 = Graph::complete([1, 2, 3, 4]);
        assert_eq!(components(&k4), vec![k4.vertex_set()]);
        let p = Graph::path(&[1, 2, 3]);
        let p_minus = induced_subgraph(&p, &vs([1, 3])).unwrap();
        assert_eq!(components(&p_minus), vec![vs([1]), vs([3])]);
    }

    #[test]
    fn clique_examples() {
        let k4 = Graph::complete([1, 2, 3, 4]);
        assert!(is_clique(&k4, &vs([])).unwrap());
        assert!(is_clique(&k4, &vs([2])).unwrap());
        assert!(is_clique(&k4, &k4.vertex_set()).unwrap());
        let k4e = k4.without_edge(1, 2);
        assert!(!is_clique(&k4e, &k4e.vertex_set()).unwrap());
    }

    #[test]
    fn glue_examples() {
        let b = fixtures::double_banana();
        assert_eq!(b.graph.vertex_count(), 8);
        assert_eq!(b.graph.edge_count(), 18);
        let k4 = Graph::complete([1, 2, 3, 4]);
        assert_eq!(glue(&k4, &k4), k4);
        let g = glue(&Graph::complete(1..=5), &Graph::complete([3, 4, 5, 6, 7]));
        assert_eq!(g.vertex_count(), 7);
        assert_eq!(g.edge_count(), 17);
    }

    #[test]
    fn cone_examples() {
        let (k5, apex) = cone(&Graph::complete(1..=4));
        assert_eq!(apex, 5);
        assert_eq!(k5, Graph::complete(1..=5));
        let (p, _) = cone(&Graph::edgeless([1, 2]));
        assert!(p.is_connected());
        assert_eq!(p.edge_count(), 2);
        let (w4, hub) = cone(&Graph::cycle(&[1, 2, 3, 4]));
        assert_eq!(w4.edge_count(), 8);
        assert_eq!(w4.degree(hub), 4);
    }

    #[test]
    fn fingerprint_is_order_independent() {
        let a = Graph::new([1, 2, 3], [(1, 2), (2, 3)]).unwrap();
        let b = Graph::new([3, 2, 1], [(3, 2), (2, 1)]).unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
        assert_ne!(a.fingerprint(), Graph::path(&[1, 3, 2]).fingerprint());
    }
}
