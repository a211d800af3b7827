//! Rigidity matrices, generic rank, rigidity matroid components and the
//! randomized global rigidity test.
//!
//! Generic quantities are computed exactly over the prime field at seeded
//! uniform coordinates. A rank can only drop at unlucky coordinates, and every
//! maximal minor is a polynomial of degree at most the rank in the coordinates,
//! so by Schwartz–Zippel a single query underestimates with probability at
//! most `rank / MODULUS`.

use std::collections::BTreeMap;
use std::ops::{Neg, Sub};

use serde::Serialize;

use crate::error::{input, Error, Result};
use crate::field::{self, Echelon, Fp, MODULUS};
use crate::graph::{Edge, Graph, Vertex};
use crate::seed;

/// Matrix entries: reals for geometry, field elements for rank.
pub trait Entry: Copy + Sub<Output = Self> + Neg<Output = Self> {
    const ZERO: Self;
}

impl Entry for f64 {
    const ZERO: f64 = 0.0;
}

impl Entry for Fp {
    const ZERO: Fp = Fp::ZERO;
}

/// `R(G,p)`: one row per edge in lexicographic order, `d` columns per vertex
/// in increasing vertex order.
#[derive(Debug, Clone, PartialEq)]
pub struct RigidityMatrix<T> {
    d: usize,
    columns: Vec<Vertex>,
    edges: Vec<Edge>,
    rows: Vec<Vec<T>>,
}

impl<T: Entry> RigidityMatrix<T> {
    pub fn new(g: &Graph, d: usize, coords: &BTreeMap<Vertex, Vec<T>>) -> Result<Self> {
        let columns: Vec<Vertex> = g.vertices().collect();
        for &v in &columns {
            match coords.get(&v) {
                None => return input(format!("no coordinates for vertex {v}")),
                Some(p) if p.len() != d => {
                    return input(format!(
                        "vertex {v} has {} coordinates, expected {d}",
                        p.len()
                    ))
                }
                Some(_) => {}
            }
        }
        let index: BTreeMap<Vertex, usize> =
            columns.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let edges = g.edge_list();
        let rows = edges
            .iter()
            .map(|&(a, b)| {
                let mut row = vec![T::ZERO; d * columns.len()];
                let (ia, ib) = (index[&a], index[&b]);
                for k in 0..d {
                    let diff = coords[&a][k] - coords[&b][k];
                    row[d * ia + k] = diff;
                    row[d * ib + k] = -diff;
                }
                row
            })
            .collect();
        Ok(RigidityMatrix { d, columns, edges, rows })
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn columns(&self) -> &[Vertex] {
        &self.columns
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.d * self.columns.len())
    }
}

pub fn rigidity_matrix(
    g: &Graph,
    d: usize,
    coords: &BTreeMap<Vertex, Vec<f64>>,
) -> Result<RigidityMatrix<f64>> {
    RigidityMatrix::new(g, d, coords)
}

/// `d|V| - C(d+1,2)` for `|V| ≥ d`, and `C(|V|,2)` below that.
pub fn rank_bound(n: usize, d: usize) -> usize {
    if n >= d {
        d * n - d * (d + 1) / 2
    } else {
        n * n.saturating_sub(1) / 2
    }
}

/// Rank queries over the prime field at seeded coordinates for one graph.
#[derive(Debug, Clone)]
pub struct RankOracle {
    graph: Graph,
    d: usize,
    seed: u64,
    coords: BTreeMap<Vertex, Vec<Fp>>,
    index: BTreeMap<Vertex, usize>,
}

impl RankOracle {
    pub fn new(g: &Graph, d: usize, seed: u64) -> RankOracle {
        let mut rng = seed::rng(seed, "rank-coordinates");
        let coords = g
            .vertices()
            .map(|v| (v, (0..d).map(|_| Fp::random(&mut rng)).collect()))
            .collect();
        let index = g.vertices().enumerate().map(|(i, v)| (v, i)).collect();
        RankOracle { graph: g.clone(), d, seed, coords, index }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn modulus(&self) -> u64 {
        MODULUS
    }

    pub fn coordinates(&self) -> &BTreeMap<Vertex, Vec<Fp>> {
        &self.coords
    }

    /// The row of the pair `uv`, which need not be an edge.
    pub fn row(&self, u: Vertex, v: Vertex) -> Result<Vec<Fp>> {
        self.graph.check_vertex(u)?;
        self.graph.check_vertex(v)?;
        if u == v {
            return input(format!("({u},{u}) is not a pair"));
        }
        let d = self.d;
        let mut row = vec![Fp::ZERO; d * self.index.len()];
        let (iu, iv) = (self.index[&u], self.index[&v]);
        for k in 0..d {
            let diff = self.coords[&u][k] - self.coords[&v][k];
            row[d * iu + k] = diff;
            row[d * iv + k] = -diff;
        }
        Ok(row)
    }

    /// Rank of the given pairs (all edges when `None`).
    pub fn rank(&self, edges: Option<&[Edge]>) -> Result<usize> {
        Ok(self.span(edges)?.rank())
    }

    pub fn span(&self, edges: Option<&[Edge]>) -> Result<Echelon> {
        let all;
        let edges = match edges {
            Some(e) => e,
            None => {
                all = self.graph.edge_list();
                &all
            }
        };
        let mut e = Echelon::new();
        for &(a, b) in edges {
            e.insert(&self.row(a, b)?);
        }
        Ok(e)
    }

    /// Upper bound on the probability that a rank of `r` underestimates the
    /// generic rank.
    pub fn failure_bound(r: usize) -> f64 {
        r as f64 / MODULUS as f64
    }
}

pub fn generic_rank(g: &Graph, d: usize, seed: u64) -> usize {
    RankOracle::new(g, d, seed).rank(None).expect("edges of g are valid pairs")
}

pub fn is_rigid(g: &Graph, d: usize) -> bool {
    is_rigid_seeded(g, d, seed::DEFAULT_SEED)
}

pub fn is_rigid_seeded(g: &Graph, d: usize, seed: u64) -> bool {
    let n = g.vertex_count();
    if n < d {
        return g.is_complete();
    }
    generic_rank(g, d, seed) == rank_bound(n, d)
}

/// `r_d(G + uv) = r_d(G)` for a nonadjacent pair.
pub fn is_linked_pair(g: &Graph, d: usize, u: Vertex, v: Vertex) -> Result<bool> {
    is_linked_pair_seeded(g, d, u, v, seed::DEFAULT_SEED)
}

pub fn is_linked_pair_seeded(g: &Graph, d: usize, u: Vertex, v: Vertex, seed: u64) -> Result<bool> {
    g.check_vertex(u)?;
    g.check_vertex(v)?;
    if u == v {
        return input("a linked pair needs two distinct vertices");
    }
    if g.has_edge(u, v) {
        return input(format!("{u}{v} is an edge"));
    }
    let oracle = RankOracle::new(g, d, seed);
    Ok(oracle.span(None)?.contains(&oracle.row(u, v)?))
}

/// A greedy basis of the rigidity matroid in lexicographic edge order.
pub fn greedy_basis(oracle: &RankOracle) -> Vec<Edge> {
    let mut span = Echelon::new();
    oracle
        .graph
        .edge_list()
        .into_iter()
        .filter(|&(a, b)| span.insert(&oracle.row(a, b).expect("edge endpoints exist")))
        .collect()
}

/// The unique circuit in `basis + e`, with `e` first and the rest sorted, or
/// `None` when `e` is independent of the basis. A basis edge `b` belongs to the
/// circuit exactly when `basis - b + e` is independent, which is the case iff
/// `b` has a nonzero coefficient in the expansion of `e`.
pub fn fundamental_circuit(oracle: &RankOracle, basis: &[Edge], e: Edge) -> Result<Option<Vec<Edge>>> {
    let rows = basis
        .iter()
        .map(|&(a, b)| oracle.row(a, b))
        .collect::<Result<Vec<_>>>()?;
    let target = oracle.row(e.0, e.1)?;
    let Some(coeffs) = field::express(&rows, &target) else {
        return Ok(None);
    };
    let mut circuit: Vec<Edge> = basis
        .iter()
        .zip(&coeffs)
        .filter(|(_, c)| !c.is_zero())
        .map(|(&b, _)| b)
        .collect();
    circuit.sort();
    circuit.insert(0, e);
    Ok(Some(circuit))
}

/// Connected components of the rigidity matroid, each sorted, listed by their
/// smallest edge.
pub fn rd_components(g: &Graph, d: usize) -> Vec<Vec<Edge>> {
    rd_components_seeded(g, d, seed::DEFAULT_SEED)
}

pub fn rd_components_seeded(g: &Graph, d: usize, seed: u64) -> Vec<Vec<Edge>> {
    let oracle = RankOracle::new(g, d, seed);
    let edges = g.edge_list();
    let pos: BTreeMap<Edge, usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let basis = greedy_basis(&oracle);
    let mut parent: Vec<usize> = (0..edges.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &e in &edges {
        if basis.binary_search(&e).is_ok() {
            continue;
        }
        let circuit = fundamental_circuit(&oracle, &basis, e)
            .expect("edge endpoints exist")
            .expect("a non-basis edge closes a circuit");
        let root = find(&mut parent, pos[&e]);
        for f in &circuit[1..] {
            let r = find(&mut parent, pos[f]);
            parent[r] = root;
        }
    }
    let mut groups: BTreeMap<usize, Vec<Edge>> = BTreeMap::new();
    for (i, &e) in edges.iter().enumerate() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(e);
    }
    let mut out: Vec<Vec<Edge>> = groups.into_values().collect();
    out.sort();
    out
}

pub fn is_rd_connected(g: &Graph, d: usize) -> Result<bool> {
    is_rd_connected_seeded(g, d, seed::DEFAULT_SEED)
}

pub fn is_rd_connected_seeded(g: &Graph, d: usize, seed: u64) -> Result<bool> {
    if g.edge_count() == 0 {
        return input("the rigidity matroid of an edgeless graph has no components");
    }
    Ok(rd_components_seeded(g, d, seed).len() == 1)
}

/// Number of independent seeds in the global rigidity test; the answer is the
/// majority vote.
pub const STRESS_REPEATS: u64 = 3;

/// Rank of a random equilibrium stress matrix at seeded coordinates.
pub fn stress_rank(g: &Graph, d: usize, seed: u64) -> usize {
    let oracle = RankOracle::new(g, d, seed);
    let edges = g.edge_list();
    let rows: Vec<Vec<Fp>> = edges
        .iter()
        .map(|&(a, b)| oracle.row(a, b).expect("edge endpoints exist"))
        .collect();
    let cols = rows.first().map_or(0, Vec::len);
    // Stresses are the left null space of R, i.e. the null space of R^T.
    let transpose: Vec<Vec<Fp>> = (0..cols).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    let stresses = field::nullspace(&transpose, edges.len());
    if stresses.is_empty() {
        return 0;
    }
    let mut rng = seed::rng(seed, "stress-combination");
    let mut omega = vec![Fp::ZERO; edges.len()];
    for s in &stresses {
        let c = Fp::random(&mut rng);
        for (w, &x) in omega.iter_mut().zip(s) {
            *w += c * x;
        }
    }
    let index: BTreeMap<Vertex, usize> = g.vertices().enumerate().map(|(i, v)| (v, i)).collect();
    let n = index.len();
    let mut m = vec![vec![Fp::ZERO; n]; n];
    for (&(a, b), &w) in edges.iter().zip(&omega) {
        let (i, j) = (index[&a], index[&b]);
        m[i][j] -= w;
        m[j][i] -= w;
        m[i][i] += w;
        m[j][j] += w;
    }
    field::rank(&m)
}

/// Outcome of the randomized global rigidity test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GlobalRigidityReport {
    pub globally_rigid: bool,
    /// `None` when the answer came from the small-graph rule.
    pub stress_ranks: Option<Vec<usize>>,
    pub target_rank: Option<usize>,
}

pub fn global_rigidity_report(g: &Graph, d: usize, seed: u64) -> GlobalRigidityReport {
    let n = g.vertex_count();
    if n < d + 2 {
        return GlobalRigidityReport {
            globally_rigid: g.is_complete(),
            stress_ranks: None,
            target_rank: None,
        };
    }
    let target = n - d - 1;
    let ranks: Vec<usize> = (0..STRESS_REPEATS)
        .map(|i| stress_rank(g, d, seed::derive_indexed(seed, "global-rigidity", i)))
        .collect();
    let votes = ranks.iter().filter(|&&r| r == target).count() as u64;
    GlobalRigidityReport {
        globally_rigid: 2 * votes > STRESS_REPEATS,
        stress_ranks: Some(ranks),
        target_rank: Some(target),
    }
}

pub fn is_globally_rigid(g: &Graph, d: usize) -> bool {
    is_globally_rigid_seeded(g, d, seed::DEFAULT_SEED)
}

pub fn is_globally_rigid_seeded(g: &Graph, d: usize, seed: u64) -> bool {
    global_rigidity_report(g, d, seed).globally_rigid
}

/// Guard shared by callers that need a positive dimension.
pub fn check_dimension(d: usize) -> Result<()> {
    if d == 0 {
        Err(Error::Input("dimension must be positive".into()))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::cone;
    use proptest::prelude::*;

    fn erdos_renyi(n: u32, mask: u64) -> Graph {
        let mut g = Graph::edgeless(1..=n);
        let mut bit = 0;
        for a in 1..=n {
            for b in a + 1..=n {
                if mask >> (bit % 64) & 1 == 1 {
                    g = g.with_edge(a, b).unwrap();
                }
                bit += 1;
            }
        }
        g
    }

    #[test]
    fn matrix_examples() {
        let g = Graph::from_edges([(1, 2)]);
        let coords = [(1, vec![0.0]), (2, vec![5.0])].into();
        let r = rigidity_matrix(&g, 1, &coords).unwrap();
        assert_eq!(r.rows(), &[vec![-5.0, 5.0]]);

        let tri = Graph::complete(1..=3);
        let coords = [(1, vec![0.0, 0.0]), (2, vec![1.0, 0.4]), (3, vec![0.3, 2.0])].into();
        let r = rigidity_matrix(&tri, 2, &coords).unwrap();
        assert_eq!(r.shape(), (3, 6));
        assert!(r.rows().iter().all(|row| row.iter().filter(|x| **x != 0.0).count() == 4));

        let bad = [(1, vec![0.0]), (2, vec![1.0, 0.0]), (3, vec![0.3, 2.0])].into();
        assert!(rigidity_matrix(&tri, 2, &bad).is_err());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(generic_rank(&Graph::complete(1..=5), 3, 1), 9);
        assert_eq!(generic_rank(&Graph::complete(1..=4), 2, 1), 5);
        assert_eq!(generic_rank(&fixtures::double_banana().graph, 3, 1), 17);
        let oracle = RankOracle::new(&Graph::complete(1..=4), 2, 1);
        assert_eq!(oracle.rank(Some(&[])).unwrap(), 0);
    }

    #[test]
    fn rigidity_examples() {
        assert!(is_rigid(&fixtures::complete_minus_edge(2), 2));
        assert!(!is_rigid(&fixtures::double_banana().graph, 3));
        assert!(is_rigid(&fixtures::braced_double_banana().graph, 3));
        // Below d vertices only complete graphs count as rigid.
        assert!(is_rigid(&Graph::complete(1..=2), 3));
        assert!(!is_rigid(&Graph::edgeless([1, 2]), 3));
    }

    #[test]
    fn linked_examples() {
        let g = fixtures::complete_minus_edge(2);
        assert!(is_linked_pair(&g, 2, 1, 2).unwrap());
        assert!(!is_linked_pair(&Graph::path(&[1, 2, 3]), 2, 1, 3).unwrap());
        let b = fixtures::double_banana().graph;
        assert!(is_linked_pair(&b, 3, 1, 2).unwrap());
        assert!(is_linked_pair(&b, 3, 3, 4).is_err());
    }

    #[test]
    fn component_examples() {
        let tree = Graph::path(&[1, 2, 3, 4]);
        for d in 1..4 {
            assert_eq!(rd_components(&tree, d).len(), 3);
        }
        assert_eq!(rd_components(&fixtures::double_banana().graph, 3).len(), 1);
        assert_eq!(rd_components(&fixtures::two_k4_on_edge(), 2).len(), 1);
        assert!(is_rd_connected(&Graph::complete(1..=4), 2).unwrap());
        assert!(!is_rd_connected(&tree, 2).unwrap());
        assert!(is_rd_connected(&fixtures::double_banana().graph, 3).unwrap());
        assert!(is_rd_connected(&Graph::edgeless([1, 2]), 2).is_err());
    }

    #[test]
    fn circuits_agree_with_rank_queries() {
        let g = fixtures::two_k4_on_edge();
        let oracle = RankOracle::new(&g, 2, 7);
        let basis = greedy_basis(&oracle);
        for e in g.edge_list() {
            if basis.contains(&e) {
                continue;
            }
            let circuit = fundamental_circuit(&oracle, &basis, e).unwrap().unwrap();
            for &b in &basis {
                let mut swapped: Vec<Edge> = basis.iter().copied().filter(|&x| x != b).collect();
                swapped.push(e);
                let independent = oracle.rank(Some(&swapped)).unwrap() == basis.len();
                assert_eq!(independent, circuit.contains(&b));
            }
        }
    }

    #[test]
    fn global_rigidity_examples() {
        for d in 1..4 {
            assert!(is_globally_rigid(&Graph::complete(1..=(d as u32 + 2)), d));
            assert!(!is_globally_rigid(&fixtures::complete_minus_edge(d), d));
        }
        // 2-connected chordal but not 3-connected.
        assert!(!is_globally_rigid(&fixtures::two_k4_on_edge(), 2));
        assert!(is_globally_rigid(&Graph::cycle(&[1, 2, 3, 4]), 1));
        assert!(!is_globally_rigid(&Graph::path(&[1, 2, 3]), 1));
        assert!(is_globally_rigid(&Graph::complete(1..=2), 3));
    }

    #[test]
    fn one_dimensional_sanity() {
        for mask in [0x1234_5678u64, 0xdead_beef, 0xffff, 0x8421_0841] {
            let g = erdos_renyi(6, mask);
            assert_eq!(is_rigid(&g, 1), g.is_connected());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn coning_preserves_rigidity(n in 3u32..8, mask: u64, d in 1usize..3) {
            let g = erdos_renyi(n, mask);
            let (c, _) = cone(&g);
            prop_assert_eq!(is_rigid(&g, d), is_rigid(&c, d + 1));
        }

        #[test]
        fn rank_is_submodular(n in 3u32..8, mask: u64, split: u64) {
            let g = erdos_renyi(n, mask);
            let oracle = RankOracle::new(&g, 2, 3);
            let edges = g.edge_list();
            let a: Vec<Edge> = edges.iter().enumerate().filter(|(i, _)| split >> (i % 64) & 1 == 1).map(|(_, &e)| e).collect();
            let b: Vec<Edge> = edges.iter().enumerate().filter(|(i, _)| split >> ((i + 7) % 64) & 1 == 1).map(|(_, &e)| e).collect();
            let union: Vec<Edge> = edges.iter().copied().filter(|e| a.contains(e) || b.contains(e)).collect();
            let inter: Vec<Edge> = a.iter().copied().filter(|e| b.contains(e)).collect();
            let r = |s: &[Edge]| oracle.rank(Some(s)).unwrap();
            prop_assert!(r(&union) + r(&inter) <= r(&a) + r(&b));
            prop_assert!(r(&a) <= r(&edges));
            prop_assert!(r(&edges) <= edges.len().min(rank_bound(n as usize, 2)));
        }
    }
}
