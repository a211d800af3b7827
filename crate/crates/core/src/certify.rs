//! Certificates that a graph is d-joined: rigid, and every globally linked
//! pair is adjacent or (d+1)-connected. A missing certificate means "not
//! proven", never "not d-joined".

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::chordal::perfect_elimination_order;
use crate::connectivity::{
    d_blocks, is_d_connected, local_connectivity, minimal_d_fragment, scan_separators,
    fragments_of_separator, FragmentSelection,
};
use crate::error::{input, Error, Result};
use crate::graph::{glue, induced_subgraph, is_clique, Graph, Vertex, VertexSet};
use crate::rigidity::{check_dimension, is_globally_rigid_seeded, is_linked_pair_seeded, is_rd_connected_seeded, is_rigid_seeded};
use crate::seed::DEFAULT_SEED;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    GloballyRigid,
    GluingTree,
    /// d-connected and chordal; carries a perfect elimination order.
    Chordal,
    /// d = 2, rigid and connected in the 2-dimensional rigidity matroid.
    R2Connected,
    /// A spanning subgraph is certified; adding edges preserves d-joinedness.
    SupergraphOfCertified,
}

/// Binary build-up of a graph from globally rigid pieces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "kebab-case")]
pub enum GluingTree {
    Leaf { graph: Graph },
    Glue { shared: VertexSet, left: Box<GluingTree>, right: Box<GluingTree> },
}

impl GluingTree {
    /// The glued graph.
    pub fn graph(&self) -> Graph {
        match self {
            GluingTree::Leaf { graph } => graph.clone(),
            GluingTree::Glue { left, right, .. } => glue(&left.graph(), &right.graph()),
        }
    }

    pub fn leaves(&self) -> Vec<&Graph> {
        match self {
            GluingTree::Leaf { graph } => vec![graph],
            GluingTree::Glue { left, right, .. } => {
                let mut out = left.leaves();
                out.extend(right.leaves());
                out
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            GluingTree::Leaf { .. } => 0,
            GluingTree::Glue { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    /// Checks every invariant and returns the glued graph.
    fn validate(&self, d: usize, seed: u64) -> Result<Graph> {
        match self {
            GluingTree::Leaf { graph } => {
                if graph.vertex_count() < d + 1 {
                    return input(format!("leaf {:?} has fewer than {} vertices", graph.vertex_set(), d + 1));
                }
                if !is_globally_rigid_seeded(graph, d, seed) {
                    return input(format!("leaf on {} is not globally rigid", graph.vertex_set()));
                }
                Ok(graph.clone())
            }
            GluingTree::Glue { shared, left, right } => {
                let (a, b) = (left.validate(d, seed)?, right.validate(d, seed)?);
                let (va, vb) = (a.vertex_set(), b.vertex_set());
                let union = glue(&a, &b);
                let vu = union.vertex_set();
                if &va.intersection(&vb) != shared {
                    return input(format!("node shares {} but children meet in {}", shared, va.intersection(&vb)));
                }
                if shared.len() < d {
                    return input(format!("node glues along {} < {d} vertices", shared.len()));
                }
                if va == vu || vb == vu {
                    return input(format!("a child of the node over {shared} spans the whole union"));
                }
                Ok(union)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree: Option<GluingTree>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elimination_order: Option<Vec<Vertex>>,
    /// Certified spanning subgraph for [`CertificateKind::SupergraphOfCertified`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Graph>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_certificate: Option<Box<Certificate>>,
}

impl Certificate {
    fn plain(kind: CertificateKind, d: usize) -> Certificate {
        Certificate { kind, d, tree: None, elimination_order: None, base: None, base_certificate: None }
    }

    /// Re-checks the certificate against `g` from scratch.
    pub fn validate(&self, g: &Graph, seed: u64) -> Result<()> {
        let d = self.d;
        check_dimension(d)?;
        if g.vertex_count() < d + 1 {
            return input(format!("graph has fewer than {} vertices", d + 1));
        }
        match self.kind {
            CertificateKind::GloballyRigid => {
                if !is_globally_rigid_seeded(g, d, seed) {
                    return input("graph is not globally rigid");
                }
            }
            CertificateKind::GluingTree => {
                let tree = self.tree.as_ref().ok_or_else(|| Error::Input("gluing-tree certificate without a tree".into()))?;
                if &tree.validate(d, seed)? != g {
                    return input("gluing tree does not rebuild the graph");
                }
            }
            CertificateKind::Chordal => {
                if !is_d_connected(g, d) {
                    return input(format!("graph is not {d}-connected"));
                }
                let order = self.elimination_order.as_ref().ok_or_else(|| Error::Input("chordal certificate without an order".into()))?;
                if !is_perfect_order(g, order) {
                    return input("elimination order is not perfect");
                }
            }
            CertificateKind::R2Connected => {
                if d != 2 {
                    return input("R2-connected certificate needs d = 2");
                }
                if !is_rd_connected_seeded(g, 2, seed)? || !is_rigid_seeded(g, 2, seed) {
                    return input("graph is not rigid and R2-connected");
                }
            }
            CertificateKind::SupergraphOfCertified => {
                let base = self.base.as_ref().ok_or_else(|| Error::Input("supergraph certificate without a base".into()))?;
                let inner = self.base_certificate.as_ref().ok_or_else(|| Error::Input("supergraph certificate without a base certificate".into()))?;
                if base.vertex_set() != g.vertex_set() || base.edges().any(|(u, v)| !g.has_edge(u, v)) {
                    return input("base is not a spanning subgraph");
                }
                if inner.d != d {
                    return input("base certificate has a different dimension");
                }
                inner.validate(base, seed)?;
            }
        }
        Ok(())
    }

    pub fn is_valid(&self, g: &Graph) -> bool {
        self.validate(g, DEFAULT_SEED).is_ok()
    }
}

fn is_perfect_order(g: &Graph, order: &[Vertex]) -> bool {
    let position: BTreeMap<Vertex, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    if position.len() != order.len() || position.keys().copied().ne(g.vertices()) {
        return false;
    }
    order.iter().enumerate().all(|(i, &v)| {
        let later: VertexSet = g.neighbors(v).filter(|w| position[w] > i).collect();
        is_clique(g, &later).unwrap_or(false)
    })
}

/// Recursively splits `g` along d-fragments until every piece is globally
/// rigid. Subproblems are induced subgraphs, memoized by vertex set.
pub fn certify_gluing_construction(g: &Graph, d: usize) -> Result<Option<Certificate>> {
    certify_gluing_construction_seeded(g, d, DEFAULT_SEED)
}

pub fn certify_gluing_construction_seeded(g: &Graph, d: usize, seed: u64) -> Result<Option<Certificate>> {
    check_dimension(d)?;
    if g.vertex_count() <= d {
        return input(format!("gluing construction needs more than {d} vertices"));
    }
    let mut memo = BTreeMap::new();
    Ok(gluing_tree(g, d, seed, &mut memo).map(|tree| Certificate {
        tree: Some(tree),
        ..Certificate::plain(CertificateKind::GluingTree, d)
    }))
}

fn gluing_tree(
    g: &Graph,
    d: usize,
    seed: u64,
    memo: &mut BTreeMap<VertexSet, Option<GluingTree>>,
) -> Option<GluingTree> {
    let key = g.vertex_set();
    if let Some(hit) = memo.get(&key) {
        return hit.clone();
    }
    let out = if g.vertex_count() < d + 1 {
        None
    } else if is_globally_rigid_seeded(g, d, seed) {
        Some(GluingTree::Leaf { graph: g.clone() })
    } else if !is_d_connected(g, d) {
        None
    } else {
        split_candidates(g, d).into_iter().find_map(|(x, boundary)| {
            let inner = induced_subgraph(g, &x.union(&boundary)).ok()?;
            let outer = induced_subgraph(g, &key.difference(&x)).ok()?;
            let left = gluing_tree(&inner, d, seed, memo)?;
            let right = gluing_tree(&outer, d, seed, memo)?;
            Some(GluingTree::Glue { shared: boundary, left: Box::new(left), right: Box::new(right) })
        })
    };
    memo.insert(key, out.clone());
    out
}

/// Single-component d-fragments with their boundaries, the minimal fragment
/// first, then by size and member set.
fn split_candidates(g: &Graph, d: usize) -> Vec<(VertexSet, VertexSet)> {
    let mut out: Vec<(VertexSet, VertexSet)> = scan_separators(g, d)
        .iter()
        .flat_map(|s| fragments_of_separator(g, s, FragmentSelection::SingleComponents).unwrap_or_default())
        .map(|f| (f.members().clone(), f.boundary().clone()))
        .collect();
    out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.cmp(b)));
    if let Ok(m) = minimal_d_fragment(g, d) {
        if let Some(i) = out.iter().position(|(x, _)| x == m.members()) {
            let first = out.remove(i);
            out.insert(0, first);
        }
    }
    out
}

/// d-connected chordal graph with at least `d+1` vertices.
pub fn certify_chordal(g: &Graph, d: usize) -> Option<Certificate> {
    if d == 0 || g.vertex_count() < d + 1 || !is_d_connected(g, d) {
        return None;
    }
    perfect_elimination_order(g).map(|order| Certificate {
        elimination_order: Some(order),
        ..Certificate::plain(CertificateKind::Chordal, d)
    })
}

pub fn certify_d_joined(g: &Graph, d: usize) -> Option<Certificate> {
    certify_d_joined_seeded(g, d, DEFAULT_SEED)
}

/// Tries global rigidity, the 2-dimensional matroid route, a gluing
/// construction, then a bounded search for a certified spanning subgraph.
pub fn certify_d_joined_seeded(g: &Graph, d: usize, seed: u64) -> Option<Certificate> {
    if d == 0 || g.vertex_count() < d + 1 || !is_rigid_seeded(g, d, seed) {
        return None;
    }
    if let Some(c) = direct_routes(g, d, seed) {
        return Some(c);
    }
    supergraph_route(g, d, seed)
}

fn direct_routes(g: &Graph, d: usize, seed: u64) -> Option<Certificate> {
    if is_globally_rigid_seeded(g, d, seed) {
        return Some(Certificate::plain(CertificateKind::GloballyRigid, d));
    }
    // A gluing tree says more than a bare matroid verdict, so it goes first.
    if let Some(c) = certify_gluing_construction_seeded(g, d, seed).ok().flatten() {
        return Some(c);
    }
    if d == 2 && is_rd_connected_seeded(g, 2, seed).unwrap_or(false) && is_rigid_seeded(g, 2, seed) {
        return Some(Certificate::plain(CertificateKind::R2Connected, d));
    }
    None
}

/// Drops one edge per pass, keeping d-connectivity and rigidity, and tries
/// the direct routes on every one-edge-smaller spanning subgraph. Edges with
/// few common neighbors go first: they are the likeliest braces.
fn supergraph_route(g: &Graph, d: usize, seed: u64) -> Option<Certificate> {
    let mut current = g.clone();
    for _ in 0..g.edge_count() {
        let mut removable: Vec<(usize, (Vertex, Vertex))> = current
            .edges()
            .filter(|&(u, v)| {
                let h = current.without_edge(u, v);
                is_d_connected(&h, d) && is_rigid_seeded(&h, d, seed)
            })
            .map(|(u, v)| (current.neighbors(u).filter(|&w| current.has_edge(v, w)).count(), (u, v)))
            .collect();
        removable.sort();
        for &(_, (u, v)) in &removable {
            let h = current.without_edge(u, v);
            if let Some(inner) = direct_routes(&h, d, seed) {
                return Some(Certificate {
                    base: Some(h),
                    base_certificate: Some(Box::new(inner)),
                    ..Certificate::plain(CertificateKind::SupergraphOfCertified, d)
                });
            }
        }
        let &(_, (u, v)) = removable.first()?;
        current = current.without_edge(u, v);
    }
    None
}

fn require_valid(g: &Graph, cert: &Certificate) -> Result<()> {
    cert.validate(g, DEFAULT_SEED)
        .map_err(|e| Error::Input(format!("invalid certificate: {e}")))
}

/// For a certified graph: `uv` adjacent or `κ(G,u,v) ≥ d+1`.
pub fn globally_linked(g: &Graph, cert: &Certificate, u: Vertex, v: Vertex) -> Result<bool> {
    require_valid(g, cert)?;
    Ok(g.has_edge(u, v) || local_connectivity(g, u, v)? > cert.d)
}

/// Globally linked closure of a certified graph.
pub fn closure_star(g: &Graph, cert: &Certificate) -> Result<Graph> {
    require_valid(g, cert)?;
    Ok(closure_unchecked(g, cert.d))
}

fn closure_unchecked(g: &Graph, d: usize) -> Graph {
    let vs: Vec<Vertex> = g.vertices().collect();
    let mut out = g.clone();
    for (i, &a) in vs.iter().enumerate() {
        for &b in &vs[i + 1..] {
            if !g.has_edge(a, b) && local_connectivity(g, a, b).unwrap_or(0) > d {
                out = out.with_edge(a, b).expect("vertices exist");
            }
        }
    }
    out
}

/// The closure of a d-joined graph is d-connected, its d-separators are
/// cliques and its (d+1)-blocks are cliques. Any `false` on a valid
/// certificate points at a bug; an invalid certificate also gives `false`.
pub fn check_closure_characterization(g: &Graph, cert: &Certificate) -> bool {
    if require_valid(g, cert).is_err() {
        return false;
    }
    let d = cert.d;
    let cl = closure_unchecked(g, d);
    is_d_connected(&cl, d)
        && scan_separators(&cl, d).iter().all(|s| is_clique(&cl, s.members()).unwrap_or(false))
        && d_blocks(&cl, d + 1).iter().all(|b| is_clique(&cl, b).unwrap_or(false))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Yes,
    No,
    /// Depends on the conjecture that linkedness of a 2-separator passes to the side graphs.
    ConditionalYes,
    ConditionalNo,
    Unknown,
}

impl Verdict {
    fn from_parts(value: bool, conditional: bool) -> Verdict {
        match (value, conditional) {
            (true, false) => Verdict::Yes,
            (false, false) => Verdict::No,
            (true, true) => Verdict::ConditionalYes,
            (false, true) => Verdict::ConditionalNo,
        }
    }

    pub fn value(self) -> Option<bool> {
        match self {
            Verdict::Yes | Verdict::ConditionalYes => Some(true),
            Verdict::No | Verdict::ConditionalNo => Some(false),
            Verdict::Unknown => None,
        }
    }

    pub fn is_conditional(self) -> bool {
        matches!(self, Verdict::ConditionalYes | Verdict::ConditionalNo)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Recognition {
    pub verdict: Verdict,
    /// One line per decision, outermost split first.
    pub trace: Vec<String>,
}

/// Recursive 2-dimensional recognition of 2-joined graphs along minimal
/// 2-fragments. Branches that rely on the unproven linkedness transfer are
/// tagged conditional.
pub fn recognize_2joined_conditional(g: &Graph, d: usize) -> Result<Recognition> {
    recognize_2joined_conditional_seeded(g, d, DEFAULT_SEED)
}

pub fn recognize_2joined_conditional_seeded(g: &Graph, d: usize, seed: u64) -> Result<Recognition> {
    if d != 2 {
        return Err(Error::Unsupported(format!("conditional recognition needs d = 2, got {d}")));
    }
    if g.vertex_count() < 3 {
        return input("recognition needs at least 3 vertices");
    }
    let mut trace = Vec::new();
    let (value, conditional) = match recognize(g, seed, &mut trace) {
        Some(r) => r,
        None => return Ok(Recognition { verdict: Verdict::Unknown, trace }),
    };
    Ok(Recognition { verdict: Verdict::from_parts(value, conditional), trace })
}

/// `(is 2-joined, relied on a conditional branch)`.
fn recognize(g: &Graph, seed: u64, trace: &mut Vec<String>) -> Option<(bool, bool)> {
    let vs = g.vertex_set();
    if !is_rigid_seeded(g, 2, seed) {
        trace.push(format!("{vs}: not rigid"));
        return Some((false, false));
    }
    if g.vertex_count() <= 3 || is_d_connected(g, 3) {
        let gr = is_globally_rigid_seeded(g, 2, seed);
        trace.push(format!("{vs}: 3-connected or small, globally rigid = {gr}"));
        return Some((gr, false));
    }
    let x = match minimal_d_fragment(g, 2) {
        Ok(x) => x,
        Err(e) => {
            trace.push(format!("{vs}: no minimal 2-fragment ({e})"));
            return None;
        }
    };
    let (u, v) = match x.boundary().to_vec()[..] {
        [u, v] => (u, v),
        _ => return None,
    };
    let with_uv = |h: Graph| if h.has_edge(u, v) { h } else { h.with_edge(u, v).expect("vertices exist") };
    let g1 = with_uv(induced_subgraph(g, &x.members().union(x.boundary())).ok()?);
    let g2 = with_uv(induced_subgraph(g, &vs.difference(x.members())).ok()?);
    if !is_globally_rigid_seeded(&g1, 2, seed) {
        trace.push(format!("{vs}: split at {{{u},{v}}}, side {} + uv not globally rigid", x.members()));
        return Some((false, false));
    }
    let (rest, mut conditional) = recognize(&g2, seed, trace)?;
    if !rest {
        trace.push(format!("{vs}: split at {{{u},{v}}}, remainder not 2-joined"));
        return Some((false, conditional));
    }
    let linked = if g.has_edge(u, v) {
        trace.push(format!("{vs}: split at {{{u},{v}}}, separator is an edge"));
        true
    } else if is_globally_rigid_seeded(&g1.without_edge(u, v), 2, seed) {
        trace.push(format!("{vs}: split at {{{u},{v}}}, side {} globally rigid", x.members()));
        true
    } else {
        let l = is_linked_pair_seeded(&g2.without_edge(u, v), 2, u, v, seed).ok()?;
        trace.push(format!("{vs}: split at {{{u},{v}}}, conditional: linked in remainder = {l}"));
        conditional = true;
        l
    };
    Some((linked, conditional))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chordal::is_chordal;
    use crate::fixtures;

    #[test]
    fn chordal_chains_have_gluing_trees() {
        for (g, d) in [
            (fixtures::clique_chain(3, 4, 2), 2),
            (fixtures::clique_chain(3, 5, 3), 3),
            (fixtures::two_k4_on_edge(), 2),
            (fixtures::complete_minus_edge(2), 2),
            (fixtures::complete_minus_edge(3), 3),
        ] {
            let c = certify_gluing_construction(&g, d).unwrap().expect("chordal graph certifies");
            assert!(c.is_valid(&g), "{g:?}");
            assert!(c.tree.as_ref().unwrap().leaves().len() >= 2);
        }
    }

    #[test]
    fn double_banana_has_no_certificate() {
        let b = fixtures::double_banana().graph;
        assert_eq!(certify_gluing_construction(&b, 3).unwrap(), None);
        assert_eq!(certify_d_joined(&b, 3), None);
        assert!(certify_gluing_construction(&Graph::complete([1, 2, 3]), 3).is_err());
    }

    #[test]
    fn braced_chain_certifies_through_a_subgraph() {
        // Brace the two ends of a chain of three K4's; the result is no longer chordal.
        let g = fixtures::clique_chain(3, 4, 2).with_edge(1, 8).unwrap();
        assert!(!is_chordal(&g));
        let c = certify_d_joined(&g, 2).expect("braced chain certifies");
        assert!(c.is_valid(&g));
        assert!(check_closure_characterization(&g, &c));
    }

    #[test]
    fn linked_pairs_and_closure() {
        let g = fixtures::two_k4_on_edge();
        let c = certify_d_joined(&g, 2).unwrap();
        assert!(globally_linked(&g, &c, 1, 2).unwrap());
        assert!(!globally_linked(&g, &c, 1, 5).unwrap());
        assert_eq!(closure_star(&g, &c).unwrap(), g);

        let k = fixtures::complete_minus_edge(2);
        let c = certify_d_joined(&k, 2).unwrap();
        assert!(!globally_linked(&k, &c, 1, 2).unwrap());

        let k5 = Graph::complete(1..=5);
        let c = certify_d_joined(&k5, 3).unwrap();
        assert_eq!(c.kind, CertificateKind::GloballyRigid);
        assert_eq!(closure_star(&k5, &c).unwrap(), k5);
    }

    #[test]
    fn corrupted_certificate_is_rejected() {
        let c4 = Graph::cycle(&[1, 2, 3, 4]);
        let fake = Certificate::plain(CertificateKind::GloballyRigid, 2);
        assert!(!check_closure_characterization(&c4, &fake));
        assert!(matches!(globally_linked(&c4, &fake, 1, 3), Err(Error::Input(_))));
        assert_eq!(certify_d_joined(&c4, 2), None);
    }

    #[test]
    fn certificate_round_trips_through_json() {
        let g = fixtures::clique_chain(3, 4, 2);
        let c = certify_d_joined(&g, 2).unwrap();
        let back: Certificate = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        assert!(back.is_valid(&g));
    }

    #[test]
    fn chordal_certificate_validates() {
        let g = fixtures::two_k5_on_triangle();
        let c = certify_chordal(&g, 3).unwrap();
        assert!(c.is_valid(&g));
        assert!(certify_chordal(&Graph::cycle(&[1, 2, 3, 4]), 2).is_none());
    }

    #[test]
    fn conditional_recognizer() {
        let r = recognize_2joined_conditional(&Graph::complete(1..=4), 2).unwrap();
        assert_eq!(r.verdict, Verdict::Yes);
        let r = recognize_2joined_conditional(&Graph::cycle(&[1, 2, 3, 4]), 2).unwrap();
        assert_eq!(r.verdict, Verdict::No);
        for g in [fixtures::two_k4_on_edge(), fixtures::clique_chain(3, 4, 2), fixtures::complete_minus_edge(2)] {
            let r = recognize_2joined_conditional(&g, 2).unwrap();
            assert_eq!(r.verdict.value(), Some(certify_d_joined(&g, 2).is_some()), "{g:?}");
        }
        let g = fixtures::planar_banana_pair();
        let r = recognize_2joined_conditional(&g, 2).unwrap();
        assert_eq!(r.verdict, Verdict::ConditionalYes, "{:?}", r.trace);
        let c = certify_d_joined(&g, 2).unwrap();
        assert!(globally_linked(&g, &c, 1, 2).unwrap());
        assert!(check_closure_characterization(&g, &c));
        assert!(matches!(
            recognize_2joined_conditional(&Graph::complete(1..=5), 3),
            Err(Error::Unsupported(_))
        ));
    }
}
