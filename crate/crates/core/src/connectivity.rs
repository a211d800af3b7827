//! Local connectivity, d-separators, fragments and their order structure.
//!
//! Everything here is exact and exhaustive: separators are found by scanning
//! all vertex subsets of the requested size, which is fine for graphs of a few
//! dozen vertices and small `d`.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::cliques::maximal_cliques;
use crate::error::{input, Error, Result};
use crate::graph::{neighborhood, Graph, Vertex, VertexSet};
use itertools::Itertools;

/// A set of vertices whose removal disconnects the graph.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Separator(VertexSet);

impl Separator {
    pub fn new(g: &Graph, members: VertexSet) -> Result<Separator> {
        g.check_subset(&members)?;
        if g.components_without(&members).len() < 2 {
            return Err(Error::Logic(format!("{members} is not a separator")));
        }
        Ok(Separator(members))
    }

    pub fn members(&self) -> &VertexSet {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.len()
    }
}

/// A nonempty vertex set `X` with nonempty `V - X - N(X)`, together with its
/// boundary `N(X)` and complement.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fragment {
    members: VertexSet,
    boundary: VertexSet,
    complement: VertexSet,
    graph_fingerprint: u64,
}

impl Fragment {
    pub fn new(g: &Graph, members: VertexSet) -> Result<Fragment> {
        if members.is_empty() {
            return input("a fragment must be nonempty");
        }
        let boundary = neighborhood(g, &members)?;
        let complement = g
            .vertex_set()
            .difference(&members)
            .difference(&boundary);
        if complement.is_empty() {
            return input(format!("{members} has an empty complement"));
        }
        Ok(Fragment {
            members,
            boundary,
            complement,
            graph_fingerprint: g.fingerprint(),
        })
    }

    /// Builds a fragment and requires `|N(X)| = d`.
    pub fn new_d(g: &Graph, members: VertexSet, d: usize) -> Result<Fragment> {
        let f = Fragment::new(g, members)?;
        if f.boundary.len() != d {
            return input(format!(
                "{} has a boundary of size {}, expected {d}",
                f.members,
                f.boundary.len()
            ));
        }
        Ok(f)
    }

    pub fn members(&self) -> &VertexSet {
        &self.members
    }

    pub fn boundary(&self) -> &VertexSet {
        &self.boundary
    }

    pub fn complement(&self) -> &VertexSet {
        &self.complement
    }

    pub fn graph_fingerprint(&self) -> u64 {
        self.graph_fingerprint
    }

    pub fn size(&self) -> usize {
        self.boundary.len()
    }

    pub fn belongs_to(&self, g: &Graph) -> bool {
        self.graph_fingerprint == g.fingerprint()
    }

    pub fn check_graph(&self, g: &Graph) -> Result<()> {
        if self.belongs_to(g) {
            Ok(())
        } else {
            input(format!("fragment {} belongs to a different graph", self.members))
        }
    }

    /// `u` and `v` lie on opposite sides.
    pub fn separates(&self, u: Vertex, v: Vertex) -> bool {
        (self.members.contains(u) && self.complement.contains(v))
            || (self.members.contains(v) && self.complement.contains(u))
    }

    /// The fragment on the other side. Its boundary can be smaller than
    /// `N(X)` when the graph is not `|N(X)|`-connected.
    pub fn flipped(&self, g: &Graph) -> Result<Fragment> {
        self.check_graph(g)?;
        Fragment::new(g, self.complement.clone())
    }
}

fn index_map(g: &Graph) -> (Vec<Vertex>, BTreeMap<Vertex, usize>) {
    let vs: Vec<Vertex> = g.vertices().collect();
    let idx = vs.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    (vs, idx)
}

/// Maximum number of internally vertex-disjoint `u`-`v` paths in `g` with the
/// edge `uv` (if present) ignored.
fn disjoint_paths_avoiding_edge(g: &Graph, u: Vertex, v: Vertex) -> usize {
    let (vs, idx) = index_map(g);
    let n = vs.len();
    // Vertex i splits into in-node 2i and out-node 2i+1.
    let nodes = 2 * n;
    let big = n as i32 + 1;
    let mut cap = vec![vec![0i32; nodes]; nodes];
    let (s, t) = (idx[&u], idx[&v]);
    for i in 0..n {
        cap[2 * i][2 * i + 1] = if i == s || i == t { big } else { 1 };
    }
    for (a, b) in g.edges() {
        if (a == u && b == v) || (a == v && b == u) {
            continue;
        }
        let (i, j) = (idx[&a], idx[&b]);
        cap[2 * i + 1][2 * j] = big;
        cap[2 * j + 1][2 * i] = big;
    }
    let (source, sink) = (2 * s + 1, 2 * t);
    let mut flow = 0;
    loop {
        let mut parent = vec![usize::MAX; nodes];
        parent[source] = source;
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            if x == sink {
                break;
            }
            for y in 0..nodes {
                if parent[y] == usize::MAX && cap[x][y] > 0 {
                    parent[y] = x;
                    queue.push_back(y);
                }
            }
        }
        if parent[sink] == usize::MAX {
            return flow;
        }
        // Every augmenting path crosses at least one unit-capacity arc.
        let mut y = sink;
        while y != source {
            let x = parent[y];
            cap[x][y] -= 1;
            cap[y][x] += 1;
            y = x;
        }
        flow += 1;
    }
}

/// `κ(G,u,v)`: the maximum number of internally vertex-disjoint `u`-`v` paths.
/// An edge `uv` counts as one path.
pub fn local_connectivity(g: &Graph, u: Vertex, v: Vertex) -> Result<usize> {
    g.check_vertex(u)?;
    g.check_vertex(v)?;
    if u == v {
        return input("local connectivity needs two distinct vertices");
    }
    let direct = usize::from(g.has_edge(u, v));
    Ok(direct + disjoint_paths_avoiding_edge(g, u, v))
}

/// At least `d+1` vertices and no separator of size at most `d-1`.
pub fn is_d_connected(g: &Graph, d: usize) -> bool {
    if g.vertex_count() < d + 1 {
        return false;
    }
    let vs: Vec<Vertex> = g.vertices().collect();
    for (i, &a) in vs.iter().enumerate() {
        for &b in &vs[i + 1..] {
            if !g.has_edge(a, b) && disjoint_paths_avoiding_edge(g, a, b) < d {
                return false;
            }
        }
    }
    true
}

/// Vertex connectivity: `n-1` for complete graphs, otherwise the minimum of
/// `κ` over nonadjacent pairs.
pub fn vertex_connectivity(g: &Graph) -> usize {
    let n = g.vertex_count();
    let vs: Vec<Vertex> = g.vertices().collect();
    let mut best = n.saturating_sub(1);
    for (i, &a) in vs.iter().enumerate() {
        for &b in &vs[i + 1..] {
            if !g.has_edge(a, b) {
                best = best.min(disjoint_paths_avoiding_edge(g, a, b));
            }
        }
    }
    best
}

/// All separators of size exactly `d`, in lexicographic order.
pub fn enumerate_d_separators(g: &Graph, d: usize) -> Result<Vec<Separator>> {
    let n = g.vertex_count();
    if d == 0 || d >= n {
        return input(format!("separator size must satisfy 0 < d < |V| = {n}, got {d}"));
    }
    Ok(scan_separators(g, d))
}

/// Like [`enumerate_d_separators`] but returns an empty list for sizes that
/// cannot disconnect anything.
pub(crate) fn scan_separators(g: &Graph, d: usize) -> Vec<Separator> {
    let vs: Vec<Vertex> = g.vertices().collect();
    if d == 0 || d + 2 > vs.len() {
        return Vec::new();
    }
    (0..vs.len()).combinations(d)
        .map(|c| c.into_iter().map(|i| vs[i]).collect::<VertexSet>())
        .filter(|s| g.components_without(s).len() >= 2)
        .map(Separator)
        .collect()
}

pub fn is_separating(g: &Graph, s: &Separator, u: Vertex, v: Vertex) -> Result<bool> {
    g.check_vertex(u)?;
    g.check_vertex(v)?;
    if s.members().contains(u) || s.members().contains(v) {
        return input(format!("({u},{v}) meets the separator {}", s.members()));
    }
    if u == v {
        return input("a vertex is never separated from itself");
    }
    Ok(separates_pair(g, s.members(), u, v))
}

fn separates_pair(g: &Graph, s: &VertexSet, u: Vertex, v: Vertex) -> bool {
    g.components_without(s)
        .iter()
        .find(|c| c.contains(u))
        .is_some_and(|c| !c.contains(v))
}

/// Which fragments of a separator to materialize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FragmentSelection {
    /// Every union of a proper nonempty subset of the components whose
    /// neighborhood is exactly the separator.
    AllUnions,
    /// Only single components with neighborhood exactly the separator.
    SingleComponents,
}

/// Fragments `X` with `N(X) = s`, sorted by member set.
pub fn fragments_of_separator(
    g: &Graph,
    s: &Separator,
    selection: FragmentSelection,
) -> Result<Vec<Fragment>> {
    g.check_subset(s.members())?;
    if g.vertex_count() < s.size() + 2 {
        return input(format!(
            "separator size {} exceeds |V| - 2 = {}",
            s.size(),
            g.vertex_count().saturating_sub(2)
        ));
    }
    let comps = g.components_without(s.members());
    if comps.len() < 2 {
        return Err(Error::Logic(format!("{} is not a separator", s.members())));
    }
    let mut out = Vec::new();
    match selection {
        FragmentSelection::SingleComponents => {
            for c in &comps {
                if &neighborhood(g, c)? == s.members() {
                    out.push(Fragment::new(g, c.clone())?);
                }
            }
        }
        FragmentSelection::AllUnions => {
            let b = comps.len();
            if b >= 20 {
                return input(format!("{b} components are too many to enumerate unions"));
            }
            for mask in 1u32..(1 << b) - 1 {
                let x: VertexSet = (0..b)
                    .filter(|i| mask & (1 << i) != 0)
                    .flat_map(|i| comps[i].iter())
                    .collect();
                if &neighborhood(g, &x)? == s.members() {
                    out.push(Fragment::new(g, x)?);
                }
            }
        }
    }
    out.sort_by(|a, b| a.members().cmp(b.members()));
    Ok(out)
}

/// All fragments with a boundary of size exactly `d`, sorted by
/// (boundary, members).
pub fn all_d_fragments(g: &Graph, d: usize) -> Result<Vec<Fragment>> {
    let mut out = Vec::new();
    for s in scan_separators(g, d) {
        out.extend(fragments_of_separator(g, &s, FragmentSelection::AllUnions)?);
    }
    Ok(out)
}

fn check_d_separator_pair(g: &Graph, s: &Separator, t: &Separator) -> Result<usize> {
    let d = s.size();
    if t.size() != d {
        return input("separators of different sizes");
    }
    for x in [s, t] {
        g.check_subset(x.members())?;
        if g.components_without(x.members()).len() < 2 {
            return input(format!("{} is not a separator", x.members()));
        }
    }
    Ok(d)
}

/// Whether the members of `s` outside `t` meet at least two components of `G - t`.
fn meets_two_components(g: &Graph, s: &VertexSet, t: &VertexSet) -> bool {
    let comps = g.components_without(t);
    comps
        .iter()
        .filter(|c| s.iter().any(|v| c.contains(v)))
        .count()
        >= 2
}

/// Whether two d-separators of a d-connected graph cross. The relation is
/// computed in both directions and the two answers must agree.
pub fn crosses(g: &Graph, s: &Separator, t: &Separator) -> Result<bool> {
    let d = check_d_separator_pair(g, s, t)?;
    if !is_d_connected(g, d) {
        return input(format!("graph is not {d}-connected"));
    }
    Ok(crosses_unchecked(g, s, t)?)
}

pub(crate) fn crosses_unchecked(g: &Graph, s: &Separator, t: &Separator) -> Result<bool> {
    let st = meets_two_components(g, s.members(), t.members());
    let ts = meets_two_components(g, t.members(), s.members());
    if st != ts {
        return Err(Error::Consistency(format!(
            "crossing relation is not symmetric for {} and {}",
            s.members(),
            t.members()
        )));
    }
    Ok(st)
}

/// Whether the d-separators of `g` contain a crossing pair.
pub fn has_crossing_separators(g: &Graph, d: usize) -> Result<bool> {
    let seps = scan_separators(g, d);
    for (i, s) in seps.iter().enumerate() {
        for t in &seps[i + 1..] {
            if crosses_unchecked(g, s, t)? {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Outcome of comparing two `(u,v)`-separating separators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeparatorOrder {
    LessEqual,
    GreaterEqual,
    Equal,
    Incomparable,
}

/// `s ⪯ t` iff `T - S` lies in the component of `v` in `G - S`.
fn precedes(g: &Graph, s: &VertexSet, t: &VertexSet, v: Vertex) -> bool {
    let rest = t.difference(s);
    let comps = g.components_without(s);
    let Some(cv) = comps.iter().find(|c| c.contains(v)) else {
        return false;
    };
    let ok = rest.iter().all(|x| cv.contains(x));
    ok
}

/// Compares two `(u,v)`-separating separators: `s ⪯ t` when `t` lies on
/// `v`'s side of `s`.
pub fn preceq(
    g: &Graph,
    s: &Separator,
    t: &Separator,
    u: Vertex,
    v: Vertex,
) -> Result<SeparatorOrder> {
    check_d_separator_pair(g, s, t)?;
    for x in [s, t] {
        if !is_separating(g, x, u, v)? {
            return input(format!("{} does not separate {u} and {v}", x.members()));
        }
    }
    if s == t {
        return Ok(SeparatorOrder::Equal);
    }
    let le = precedes(g, s.members(), t.members(), v);
    let ge = precedes(g, t.members(), s.members(), v);
    match (le, ge) {
        (true, false) => Ok(SeparatorOrder::LessEqual),
        (false, true) => Ok(SeparatorOrder::GreaterEqual),
        (false, false) => Ok(SeparatorOrder::Incomparable),
        (true, true) => Err(Error::Consistency(format!(
            "distinct separators {} and {} precede each other",
            s.members(),
            t.members()
        ))),
    }
}

/// For a descending chain `S_1 ⪰ ... ⪰ S_k` with `S_{k-1} ≠ S_k`, returns
/// `S_k` minus the union of the earlier members, which is nonempty.
pub fn chain_gap(g: &Graph, chain: &[Separator], u: Vertex, v: Vertex) -> Result<VertexSet> {
    if chain.len() < 2 {
        return Err(Error::Logic("a chain needs at least two separators".into()));
    }
    for w in chain.windows(2) {
        match preceq(g, &w[1], &w[0], u, v)? {
            SeparatorOrder::LessEqual | SeparatorOrder::Equal => {}
            other => {
                return Err(Error::Logic(format!(
                    "chain is not descending at {} -> {}: {other:?}",
                    w[0].members(),
                    w[1].members()
                )))
            }
        }
    }
    let k = chain.len();
    if chain[k - 2] == chain[k - 1] {
        return Err(Error::Logic("the last two separators of the chain coincide".into()));
    }
    let earlier = chain[..k - 1]
        .iter()
        .fold(VertexSet::new(), |acc, s| acc.union(s.members()));
    let gap = chain[k - 1].members().difference(&earlier);
    if gap.is_empty() {
        return Err(Error::Consistency("chain gap is empty".into()));
    }
    Ok(gap)
}

/// Maximal sets in which every pair is adjacent or has `κ ≥ d`.
pub fn d_blocks(g: &Graph, d: usize) -> Vec<VertexSet> {
    let vs: Vec<Vertex> = g.vertices().collect();
    let mut linkage = Vec::new();
    for (i, &a) in vs.iter().enumerate() {
        for &b in &vs[i + 1..] {
            if g.has_edge(a, b) || disjoint_paths_avoiding_edge(g, a, b) >= d {
                linkage.push((a, b));
            }
        }
    }
    let mut h = Graph::edgeless(vs.iter().copied());
    for (a, b) in linkage {
        h = h.with_edge(a, b).expect("vertices exist");
    }
    maximal_cliques(&h)
}

/// An inclusion-wise minimal d-fragment, the lexicographically smallest among
/// the minimal ones.
pub fn minimal_d_fragment(g: &Graph, d: usize) -> Result<Fragment> {
    let n = g.vertex_count();
    if d == 0 || d + 2 > n {
        return input(format!("fragment size d must satisfy 1 <= d <= |V| - 2 = {}", n.saturating_sub(2)));
    }
    if !is_d_connected(g, d) {
        return input(format!("graph is not {d}-connected"));
    }
    if is_d_connected(g, d + 1) {
        return Err(Error::NotFound(format!("graph is {}-connected", d + 1)));
    }
    // Minimal fragments are single components; unions only add supersets.
    let mut candidates = Vec::new();
    for s in scan_separators(g, d) {
        candidates.extend(fragments_of_separator(g, &s, FragmentSelection::SingleComponents)?);
    }
    let minimal: Vec<&Fragment> = candidates
        .iter()
        .filter(|x| {
            !candidates.iter().any(|y| {
                y.members() != x.members() && y.members().is_subset(x.members())
            })
        })
        .collect();
    minimal
        .into_iter()
        .min_by(|a, b| a.members().cmp(b.members()))
        .cloned()
        .ok_or_else(|| Error::NotFound(format!("no {d}-fragment")))
}

/// `c_d(G)`: the sum over all `d`-subsets `S` of (components of `G - S`) − 1.
pub fn count_cd(g: &Graph, d: usize) -> usize {
    let vs: Vec<Vertex> = g.vertices().collect();
    if d > vs.len() {
        return 0;
    }
    (0..vs.len()).combinations(d)
        .map(|c| {
            let s: VertexSet = c.into_iter().map(|i| vs[i]).collect();
            g.components_without(&s).len().saturating_sub(1)
        })
        .sum()
}
