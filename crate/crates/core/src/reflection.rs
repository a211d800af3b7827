//! Partial reflections and sequences of them.

use std::collections::BTreeMap;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::connectivity::{
    count_cd, crosses_unchecked, has_crossing_separators, is_d_connected, scan_separators,
    Fragment, Separator,
};
use crate::error::{input, Error, Result};
use crate::framework::{
    is_congruent, reflect_point_scaled, sample_generic, Framework, EQUIVALENCE_TOL,
};
use crate::graph::{Graph, Vertex, VertexSet};
use crate::rigidity::is_rigid;

/// `(R_{X_1}, ..., R_{X_k})`, applied left to right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReflectionSequence {
    d: usize,
    steps: Vec<Fragment>,
    reduced: bool,
}

impl ReflectionSequence {
    pub fn trivial(d: usize) -> ReflectionSequence {
        ReflectionSequence { d, steps: Vec::new(), reduced: true }
    }

    pub fn new(g: &Graph, d: usize, steps: Vec<Fragment>) -> Result<ReflectionSequence> {
        for (i, x) in steps.iter().enumerate() {
            x.check_graph(g)?;
            if x.size() != d {
                return input(format!(
                    "step {i} ({}) has a boundary of size {}, expected {d}",
                    x.members(),
                    x.size()
                ));
            }
        }
        let reduced = is_reduced(g, &steps);
        Ok(ReflectionSequence { d, steps, reduced })
    }

    pub fn from_sets(g: &Graph, d: usize, sets: &[VertexSet]) -> Result<ReflectionSequence> {
        let steps = sets
            .iter()
            .map(|x| Fragment::new_d(g, x.clone(), d))
            .collect::<Result<Vec<_>>>()?;
        ReflectionSequence::new(g, d, steps)
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn steps(&self) -> &[Fragment] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Pairwise noncrossing steps with pairwise distinct boundaries.
    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn member_sets(&self) -> Vec<VertexSet> {
        self.steps.iter().map(|x| x.members().clone()).collect()
    }

    /// `(boundary, members)` per step, in order.
    pub fn key(&self) -> Vec<(VertexSet, VertexSet)> {
        self.steps
            .iter()
            .map(|x| (x.boundary().clone(), x.members().clone()))
            .collect()
    }
}

impl Serialize for ReflectionSequence {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ReflectionSequence", 3)?;
        st.serialize_field("d", &self.d)?;
        st.serialize_field("steps", &self.member_sets())?;
        st.serialize_field("reduced", &self.reduced)?;
        st.end()
    }
}

fn is_reduced(g: &Graph, steps: &[Fragment]) -> bool {
    for (i, x) in steps.iter().enumerate() {
        for y in &steps[i + 1..] {
            if x.boundary() == y.boundary() {
                return false;
            }
            let (s, t) = (
                Separator::new(g, x.boundary().clone()),
                Separator::new(g, y.boundary().clone()),
            );
            match (s, t) {
                (Ok(s), Ok(t)) => {
                    if crosses_unchecked(g, &s, &t).unwrap_or(true) {
                        return false;
                    }
                }
                _ => return false,
            }
        }
    }
    true
}

/// `R_X(p)`: reflects every vertex of the complement of `X` in the hyperplane
/// through `p(N(X))`.
pub fn partial_reflection(fw: &Framework, x: &Fragment) -> Result<Framework> {
    reflect_with_scale(fw, x, fw.scale())
}

fn reflect_with_scale(fw: &Framework, x: &Fragment, scale: f64) -> Result<Framework> {
    x.check_graph(fw.graph())?;
    let d = fw.dimension();
    if x.size() != d {
        return input(format!(
            "a partial reflection in R^{d} needs a boundary of size {d}, got {}",
            x.size()
        ));
    }
    let anchors: Vec<&[f64]> = x
        .boundary()
        .iter()
        .map(|v| fw.point(v))
        .collect::<Result<_>>()?;
    let mut coords = fw.coords().clone();
    for v in x.complement().iter() {
        coords.insert(v, reflect_point_scaled(&anchors, fw.point(v)?, scale)?);
    }
    Ok(fw.with_coords(coords))
}

/// `R_Z` for an arbitrary vertex set, with `R_∅ = R_V = id`.
pub fn partial_reflection_of_set(fw: &Framework, z: &VertexSet) -> Result<Framework> {
    if z.is_empty() || z == &fw.graph().vertex_set() {
        return Ok(fw.clone());
    }
    let x = Fragment::new(fw.graph(), z.clone())?;
    partial_reflection(fw, &x)
}

/// `F(p)`. Admissibility failures name the offending step.
pub fn apply_sequence(fw: &Framework, f: &ReflectionSequence) -> Result<Framework> {
    if f.dimension() != fw.dimension() {
        return input(format!(
            "sequence is {}-dimensional, framework {}-dimensional",
            f.dimension(),
            fw.dimension()
        ));
    }
    // Reflections are isometries, so the scale is fixed along the sequence.
    let scale = fw.scale();
    let mut cur = fw.clone();
    for (i, x) in f.steps().iter().enumerate() {
        cur = reflect_with_scale(&cur, x, scale).map_err(|e| match e {
            Error::Singularity { message, .. } => Error::Singularity {
                step: Some(i),
                message: format!("step {i} ({}): {message}", x.members()),
            },
            other => other,
        })?;
    }
    Ok(cur)
}

/// The side of a separator avoiding the smallest vertex outside it.
pub fn normalize_side(g: &Graph, boundary: &VertexSet, side: &VertexSet) -> VertexSet {
    let rest = g.vertex_set().difference(boundary);
    match rest.first() {
        Some(m) if side.contains(m) => rest.difference(side),
        _ => side.clone(),
    }
}

pub(crate) fn require_noncrossing(g: &Graph, d: usize) -> Result<()> {
    if !is_d_connected(g, d) {
        return input(format!("graph is not {d}-connected"));
    }
    if has_crossing_separators(g, d)? {
        return Err(Error::Unsupported(format!(
            "graph has crossing {d}-separators"
        )));
    }
    Ok(())
}

/// Canonical reduced form: steps with equal boundaries are merged by
/// symmetric difference, identities dropped, each side normalized, and the
/// steps sorted by boundary.
pub fn reduce_sequence(g: &Graph, f: &ReflectionSequence) -> Result<ReflectionSequence> {
    let d = f.dimension();
    require_noncrossing(g, d)?;
    let mut acc: BTreeMap<VertexSet, VertexSet> = BTreeMap::new();
    for x in f.steps() {
        x.check_graph(g)?;
        let z = acc.entry(x.boundary().clone()).or_default();
        *z = z.symmetric_difference(x.members());
    }
    let mut steps = Vec::new();
    for (s, z) in acc {
        let rest = g.vertex_set().difference(&s);
        if z.is_empty() || rest.is_subset(&z) {
            continue;
        }
        let side = normalize_side(g, &s, &z);
        let frag = Fragment::new(g, side)?;
        if frag.boundary() != &s {
            return Err(Error::Consistency(format!(
                "merged side {} has boundary {}, expected {s}",
                frag.members(),
                frag.boundary()
            )));
        }
        steps.push(frag);
    }
    ReflectionSequence::new(g, d, steps)
}

/// Decides `F1 ~ F2` twice: by comparing canonical reduced forms and by
/// testing congruence of the images of one sampled generic framework.
pub fn sequences_equivalent(
    g: &Graph,
    f1: &ReflectionSequence,
    f2: &ReflectionSequence,
    seed: u64,
) -> Result<bool> {
    if f1.dimension() != f2.dimension() {
        return input("sequences of different dimensions");
    }
    let combinatorial = reduce_sequence(g, f1)?.key() == reduce_sequence(g, f2)?.key();
    let fw = sample_generic(g, f1.dimension(), seed);
    let numeric = is_congruent(&apply_sequence(&fw, f1)?, &apply_sequence(&fw, f2)?, EQUIVALENCE_TOL)?;
    if combinatorial != numeric.congruent {
        return Err(Error::Consistency(format!(
            "canonical forms say {combinatorial}, congruence test says {} (discrepancy {:e})",
            numeric.congruent, numeric.max_pairwise_distance_discrepancy
        )));
    }
    Ok(combinatorial)
}

#[derive(Debug, Clone, Serialize)]
pub struct Realization {
    /// Per separator, the bitmask of non-anchor components reflected.
    pub choice: Vec<u64>,
    pub sequence: ReflectionSequence,
    #[serde(serialize_with = "serialize_framework")]
    pub framework: Framework,
}

fn serialize_framework<S: Serializer>(fw: &Framework, s: S) -> std::result::Result<S::Ok, S::Error> {
    fw.to_data().serialize(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct Enumeration {
    pub cd: usize,
    pub rigid: bool,
    pub realizations: Vec<Realization>,
    pub warning: Option<String>,
}

/// Largest `c_d` for which all `2^{c_d}` realizations are materialized.
pub const MAX_ENUMERATED_CD: usize = 16;

/// One realization per reduced sequence in canonical form: for each
/// d-separator, every union of components avoiding the anchor component
/// (the one holding the smallest vertex off the separator).
pub fn enumerate_realizations(fw: &Framework) -> Result<Enumeration> {
    let g = fw.graph();
    let d = fw.dimension();
    require_noncrossing(g, d)?;
    let cd = count_cd(g, d);
    if cd > MAX_ENUMERATED_CD {
        return input(format!("c_d = {cd} exceeds the enumeration limit {MAX_ENUMERATED_CD}"));
    }
    let rigid = is_rigid(g, d);
    let seps = scan_separators(g, d);
    // Non-anchor components of each separator.
    let others: Vec<Vec<VertexSet>> = seps
        .iter()
        .map(|s| {
            let anchor = g.vertex_set().difference(s.members()).first().expect("nonempty");
            g.components_without(s.members())
                .into_iter()
                .filter(|c| !c.contains(anchor))
                .collect()
        })
        .collect();
    let radix: Vec<u64> = others.iter().map(|o| 1u64 << o.len()).collect();
    let mut choice = vec![0u64; seps.len()];
    let mut out = Vec::new();
    loop {
        let mut steps = Vec::new();
        for (mask, comps) in choice.iter().zip(&others) {
            if *mask == 0 {
                continue;
            }
            let side: VertexSet = comps
                .iter()
                .enumerate()
                .filter(|(j, _)| mask >> j & 1 == 1)
                .flat_map(|(_, c)| c.iter())
                .collect();
            steps.push(Fragment::new(g, side)?);
        }
        let sequence = ReflectionSequence::new(g, d, steps)?;
        let framework = apply_sequence(fw, &sequence)?;
        out.push(Realization { choice: choice.clone(), sequence, framework });
        // Mixed-radix increment, last separator fastest.
        let mut i = choice.len();
        loop {
            if i == 0 {
                return Ok(Enumeration {
                    cd,
                    rigid,
                    warning: (!rigid).then(|| {
                        format!("graph is not rigid in R^{d}; equivalent realizations form a continuum and this list is only a lower bound")
                    }),
                    realizations: out,
                });
            }
            i -= 1;
            choice[i] += 1;
            if choice[i] < radix[i] {
                break;
            }
            choice[i] = 0;
        }
    }
}

/// Whether some step puts `u` and `v` on opposite sides.
pub fn separates_in_sequence(f: &ReflectionSequence, u: Vertex, v: Vertex) -> bool {
    f.steps().iter().any(|x| x.separates(u, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framework::{dist, is_equivalent, INVOLUTION_TOL};
    use crate::fixtures;
    use crate::graph::VertexSet;

    fn vs<const N: usize>(a: [Vertex; N]) -> VertexSet {
        VertexSet::from(a)
    }

    #[test]
    fn path_point_reflection() {
        let p = Graph::path(&[1, 2, 3]);
        let fw = Framework::new(&p, 1, [(1, vec![0.0]), (2, vec![1.0]), (3, vec![3.0])].into())
            .unwrap();
        let x = Fragment::new(&p, vs([1])).unwrap();
        let out = partial_reflection(&fw, &x).unwrap();
        assert_eq!(out.point(3).unwrap(), &[-1.0]);
        assert_eq!(out.point(1).unwrap(), &[0.0]);
        assert!(is_equivalent(&fw, &out, EQUIVALENCE_TOL).unwrap());
        assert_eq!(partial_reflection_of_set(&fw, &p.vertex_set()).unwrap(), fw);
        assert_eq!(partial_reflection_of_set(&fw, &VertexSet::new()).unwrap(), fw);
    }

    #[test]
    fn involution_and_equivalence() {
        let g = fixtures::two_k5_on_triangle();
        let fw = sample_generic(&g, 3, 4);
        let x = Fragment::new(&g, vs([4, 5])).unwrap();
        let once = partial_reflection(&fw, &x).unwrap();
        let twice = partial_reflection(&once, &x).unwrap();
        for v in g.vertices() {
            assert!(dist(twice.point(v).unwrap(), fw.point(v).unwrap()) < INVOLUTION_TOL);
        }
        assert!(is_equivalent(&fw, &once, EQUIVALENCE_TOL).unwrap());
        assert!(!is_congruent(&fw, &once, EQUIVALENCE_TOL).unwrap().congruent);
        assert!(once.in_general_position());
    }

    #[test]
    fn inadmissible_step_is_named() {
        let g = fixtures::two_k4_on_edge();
        let mut coords = sample_generic(&g, 2, 1).coords().clone();
        coords.insert(4, coords[&3].clone());
        let bad = Framework::new(&g, 2, coords).unwrap();
        let f = ReflectionSequence::from_sets(&g, 2, &[vs([1, 2])]).unwrap();
        assert!(matches!(apply_sequence(&bad, &f), Err(Error::Singularity { step: Some(0), .. })));
    }

    #[test]
    fn empty_and_repeated_sequences() {
        let g = fixtures::two_k4_on_edge();
        let fw = sample_generic(&g, 2, 8);
        assert_eq!(apply_sequence(&fw, &ReflectionSequence::trivial(2)).unwrap(), fw);
        let f = ReflectionSequence::from_sets(&g, 2, &[vs([1, 2]), vs([1, 2])]).unwrap();
        assert!(!f.is_reduced());
        let out = apply_sequence(&fw, &f).unwrap();
        for v in g.vertices() {
            assert!(dist(out.point(v).unwrap(), fw.point(v).unwrap()) < INVOLUTION_TOL);
        }
        assert!(reduce_sequence(&g, &f).unwrap().is_empty());
        let g2 = ReflectionSequence::from_sets(&g, 2, &[vs([1, 2]), vs([5, 6])]).unwrap();
        assert!(reduce_sequence(&g, &g2).unwrap().is_empty());
    }

    #[test]
    fn non_generic_path_fixture() {
        let fx = fixtures::non_generic_path();
        let fw = Framework::new(&fx.graph, 1, fx.coords.clone()).unwrap();
        let f = ReflectionSequence::from_sets(&fx.graph, 1, &fx.steps).unwrap();
        assert!(f.is_reduced());
        assert!(separates_in_sequence(&f, fx.u, fx.v));
        let out = apply_sequence(&fw, &f).unwrap();
        assert_eq!(out.point(fx.v).unwrap(), &[-5.0]);
        let before = fw.distance(fx.u, fx.v).unwrap();
        let after = out.distance(fx.u, fx.v).unwrap();
        assert!((before - after).abs() < 1e-12);
        // At generic coordinates the same sequence moves the pair.
        let generic = sample_generic(&fx.graph, 1, 2);
        let moved = apply_sequence(&generic, &f).unwrap();
        let gap = (generic.distance(fx.u, fx.v).unwrap() - moved.distance(fx.u, fx.v).unwrap()).abs();
        assert!(gap > 1e-6 * generic.scale());
    }

    #[test]
    fn reduction_of_path_sequence() {
        let p = Graph::path(&[1, 2, 3, 4]);
        let f = ReflectionSequence::from_sets(&p, 1, &[vs([1]), vs([4]), vs([1, 2])]).unwrap();
        let r = reduce_sequence(&p, &f).unwrap();
        assert!(r.is_reduced());
        // {4} and {1,2} are the two sides of {3}, so those steps cancel.
        let boundaries: Vec<VertexSet> = r.steps().iter().map(|x| x.boundary().clone()).collect();
        assert_eq!(boundaries, vec![vs([2])]);
        assert_eq!(r.member_sets(), vec![vs([3, 4])]);
        let p5 = Graph::path(&[1, 2, 3, 4, 5]);
        let f2 = ReflectionSequence::from_sets(&p5, 1, &[vs([1]), vs([5]), vs([1, 2])]).unwrap();
        let r2 = reduce_sequence(&p5, &f2).unwrap();
        assert_eq!(r2.member_sets(), vec![vs([3, 4, 5]), vs([4, 5]), vs([5])]);
        for seed in 0..5 {
            let fw = sample_generic(&p, 1, seed);
            let a = apply_sequence(&fw, &f).unwrap();
            let b = apply_sequence(&fw, &r).unwrap();
            assert!(is_congruent(&a, &b, EQUIVALENCE_TOL).unwrap().congruent);
        }
        let c4 = Graph::cycle(&[1, 2, 3, 4]);
        let f = ReflectionSequence::from_sets(&c4, 2, &[vs([2])]).unwrap();
        assert!(matches!(reduce_sequence(&c4, &f), Err(Error::Unsupported(_))));
    }

    #[test]
    fn equivalence_examples() {
        let g = fixtures::clique_chain(3, 4, 2);
        let x = vs([1, 2]);
        let y = vs([7, 8]);
        let xy = ReflectionSequence::from_sets(&g, 2, &[x.clone(), y.clone()]).unwrap();
        let yx = ReflectionSequence::from_sets(&g, 2, &[y, x.clone()]).unwrap();
        assert!(sequences_equivalent(&g, &xy, &yx, 1).unwrap());
        let rx = ReflectionSequence::from_sets(&g, 2, &[x]).unwrap();
        let rxc = ReflectionSequence::from_sets(&g, 2, &[vs([5, 6, 7, 8])]).unwrap();
        assert!(sequences_equivalent(&g, &rx, &rxc, 2).unwrap());
        assert!(!sequences_equivalent(&g, &rx, &ReflectionSequence::trivial(2), 3).unwrap());
    }

    #[test]
    fn enumeration_examples() {
        let k5 = Graph::complete(1..=5);
        let e = enumerate_realizations(&sample_generic(&k5, 3, 1)).unwrap();
        assert_eq!(e.realizations.len(), 1);
        assert!(e.realizations[0].sequence.is_empty());

        let p = Graph::path(&[1, 2, 3]);
        let e = enumerate_realizations(&sample_generic(&p, 1, 1)).unwrap();
        assert_eq!(e.realizations.len(), 2);
        assert!(e.warning.is_none());

        let g = fixtures::two_k4_on_edge();
        let fw = sample_generic(&g, 2, 1);
        let e = enumerate_realizations(&fw).unwrap();
        assert_eq!(e.cd, 1);
        assert_eq!(e.realizations.len(), 2);
        let (a, b) = (&e.realizations[0].framework, &e.realizations[1].framework);
        assert!(is_equivalent(a, b, EQUIVALENCE_TOL).unwrap());
        assert!(!is_congruent(a, b, EQUIVALENCE_TOL).unwrap().congruent);

        let chain = fixtures::clique_chain(3, 4, 2);
        let e = enumerate_realizations(&sample_generic(&chain, 2, 5)).unwrap();
        assert_eq!(e.realizations.len(), 4);
        for (i, a) in e.realizations.iter().enumerate() {
            for b in &e.realizations[i + 1..] {
                assert!(!is_congruent(&a.framework, &b.framework, EQUIVALENCE_TOL).unwrap().congruent);
            }
        }
    }
}
