//! How reflection sequences of two glued graphs fit together: compatible
//! fragments and sequences, strongly separating pairs and the merged sequence.

use itertools::Itertools;
use serde::Serialize;

use crate::connectivity::Fragment;
use crate::error::{input, Error, Result};
use crate::framework::{is_congruent, sample_generic, EQUIVALENCE_TOL, DISTANCE_GAP_TOL};
use crate::graph::{glue, Graph, Vertex, VertexSet};
use crate::reflection::{apply_sequence, ReflectionSequence};

/// `G = G1 ∪ G2` with the shared vertices.
#[derive(Debug, Clone)]
pub struct GluingContext {
    g1: Graph,
    g2: Graph,
    union: Graph,
    shared: VertexSet,
}

impl GluingContext {
    pub fn new(g1: &Graph, g2: &Graph) -> GluingContext {
        GluingContext {
            union: glue(g1, g2),
            shared: g1.vertex_set().intersection(&g2.vertex_set()),
            g1: g1.clone(),
            g2: g2.clone(),
        }
    }

    pub fn g1(&self) -> &Graph {
        &self.g1
    }

    pub fn g2(&self) -> &Graph {
        &self.g2
    }

    pub fn union(&self) -> &Graph {
        &self.union
    }

    pub fn shared(&self) -> &VertexSet {
        &self.shared
    }

    /// Shared pairs in lexicographic order.
    fn shared_pairs(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.shared.as_set().iter().copied().tuple_combinations()
    }
}

/// The fragment-level criterion: equal boundaries and identical separation
/// verdicts on every shared pair. Returns the witness `Z` of the union, with
/// `Z ∩ V1 = X` and `Z ∩ V2 ∈ {Y, Y̅}`.
pub fn fragments_compatible(ctx: &GluingContext, x: &Fragment, y: &Fragment) -> Result<Option<Fragment>> {
    x.check_graph(&ctx.g1)?;
    y.check_graph(&ctx.g2)?;
    if x.boundary() != y.boundary() {
        return Ok(None);
    }
    if ctx.shared_pairs().any(|(u, v)| x.separates(u, v) != y.separates(u, v)) {
        return Ok(None);
    }
    let trace = x.members().intersection(&ctx.shared);
    let side = if y.members().intersection(&ctx.shared) == trace {
        y.members()
    } else if y.complement().intersection(&ctx.shared) == trace {
        y.complement()
    } else {
        return Err(Error::Consistency(format!(
            "{} and {} agree on all shared pairs but not on their traces",
            x.members(),
            y.members()
        )));
    };
    let z = Fragment::new(&ctx.union, x.members().union(side))?;
    if z.boundary() != x.boundary() {
        return Err(Error::Consistency(format!(
            "witness {} has boundary {}, expected {}",
            z.members(),
            z.boundary(),
            x.boundary()
        )));
    }
    Ok(Some(z))
}

fn check_pair(ctx: &GluingContext, f1: &ReflectionSequence, f2: &ReflectionSequence) -> Result<()> {
    if f1.dimension() != f2.dimension() {
        return input("sequences of different dimensions");
    }
    for x in f1.steps() {
        x.check_graph(&ctx.g1)?;
    }
    for y in f2.steps() {
        y.check_graph(&ctx.g2)?;
    }
    if !f1.is_reduced() || !f2.is_reduced() {
        return input("sequences must be reduced");
    }
    Ok(())
}

/// Some step separates `u` and `v`, and no two separating steps (one from each
/// sequence) share a boundary.
pub fn strongly_separates(
    ctx: &GluingContext,
    f1: &ReflectionSequence,
    f2: &ReflectionSequence,
    u: Vertex,
    v: Vertex,
) -> Result<bool> {
    check_pair(ctx, f1, f2)?;
    if !ctx.shared.contains(u) || !ctx.shared.contains(v) || u == v {
        return input(format!("({u},{v}) is not a pair of shared vertices"));
    }
    Ok(strongly_separates_unchecked(f1, f2, u, v))
}

fn strongly_separates_unchecked(f1: &ReflectionSequence, f2: &ReflectionSequence, u: Vertex, v: Vertex) -> bool {
    let xs: Vec<&Fragment> = f1.steps().iter().filter(|x| x.separates(u, v)).collect();
    let ys: Vec<&Fragment> = f2.steps().iter().filter(|y| y.separates(u, v)).collect();
    if xs.is_empty() && ys.is_empty() {
        return false;
    }
    !xs.iter().any(|x| ys.iter().any(|y| x.boundary() == y.boundary()))
}

/// Pairing of steps certifying compatibility.
#[derive(Debug, Clone, Serialize)]
pub struct CompatibilityWitness {
    /// `(i, j, Z)`: step `i` of the first sequence matched with step `j` of
    /// the second through the union fragment `Z`.
    pub paired: Vec<(usize, usize, VertexSet)>,
    /// Unpaired steps of the first sequence, oriented to miss `V2`.
    pub unpaired_first: Vec<(usize, VertexSet)>,
    /// Unpaired steps of the second sequence, oriented to miss `V1`.
    pub unpaired_second: Vec<(usize, VertexSet)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompatibilityVerdict {
    pub compatible: bool,
    /// Lexicographically first strongly separating shared pair.
    pub strongly_separating_pair: Option<(Vertex, Vertex)>,
    pub witness: Option<CompatibilityWitness>,
}

fn side_missing(x: &Fragment, other: &VertexSet) -> Option<VertexSet> {
    if x.members().is_disjoint(other) {
        Some(x.members().clone())
    } else if x.complement().is_disjoint(other) {
        Some(x.complement().clone())
    } else {
        None
    }
}

/// Direct search for the pairing. Reduced sequences have pairwise distinct
/// boundaries, so each step has at most one partner candidate and pairing
/// every compatible candidate loses nothing.
fn find_witness(ctx: &GluingContext, f1: &ReflectionSequence, f2: &ReflectionSequence) -> Result<Option<CompatibilityWitness>> {
    let mut paired = Vec::new();
    let mut used = vec![false; f2.len()];
    let mut unpaired_first = Vec::new();
    for (i, x) in f1.steps().iter().enumerate() {
        let partner = f2
            .steps()
            .iter()
            .position(|y| y.boundary() == x.boundary());
        if let Some(j) = partner {
            if let Some(z) = fragments_compatible(ctx, x, &f2.steps()[j])? {
                used[j] = true;
                paired.push((i, j, z.members().clone()));
                continue;
            }
        }
        match side_missing(x, &ctx.g2.vertex_set()) {
            Some(side) => unpaired_first.push((i, side)),
            None => return Ok(None),
        }
    }
    let mut unpaired_second = Vec::new();
    for (j, y) in f2.steps().iter().enumerate() {
        if used[j] {
            continue;
        }
        match side_missing(y, &ctx.g1.vertex_set()) {
            Some(side) => unpaired_second.push((j, side)),
            None => return Ok(None),
        }
    }
    Ok(Some(CompatibilityWitness { paired, unpaired_first, unpaired_second }))
}

/// Decides compatibility by scanning shared pairs for a strongly separating
/// one and, independently, by searching for a witness; the two must agree.
pub fn sequences_compatible(
    ctx: &GluingContext,
    f1: &ReflectionSequence,
    f2: &ReflectionSequence,
) -> Result<CompatibilityVerdict> {
    check_pair(ctx, f1, f2)?;
    let pair = ctx
        .shared_pairs()
        .find(|&(u, v)| strongly_separates_unchecked(f1, f2, u, v));
    let witness = find_witness(ctx, f1, f2)?;
    if pair.is_some() == witness.is_some() {
        return Err(Error::Consistency(format!(
            "strongly separating pair {pair:?} and witness {} disagree",
            if witness.is_some() { "found" } else { "missing" }
        )));
    }
    Ok(CompatibilityVerdict {
        compatible: witness.is_some(),
        strongly_separating_pair: pair,
        witness,
    })
}

/// `(R_{Z_1}, .., R_{Z_r}, unpaired first steps, unpaired second steps)` on the
/// union, checked numerically: its image restricted to each side is congruent
/// to that side's own image.
pub fn merge_sequences(
    ctx: &GluingContext,
    f1: &ReflectionSequence,
    f2: &ReflectionSequence,
    seed: u64,
) -> Result<ReflectionSequence> {
    let verdict = sequences_compatible(ctx, f1, f2)?;
    let Some(w) = verdict.witness else {
        return Err(Error::Logic(format!(
            "sequences are not compatible; {:?} strongly separates them",
            verdict.strongly_separating_pair
        )));
    };
    let d = f1.dimension();
    let sets: Vec<VertexSet> = w
        .paired
        .iter()
        .map(|(_, _, z)| z.clone())
        .chain(w.unpaired_first.iter().map(|(_, s)| s.clone()))
        .chain(w.unpaired_second.iter().map(|(_, s)| s.clone()))
        .collect();
    let merged = ReflectionSequence::from_sets(&ctx.union, d, &sets)?;
    let fw = sample_generic(&ctx.union, d, seed);
    let image = apply_sequence(&fw, &merged)?;
    for (g, f) in [(&ctx.g1, f1), (&ctx.g2, f2)] {
        let side = apply_sequence(&fw.with_graph(g)?, f)?;
        let verdict = is_congruent(&image.with_graph(g)?, &side, EQUIVALENCE_TOL)?;
        if !verdict.congruent {
            return Err(Error::Consistency(format!(
                "merged image is not congruent on a side (discrepancy {:e})",
                verdict.max_pairwise_distance_discrepancy
            )));
        }
    }
    Ok(merged)
}

/// At a sampled generic framework of the union, the two sides move the
/// strongly separating pair to different distances.
pub fn strongly_separated_distance_gap(
    ctx: &GluingContext,
    f1: &ReflectionSequence,
    f2: &ReflectionSequence,
    u: Vertex,
    v: Vertex,
    seed: u64,
) -> Result<bool> {
    if !strongly_separates(ctx, f1, f2, u, v)? {
        return input(format!("({u},{v}) does not strongly separate the sequences"));
    }
    let fw = sample_generic(&ctx.union, f1.dimension(), seed);
    let q1 = apply_sequence(&fw.with_graph(&ctx.g1)?, f1)?;
    let q2 = apply_sequence(&fw.with_graph(&ctx.g2)?, f2)?;
    let gap = (q1.distance(u, v)? - q2.distance(u, v)?).abs();
    Ok(gap > DISTANCE_GAP_TOL * fw.scale())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn vs<const N: usize>(a: [Vertex; N]) -> VertexSet {
        VertexSet::from(a)
    }

    fn fig() -> (GluingContext, ReflectionSequence, ReflectionSequence, fixtures::StrongSeparationFixture) {
        let fx = fixtures::strong_separation();
        let ctx = GluingContext::new(&fx.g1, &fx.g2);
        let f1 = ReflectionSequence::from_sets(&fx.g1, 1, &fx.f1).unwrap();
        let f2 = ReflectionSequence::from_sets(&fx.g2, 1, &fx.f2).unwrap();
        (ctx, f1, f2, fx)
    }

    #[test]
    fn fragment_compatibility_examples() {
        let g = fixtures::two_k4_on_edge();
        let ctx = GluingContext::new(&g, &g);
        let x = Fragment::new(&g, vs([1, 2])).unwrap();
        assert_eq!(fragments_compatible(&ctx, &x, &x).unwrap().unwrap().members(), &vs([1, 2]));

        let (ctx, _, _, fx) = fig();
        let x1 = Fragment::new(&fx.g1, vs([fx.y, fx.v])).unwrap();
        let y2 = Fragment::new(&fx.g2, vs([fx.v])).unwrap();
        let y1 = Fragment::new(&fx.g2, vs([fx.x, fx.v])).unwrap();
        assert_eq!(x1.boundary(), y2.boundary());
        // {u,y} is split by X1 but not by Y2.
        assert!(fragments_compatible(&ctx, &x1, &y2).unwrap().is_none());
        assert!(fragments_compatible(&ctx, &x1, &y1).unwrap().is_none());
        // Fragments of the wrong host are rejected.
        assert!(fragments_compatible(&ctx, &y2, &x1).is_err());
    }

    #[test]
    fn strong_separation_examples() {
        let (ctx, f1, f2, fx) = fig();
        assert!(strongly_separates(&ctx, &f1, &f2, fx.u, fx.y).unwrap());
        assert!(!strongly_separates(&ctx, &f1, &f2, fx.u, fx.v).unwrap());
        let t = ReflectionSequence::trivial(1);
        assert!(!strongly_separates(&ctx, &t, &t, fx.u, fx.v).unwrap());
        let verdict = sequences_compatible(&ctx, &f1, &f2).unwrap();
        assert!(!verdict.compatible);
        // {u,x} comes first lexicographically: only Y1 splits it.
        assert_eq!(verdict.strongly_separating_pair, Some((fx.u, fx.x)));
        assert!(strongly_separated_distance_gap(&ctx, &f1, &f2, fx.u, fx.y, 3).unwrap());
        assert!(strongly_separated_distance_gap(&ctx, &f1, &f2, fx.u, fx.v, 3).is_err());
    }

    #[test]
    fn identical_sequences_are_compatible() {
        let g = fixtures::clique_chain(3, 4, 2);
        let ctx = GluingContext::new(&g, &g);
        let f = ReflectionSequence::from_sets(&g, 2, &[vs([1, 2]), vs([7, 8])]).unwrap();
        let verdict = sequences_compatible(&ctx, &f, &f).unwrap();
        assert!(verdict.compatible);
        let w = verdict.witness.unwrap();
        assert_eq!(w.paired.iter().map(|p| (p.0, p.1)).collect::<Vec<_>>(), vec![(0, 0), (1, 1)]);
        let merged = merge_sequences(&ctx, &f, &f, 1).unwrap();
        assert_eq!(merged.member_sets(), f.member_sets());
        let t = ReflectionSequence::trivial(2);
        assert!(merge_sequences(&ctx, &t, &t, 1).unwrap().is_empty());
    }

    #[test]
    fn private_steps_merge_unpaired() {
        // Two K4 chains sharing only the middle K4 {3,4,5,6}.
        let g1 = fixtures::clique_chain(2, 4, 2);
        let g2 = glue(&Graph::complete([3, 4, 5, 6]), &Graph::complete([5, 6, 7, 8]));
        let ctx = GluingContext::new(&g1, &g2);
        let f1 = ReflectionSequence::from_sets(&g1, 2, &[vs([1, 2])]).unwrap();
        let t = ReflectionSequence::trivial(2);
        let verdict = sequences_compatible(&ctx, &f1, &t).unwrap();
        assert!(verdict.compatible);
        assert_eq!(verdict.witness.as_ref().unwrap().paired.len(), 0);
        let merged = merge_sequences(&ctx, &f1, &t, 2).unwrap();
        assert_eq!(merged.member_sets(), vec![vs([1, 2])]);

        let f2 = ReflectionSequence::from_sets(&g2, 2, &[vs([7, 8])]).unwrap();
        let merged = merge_sequences(&ctx, &f1, &f2, 2).unwrap();
        assert_eq!(merged.member_sets(), vec![vs([1, 2]), vs([7, 8])]);
    }

    #[test]
    fn paired_steps_across_a_separator() {
        // Both sides see the separator {3,4} and agree on its sides.
        let g1 = fixtures::two_k4_on_edge();
        let g2 = glue(&Graph::complete([1, 3, 4]), &Graph::complete([3, 4, 5, 9]));
        let ctx = GluingContext::new(&g1, &g2);
        let f1 = ReflectionSequence::from_sets(&g1, 2, &[vs([5, 6])]).unwrap();
        let f2 = ReflectionSequence::from_sets(&g2, 2, &[vs([1])]).unwrap();
        let verdict = sequences_compatible(&ctx, &f1, &f2).unwrap();
        assert!(verdict.compatible, "{verdict:?}");
        let merged = merge_sequences(&ctx, &f1, &f2, 4).unwrap();
        assert_eq!(merged.len(), 1);
        assert_eq!(merged.steps()[0].boundary(), &vs([3, 4]));
    }
}
