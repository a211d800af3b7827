//! Randomized property campaigns. Each trial draws its own sub-seed, so a
//! report is reproducible from `(suite, trials, seed)` and trials run in
//! parallel without changing the result.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::certify::{
    certify_d_joined_seeded, certify_gluing_construction_seeded, check_closure_characterization,
    closure_star, recognize_2joined_conditional_seeded, Certificate,
};
use crate::cliques::maximal_cliques;
use crate::connectivity::{
    all_d_fragments, crosses, d_blocks, fragments_of_separator, has_crossing_separators,
    is_d_connected, local_connectivity, minimal_d_fragment, preceq, scan_separators, Fragment,
    FragmentSelection, Separator, SeparatorOrder,
};
use crate::error::Error;
use crate::fixtures;
use crate::framework::{is_congruent, is_equivalent, sample_generic, DISTANCE_GAP_TOL, EQUIVALENCE_TOL};
use crate::gluing::{
    fragments_compatible, merge_sequences, sequences_compatible, strongly_separated_distance_gap,
    GluingContext,
};
use crate::graph::{glue, induced_subgraph, is_clique, Graph, Vertex, VertexSet};
use crate::oracle::{match_orbits, solve_equivalent};
use crate::random;
use crate::reflection::{apply_sequence, enumerate_realizations, reduce_sequence, ReflectionSequence};
use crate::rigidity::{is_globally_rigid_seeded, is_rigid_seeded};
use crate::seed;
use crate::connectivity::count_cd;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// Separator and fragment lemmas: crossing symmetry, the separator order,
    /// Menger, fragment transfer, blocks of clique-bounded fragments.
    ALemmas,
    /// Compatibility of sequences on glued graphs.
    BLemmas,
    /// Rigid d-connected graphs have no crossing d-separators.
    RigidNoncrossing,
    /// Enumerated realizations against the numerical oracle on fixtures.
    OrbitCounts,
    /// Certificates on random d-connected chordal graphs.
    CertifyRoundtrip,
    /// A separating step of a reduced sequence changes the separated distance.
    DistanceChange,
}

pub const ALL_SUITES: [Suite; 6] = [
    Suite::ALemmas,
    Suite::BLemmas,
    Suite::RigidNoncrossing,
    Suite::OrbitCounts,
    Suite::CertifyRoundtrip,
    Suite::DistanceChange,
];

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::ALemmas => "A-lemmas",
            Suite::BLemmas => "B-lemmas",
            Suite::RigidNoncrossing => "rigid-noncrossing",
            Suite::OrbitCounts => "orbit-counts",
            Suite::CertifyRoundtrip => "certify-roundtrip",
            Suite::DistanceChange => "distance-change",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Suite {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite, Error> {
        ALL_SUITES
            .into_iter()
            .find(|x| x.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::Input(format!(
                    "unknown suite {s:?}; expected one of {}",
                    ALL_SUITES.iter().map(|x| x.name()).join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub trial: usize,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub trials: usize,
    pub seed: u64,
    /// Trials whose instance met the preconditions of at least one check.
    pub applicable: usize,
    pub checks: usize,
    pub violations: Vec<Violation>,
    /// How often each branch of the suite was exercised.
    pub tally: BTreeMap<&'static str, usize>,
    /// Coverage remarks that are not violations (best-effort routes that gave up, ...).
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Default)]
struct Trial {
    applicable: bool,
    checks: usize,
    violations: Vec<String>,
    tags: Vec<&'static str>,
    notes: Vec<String>,
}

impl Trial {
    fn tag(&mut self, tag: &'static str) {
        self.tags.push(tag);
    }

    fn check(&mut self, ok: bool, message: impl FnOnce() -> String) {
        self.applicable = true;
        self.checks += 1;
        if !ok {
            self.violations.push(message());
        }
    }

    fn error(&mut self, context: &str, e: Error) {
        self.applicable = true;
        self.checks += 1;
        self.violations.push(format!("{context}: {e}"));
    }
}

/// Runs `trials` trials of `suite`. For the orbit suite `trials` is the number
/// of generic frameworks sampled per fixture.
pub fn run_suite(suite: Suite, trials: usize, seed: u64) -> SuiteReport {
    let run = |i: usize| -> Trial {
        let s = seed::derive_indexed(seed, suite.name(), i as u64);
        match suite {
            Suite::ALemmas => a_lemmas(i, s),
            Suite::BLemmas => b_lemmas(i, s),
            Suite::RigidNoncrossing => rigid_noncrossing(i, s),
            Suite::OrbitCounts => orbit_counts(s),
            Suite::CertifyRoundtrip => certify_roundtrip(i, s),
            Suite::DistanceChange => distance_change(i, s),
        }
    };
    let results: Vec<Trial> = (0..trials).into_par_iter().map(run).collect();
    let mut report = SuiteReport {
        suite,
        trials,
        seed,
        applicable: 0,
        checks: 0,
        violations: Vec::new(),
        tally: BTreeMap::new(),
        notes: Vec::new(),
    };
    for (i, t) in results.into_iter().enumerate() {
        report.applicable += usize::from(t.applicable);
        report.checks += t.checks;
        report.violations.extend(t.violations.into_iter().map(|message| Violation { trial: i, message }));
        for tag in t.tags {
            *report.tally.entry(tag).or_default() += 1;
        }
        report.notes.extend(t.notes.into_iter().map(|n| format!("trial {i}: {n}")));
    }
    report
}

/// `d` cycles through 1, 2, 3 with the trial index.
fn dim(i: usize) -> usize {
    1 + i % 3
}

fn rigid_noncrossing(i: usize, s: u64) -> Trial {
    let d = dim(i);
    let mut rng = seed::rng(s, "graph");
    let n = rng.gen_range(d + 2..=10);
    let g = random::mixed(n, d, &mut rng);
    let mut t = Trial::default();
    if !is_d_connected(&g, d) || !is_rigid_seeded(&g, d, s) {
        return t;
    }
    if !scan_separators(&g, d).is_empty() {
        t.tag("rigid with d-separators");
    }
    match has_crossing_separators(&g, d) {
        Ok(crossing) => t.check(!crossing, || format!("rigid {d}-connected graph {g:?} has crossing {d}-separators")),
        Err(e) => t.error(&format!("{g:?}"), e),
    }
    t
}

fn a_lemmas(i: usize, s: u64) -> Trial {
    let d = dim(i);
    let mut rng = seed::rng(s, "graph");
    let n = rng.gen_range(d + 2..=9);
    let g = random::mixed(n, d, &mut rng);
    let mut t = Trial::default();
    menger(&g, &mut t);
    if !is_d_connected(&g, d) {
        return t;
    }
    let seps = scan_separators(&g, d);
    for (a, b) in seps.iter().tuple_combinations() {
        match (crosses(&g, a, b), crosses(&g, b, a)) {
            (Ok(x), Ok(y)) => t.check(x == y, || format!("{g:?}: crossing of {} and {} is asymmetric", a.members(), b.members())),
            (Err(e), _) | (_, Err(e)) => t.error(&format!("{g:?}"), e),
        }
    }
    separator_order(&g, &seps, &mut t);
    let frags = all_d_fragments(&g, d).unwrap_or_default();
    transfer_lemma(&g, d, &frags, &mut t);
    clique_bounded_fragments(&g, d, &frags, &mut t);
    if !has_crossing_separators(&g, d).unwrap_or(true) && !is_d_connected(&g, d + 1) {
        match minimal_d_fragment(&g, d) {
            Ok(x) => {
                let block = x.members().union(x.boundary());
                t.check(d_blocks(&g, d + 1).contains(&block), || {
                    format!("{g:?}: minimal fragment {} with its boundary is not a {}-block", x.members(), d + 1)
                });
            }
            Err(e) => t.error(&format!("{g:?}: minimal fragment"), e),
        }
    }
    t
}

/// Local connectivity equals the smallest separating set, by exhaustion.
fn menger(g: &Graph, t: &mut Trial) {
    let vs: Vec<Vertex> = g.vertices().collect();
    for (&u, &v) in vs.iter().tuple_combinations() {
        if g.has_edge(u, v) {
            continue;
        }
        let others: Vec<Vertex> = vs.iter().copied().filter(|&w| w != u && w != v).collect();
        let smallest = others
            .iter()
            .copied()
            .powerset()
            .filter(|c| {
                let cut: VertexSet = c.iter().copied().collect();
                g.components_without(&cut).iter().all(|comp| !(comp.contains(u) && comp.contains(v)))
            })
            .map(|c| c.len())
            .min()
            .unwrap_or(others.len());
        match local_connectivity(g, u, v) {
            Ok(k) => t.check(k == smallest, || format!("{g:?}: kappa({u},{v}) = {k} but the smallest cut has {smallest}")),
            Err(e) => t.error("local connectivity", e),
        }
    }
}

/// The separator order on every nonadjacent pair: a partial order whose
/// comparable pairs are exactly the noncrossing ones.
fn separator_order(g: &Graph, seps: &[Separator], t: &mut Trial) {
    let vs: Vec<Vertex> = g.vertices().collect();
    for (&u, &v) in vs.iter().tuple_combinations() {
        if g.has_edge(u, v) {
            continue;
        }
        let sep: Vec<&Separator> = seps
            .iter()
            .filter(|s| crate::connectivity::is_separating(g, s, u, v).unwrap_or(false))
            .collect();
        let n = sep.len();
        let mut le = vec![vec![false; n]; n];
        for a in 0..n {
            for b in 0..n {
                match preceq(g, sep[a], sep[b], u, v) {
                    Ok(o) => {
                        le[a][b] = matches!(o, SeparatorOrder::LessEqual | SeparatorOrder::Equal);
                        if a == b {
                            t.check(o == SeparatorOrder::Equal, || format!("{g:?}: order not reflexive"));
                        } else {
                            let crossing = crosses(g, sep[a], sep[b]).unwrap_or(true);
                            t.check((o == SeparatorOrder::Incomparable) == crossing, || {
                                format!("{g:?}: comparability of {} and {} disagrees with crossing", sep[a].members(), sep[b].members())
                            });
                        }
                    }
                    Err(e) => t.error(&format!("{g:?}: order on ({u},{v})"), e),
                }
            }
        }
        for (a, b, c) in (0..n).flat_map(|a| (0..n).flat_map(move |b| (0..n).map(move |c| (a, b, c)))) {
            if le[a][b] && le[b][c] {
                t.check(le[a][c], || format!("{g:?}: order not transitive on ({u},{v})"));
            }
            if a != b && c == 0 && le[a][b] {
                t.check(!le[b][a], || format!("{g:?}: order not antisymmetric on ({u},{v})"));
            }
        }
    }
}

/// Noncrossing fragments `X`, `X'` and `x` in `N(X)`: if `X` separates `u,v`
/// and `X'` separates `u,x`, then `X'` separates `u,v`.
fn transfer_lemma(g: &Graph, d: usize, frags: &[Fragment], t: &mut Trial) {
    let frags = &frags[..frags.len().min(40)];
    let vs: Vec<Vertex> = g.vertices().collect();
    for x in frags {
        for y in frags {
            let (s, s2) = (Separator::new(g, x.boundary().clone()), Separator::new(g, y.boundary().clone()));
            let (Ok(s), Ok(s2)) = (s, s2) else { continue };
            if crosses(g, &s, &s2).unwrap_or(true) {
                continue;
            }
            for p in x.boundary() {
                for &u in &vs {
                    for &v in &vs {
                        if x.separates(u, v) && y.separates(u, p) {
                            t.check(y.separates(u, v), || {
                                format!("{g:?} (d={d}): fragment {} separates ({u},{p}) but not ({u},{v})", y.members())
                            });
                        }
                    }
                }
            }
        }
    }
}

/// Fragments whose boundary is a clique: connectivity, separators and blocks
/// of the fragment side agree with the whole graph.
fn clique_bounded_fragments(g: &Graph, d: usize, frags: &[Fragment], t: &mut Trial) {
    let g_seps: BTreeSet<VertexSet> = scan_separators(g, d).into_iter().map(|s| s.members().clone()).collect();
    let g_blocks = d_blocks(g, d + 1);
    for x in frags.iter().take(20) {
        if !is_clique(g, x.boundary()).unwrap_or(false) {
            continue;
        }
        let side = x.members().union(x.boundary());
        let Ok(h) = induced_subgraph(g, &side) else { continue };
        for u in x.members() {
            for v in &side {
                if u == v {
                    continue;
                }
                let (a, b) = (local_connectivity(&h, u, v), local_connectivity(g, u, v));
                t.check(a.is_ok() && a == b, || format!("{g:?}: kappa({u},{v}) changes on the side of {}", x.members()));
            }
        }
        let h_seps: BTreeSet<VertexSet> = scan_separators(&h, d)
            .into_iter()
            .map(|s| s.members().clone())
            .filter(|s| s != x.boundary())
            .collect();
        let expected: BTreeSet<VertexSet> = g_seps.iter().filter(|s| !s.is_disjoint(x.members())).cloned().collect();
        t.check(h_seps == expected, || format!("{g:?}: separators on the side of {} differ", x.members()));
        let h_blocks: BTreeSet<VertexSet> = d_blocks(&h, d + 1).into_iter().filter(|b| b != x.boundary()).collect();
        let expected: BTreeSet<VertexSet> = g_blocks.iter().filter(|b| !b.is_disjoint(x.members())).cloned().collect();
        t.check(h_blocks == expected, || format!("{g:?}: blocks on the side of {} differ", x.members()));
    }
}

/// Two graphs overlapping in at least `d+1` vertices: a d-connected chordal
/// graph and a relabelled second one, sometimes on the same vertex set.
fn glued_pair<R: Rng>(d: usize, rng: &mut R) -> (Graph, Graph) {
    let n1 = rng.gen_range(d + 2..=8);
    let g1 = random::d_connected_chordal(n1, d, rng);
    let n1 = g1.vertex_count();
    let (n2, shared) = if rng.gen_bool(0.5) {
        (n1, n1)
    } else {
        let n2 = rng.gen_range(d + 2..=8);
        (n2, rng.gen_range(d + 1..=n1.min(n2)))
    };
    let h = random::d_connected_chordal(n2, d, rng);
    let mut targets: Vec<Vertex> = g1.vertices().collect();
    targets.shuffle(rng);
    targets.truncate(shared);
    let mut sources: Vec<Vertex> = h.vertices().collect();
    sources.shuffle(rng);
    let map: std::collections::BTreeMap<Vertex, Vertex> = sources
        .iter()
        .enumerate()
        .map(|(k, &v)| (v, targets.get(k).copied().unwrap_or(100 + k as Vertex)))
        .collect();
    (g1, random::relabel(&h, |v| map[&v]))
}

fn b_lemmas(i: usize, s: u64) -> Trial {
    let d = dim(i);
    let mut rng = seed::rng(s, "graph");
    let (g1, g2) = glued_pair(d, &mut rng);
    let mut t = Trial::default();
    let seq = |g: &Graph, rng: &mut rand_chacha::ChaCha8Rng| {
        ReflectionSequence::from_sets(g, d, &random::random_fragment_sets(g, d, rng)).ok().filter(|f| f.is_reduced())
    };
    let (Some(f1), Some(f2)) = (seq(&g1, &mut rng), seq(&g2, &mut rng)) else {
        return t;
    };
    let ctx = GluingContext::new(&g1, &g2);
    let swapped = GluingContext::new(&g2, &g1);
    let context = || format!("{g1:?} / {g2:?} with {:?} / {:?}", f1.member_sets(), f2.member_sets());
    for x in f1.steps() {
        for y in f2.steps().iter().filter(|y| y.boundary() == x.boundary()) {
            match (fragments_compatible(&ctx, x, y), fragments_compatible(&swapped, y, x)) {
                (Ok(a), Ok(b)) => t.check(a.is_some() == b.is_some(), || format!("{}: fragment compatibility is not symmetric", context())),
                (Err(e), _) | (_, Err(e)) => t.error(&context(), e),
            }
        }
    }
    match sequences_compatible(&ctx, &f1, &f2) {
        Ok(v) => {
            t.check(v.compatible != v.strongly_separating_pair.is_some(), || format!("{}: dichotomy fails", context()));
            t.tag(if v.compatible { "compatible" } else { "strongly separated" });
            if v.compatible {
                if let Err(e) = merge_sequences(&ctx, &f1, &f2, s) {
                    t.error(&format!("{}: merge", context()), e);
                }
            } else if let Some((u, w)) = v.strongly_separating_pair {
                match strongly_separated_distance_gap(&ctx, &f1, &f2, u, w, s) {
                    Ok(gap) => t.check(gap, || format!("{}: ({u},{w}) lands at equal distances", context())),
                    Err(e) => t.error(&context(), e),
                }
            }
        }
        Err(e) => t.error(&context(), e),
    }
    t
}

/// A d-connected graph without crossing d-separators, a nonempty reduced
/// sequence on it and a pair separated by one of its steps.
fn separated_instance(d: usize, s: u64) -> Option<(Graph, ReflectionSequence, Vertex, Vertex)> {
    let mut rng = seed::rng(s, "graph");
    let n = rng.gen_range(d + 2..=10);
    let g = if rng.gen_bool(0.5) { random::d_connected_chordal(n, d, &mut rng) } else { random::mixed(n, d, &mut rng) };
    if !is_d_connected(&g, d) || has_crossing_separators(&g, d).unwrap_or(true) {
        return None;
    }
    let sets = random::random_fragment_sets(&g, d, &mut rng);
    let f = ReflectionSequence::from_sets(&g, d, &sets).and_then(|f| reduce_sequence(&g, &f)).ok()?;
    let x = f.steps().choose(&mut rng)?;
    let u = *x.members().to_vec().choose(&mut rng)?;
    let v = *x.complement().to_vec().choose(&mut rng)?;
    Some((g, f, u, v))
}

fn distance_change(i: usize, s: u64) -> Trial {
    let d = dim(i);
    let mut t = Trial::default();
    let Some((g, f, u, v)) = (0..64).find_map(|k| separated_instance(d, seed::derive_indexed(s, "instance", k))) else {
        t.notes.push("no instance found in 64 draws".into());
        return t;
    };
    let fw = sample_generic(&g, d, seed::derive(s, "framework"));
    match apply_sequence(&fw, &f) {
        Ok(q) => {
            let before = fw.distance(u, v).expect("vertices exist");
            let after = q.distance(u, v).expect("vertices exist");
            t.check((before - after).abs() > DISTANCE_GAP_TOL * fw.scale(), || {
                format!("{g:?}: {:?} keeps |{u}{v}| at {before} (now {after})", f.member_sets())
            });
        }
        Err(e) => t.error(&format!("{g:?}"), e),
    }
    t
}

/// Fixtures with a known number of congruence classes.
pub fn orbit_fixtures() -> Vec<(&'static str, usize, Graph)> {
    vec![
        ("path-3", 1, Graph::path(&[1, 2, 3])),
        ("two-k4-on-edge", 2, fixtures::two_k4_on_edge()),
        ("k4-chain-3", 2, fixtures::clique_chain(3, 4, 2)),
        ("two-k5-on-triangle", 3, fixtures::two_k5_on_triangle()),
        ("k5-chain-3", 3, fixtures::clique_chain(3, 5, 3)),
    ]
}

fn orbit_counts(s: u64) -> Trial {
    let mut t = Trial::default();
    for (name, d, g) in orbit_fixtures() {
        let fw = sample_generic(&g, d, seed::derive(s, name));
        let cd = count_cd(&g, d);
        let en = match enumerate_realizations(&fw) {
            Ok(e) => e,
            Err(e) => {
                t.error(name, e);
                continue;
            }
        };
        let frameworks: Vec<_> = en.realizations.iter().map(|r| r.framework.clone()).collect();
        t.check(frameworks.len() == 1 << cd, || format!("{name}: {} realizations, expected 2^{cd}", frameworks.len()));
        for (a, b) in frameworks.iter().tuple_combinations() {
            let eq = is_equivalent(a, b, EQUIVALENCE_TOL).unwrap_or(false);
            let cong = is_congruent(a, b, EQUIVALENCE_TOL).map(|v| v.congruent).unwrap_or(true);
            t.check(eq && !cong, || format!("{name}: enumerated realizations not pairwise equivalent and noncongruent"));
        }
        match solve_equivalent(&fw, 100 << cd, seed::derive(s, "oracle")) {
            Ok(est) => {
                t.check(est.class_count() >= 1 << cd, || format!("{name}: oracle found {} < 2^{cd} classes", est.class_count()));
                match match_orbits(&est, &frameworks) {
                    Ok(m) => t.check(m.perfect, || format!("{name}: imperfect matching {m:?}")),
                    Err(e) => t.error(name, e),
                }
                t.notes.push(format!("{name}: {} classes from {} converged restarts", est.class_count(), est.converged));
            }
            Err(e) => t.error(name, e),
        }
    }
    t
}

fn certify_roundtrip(i: usize, s: u64) -> Trial {
    let d = 2 + i % 2;
    let mut rng = seed::rng(s, "graph");
    let n = rng.gen_range(d + 2..=12);
    let g = random::d_connected_chordal(n, d, &mut rng);
    let mut t = Trial::default();
    let ctx = format!("{g:?} (d={d})");
    let cert = match certify_gluing_construction_seeded(&g, d, s) {
        Ok(Some(c)) => c,
        Ok(None) => {
            t.check(false, || format!("{ctx}: chordal graph has no gluing certificate"));
            return t;
        }
        Err(e) => {
            t.error(&ctx, e);
            return t;
        }
    };
    t.check(cert.validate(&g, s).is_ok(), || format!("{ctx}: certificate fails validation"));
    let back: Result<Certificate, _> = serde_json::to_string(&cert).map_err(|e| e.to_string()).and_then(|j| serde_json::from_str(&j).map_err(|e| e.to_string()));
    t.check(back.as_ref().is_ok_and(|c| c == &cert && c.validate(&g, s).is_ok()), || format!("{ctx}: JSON round trip fails"));
    let gr = is_globally_rigid_seeded(&g, d, s);
    t.check(gr == is_d_connected(&g, d + 1), || format!("{ctx}: globally rigid = {gr} disagrees with {}-connectivity", d + 1));
    t.check(check_closure_characterization(&g, &cert), || format!("{ctx}: closure characterization fails"));
    if let Ok(cl) = closure_star(&g, &cert) {
        for k in 1..=d {
            let a: Vec<_> = scan_separators(&g, k);
            let b: Vec<_> = scan_separators(&cl, k);
            t.check(a == b, || format!("{ctx}: separators of size {k} change in the closure"));
        }
        trilateration(&cl, d, &mut t);
    }
    for x in single_fragments(&g, d) {
        let side = induced_subgraph(&g, &x.members().union(x.boundary())).expect("subset");
        let ok = certify_gluing_construction_seeded(&side, d, s).is_ok_and(|c| c.is_some());
        t.check(ok, || format!("{ctx}: side of fragment {} has no gluing certificate", x.members()));
    }
    match certify_d_joined_seeded(&g, d, s) {
        Some(c) => {
            t.check(c.validate(&g, s).is_ok(), || format!("{ctx}: certify_d_joined certificate fails validation"));
            if d == 2 {
                match recognize_2joined_conditional_seeded(&g, 2, s) {
                    Ok(r) => {
                        t.check(r.verdict.value() == Some(true), || format!("{ctx}: recognizer says {:?}", r.verdict));
                        if r.verdict.is_conditional() {
                            t.notes.push("recognizer used a conditional branch".into());
                        }
                    }
                    Err(e) => t.error(&ctx, e),
                }
            }
        }
        None => t.check(false, || format!("{ctx}: certify_d_joined found nothing")),
    }
    // Gluing two certified graphs along a clique of at least d vertices.
    let other = random::d_connected_chordal(rng.gen_range(d + 1..=6), d, &mut rng);
    let cliques: Vec<VertexSet> = maximal_cliques(&g);
    let target = cliques.choose(&mut rng).expect("nonempty graph").to_vec();
    let oc = maximal_cliques(&other);
    let source = oc.choose(&mut rng).expect("nonempty graph").to_vec();
    let k = rng.gen_range(d..=target.len().min(source.len()));
    let map = |v: Vertex| match source.iter().position(|&w| w == v) {
        Some(j) if j < k => target[j],
        _ => 200 + v,
    };
    let glued = glue(&g, &random::relabel(&other, map));
    t.check(certify_d_joined_seeded(&glued, d, s).is_some(), || format!("{ctx}: gluing with {other:?} along {k} vertices is not certified"));
    // Braced versions are d-joined; the supergraph search is best effort.
    let vs: Vec<Vertex> = g.vertices().collect();
    if let Some((u, v)) = vs.iter().copied().tuple_combinations().filter(|&(u, v)| !g.has_edge(u, v)).collect::<Vec<_>>().choose(&mut rng) {
        let braced = g.with_edge(*u, *v).expect("vertices exist");
        match certify_d_joined_seeded(&braced, d, s) {
            Some(c) => t.check(c.validate(&braced, s).is_ok(), || format!("{ctx}: braced certificate fails validation")),
            None => t.notes.push(format!("brace {u}{v} not certified (best-effort route)")),
        }
    }
    t
}

fn single_fragments(g: &Graph, d: usize) -> Vec<Fragment> {
    scan_separators(g, d)
        .iter()
        .flat_map(|s| fragments_of_separator(g, s, FragmentSelection::SingleComponents).unwrap_or_default())
        .collect()
}

/// In a closure, two vertices adjacent to all of a `(d+1)`-clique are adjacent.
fn trilateration(cl: &Graph, d: usize, t: &mut Trial) {
    let vs: Vec<Vertex> = cl.vertices().collect();
    for c in vs.iter().copied().combinations(d + 1) {
        let set: VertexSet = c.iter().copied().collect();
        if !is_clique(cl, &set).unwrap_or(false) {
            continue;
        }
        let common: Vec<Vertex> = vs
            .iter()
            .copied()
            .filter(|w| !set.contains(*w) && c.iter().all(|&x| cl.has_edge(*w, x)))
            .collect();
        for (a, b) in common.iter().tuple_combinations() {
            t.check(cl.has_edge(*a, *b), || format!("closure misses {a}{b} over the clique {set}"));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in ALL_SUITES {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn small_campaigns_pass_and_are_reproducible() {
        for suite in [Suite::ALemmas, Suite::BLemmas, Suite::RigidNoncrossing, Suite::DistanceChange, Suite::CertifyRoundtrip] {
            let a = run_suite(suite, 12, 9);
            assert!(a.passed(), "{suite}: {:?}", a.violations);
            let b = run_suite(suite, 12, 9);
            assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        }
    }
}
