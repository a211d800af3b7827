//! Brute-force search for frameworks equivalent to a given one: multistart
//! damped least squares in a congruence gauge, then clustering by congruence.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use crate::error::{input, Result};
use crate::framework::{affinely_independent, is_congruent, is_equivalent, Framework};
use crate::graph::{Edge, Vertex};
use crate::rigidity::is_rigid_seeded;
use crate::seed;

/// Converged solutions closer than this (relative to scale) are one class.
pub const CLUSTER_TOL: f64 = 1e-6;
/// Representatives must reproduce the edge lengths to this relative accuracy.
pub const ORACLE_EQUIVALENCE_TOL: f64 = 1e-7;
const MAX_ITERATIONS: usize = 400;

#[derive(Debug, Clone, Serialize)]
pub struct OrbitEstimate {
    #[serde(serialize_with = "serialize_frameworks")]
    pub classes: Vec<Framework>,
    /// How many restarts landed in each class.
    pub hits: Vec<usize>,
    pub restarts: usize,
    pub converged: usize,
    /// Absolute bound on the summed squared residual of a converged run.
    pub residual_threshold: f64,
    /// Vertices carrying the gauge: the first is fixed, the k-th lives in a
    /// k-dimensional coordinate subspace.
    pub pin: Vec<Vertex>,
    pub seed: u64,
    pub diagnostics: Vec<String>,
}

fn serialize_frameworks<S: serde::Serializer>(fws: &[Framework], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(fws.iter().map(Framework::to_data))
}

impl OrbitEstimate {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }
}

/// Gauge frame: origin at the first pinned vertex, orthonormal axes from
/// Gram-Schmidt on the pinned simplex.
struct Gauge {
    origin: Vec<f64>,
    axes: Vec<Vec<f64>>,
    /// Number of free coordinates per vertex, in vertex order.
    free: BTreeMap<Vertex, usize>,
}

impl Gauge {
    fn new(fw: &Framework, pin: &[Vertex]) -> Gauge {
        let d = fw.dimension();
        let origin = fw.coords()[&pin[0]].clone();
        let mut axes: Vec<Vec<f64>> = Vec::with_capacity(d);
        for &p in &pin[1..] {
            let mut w: Vec<f64> = fw.coords()[&p].iter().zip(&origin).map(|(a, b)| a - b).collect();
            for a in &axes {
                let dot: f64 = w.iter().zip(a).map(|(x, y)| x * y).sum();
                w.iter_mut().zip(a).for_each(|(x, y)| *x -= dot * y);
            }
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            axes.push(w.iter().map(|x| x / norm).collect());
        }
        let mut free: BTreeMap<Vertex, usize> = fw.graph().vertices().map(|v| (v, d)).collect();
        for (k, &p) in pin.iter().enumerate() {
            free.insert(p, k);
        }
        Gauge { origin, axes, free }
    }

    fn to_local(&self, x: &[f64]) -> Vec<f64> {
        self.axes
            .iter()
            .map(|a| a.iter().zip(x).zip(&self.origin).map(|((ai, xi), oi)| ai * (xi - oi)).sum())
            .collect()
    }

    fn to_global(&self, y: &[f64]) -> Vec<f64> {
        let mut x = self.origin.clone();
        for (a, yi) in self.axes.iter().zip(y) {
            x.iter_mut().zip(a).for_each(|(xi, ai)| *xi += yi * ai);
        }
        x
    }

    fn unknowns(&self) -> usize {
        self.free.values().sum()
    }

    /// Local coordinates of every vertex from the unknown vector.
    fn unpack(&self, z: &DVector<f64>, d: usize) -> BTreeMap<Vertex, Vec<f64>> {
        let mut at = 0;
        self.free
            .iter()
            .map(|(&v, &k)| {
                let mut y = vec![0.0; d];
                y[..k].copy_from_slice(&z.as_slice()[at..at + k]);
                at += k;
                (v, y)
            })
            .collect()
    }

    /// Offset of each vertex's first unknown.
    fn offsets(&self) -> BTreeMap<Vertex, usize> {
        let mut at = 0;
        self.free
            .iter()
            .map(|(&v, &k)| {
                let o = at;
                at += k;
                (v, o)
            })
            .collect()
    }
}

/// The first `d+1` vertices, in id order, that keep the chosen points
/// affinely independent.
fn choose_pin(fw: &Framework) -> Option<Vec<Vertex>> {
    let d = fw.dimension();
    let scale = fw.scale();
    let mut pin: Vec<Vertex> = Vec::with_capacity(d + 1);
    for v in fw.graph().vertices() {
        let mut pts: Vec<&[f64]> = pin.iter().map(|p| fw.coords()[p].as_slice()).collect();
        pts.push(&fw.coords()[&v]);
        if affinely_independent(&pts, scale) {
            pin.push(v);
            if pin.len() == d + 1 {
                return Some(pin);
            }
        }
    }
    None
}

struct Problem<'a> {
    gauge: &'a Gauge,
    edges: Vec<(Edge, f64)>,
    offsets: BTreeMap<Vertex, usize>,
    d: usize,
}

impl Problem<'_> {
    fn residuals(&self, y: &BTreeMap<Vertex, Vec<f64>>) -> DVector<f64> {
        DVector::from_iterator(
            self.edges.len(),
            self.edges.iter().map(|&((u, v), l2)| {
                y[&u].iter().zip(&y[&v]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() - l2
            }),
        )
    }

    fn jacobian(&self, y: &BTreeMap<Vertex, Vec<f64>>) -> DMatrix<f64> {
        let mut j = DMatrix::zeros(self.edges.len(), self.gauge.unknowns());
        for (row, &((u, v), _)) in self.edges.iter().enumerate() {
            for i in 0..self.d {
                let diff = 2.0 * (y[&u][i] - y[&v][i]);
                if i < self.gauge.free[&u] {
                    j[(row, self.offsets[&u] + i)] += diff;
                }
                if i < self.gauge.free[&v] {
                    j[(row, self.offsets[&v] + i)] -= diff;
                }
            }
        }
        j
    }

    /// Levenberg-Marquardt from `z`; returns the final point and cost.
    fn solve(&self, mut z: DVector<f64>, threshold: f64) -> (DVector<f64>, f64) {
        let mut y = self.gauge.unpack(&z, self.d);
        let mut r = self.residuals(&y);
        let mut cost = r.norm_squared();
        let mut lambda = 1e-3;
        for _ in 0..MAX_ITERATIONS {
            if cost <= threshold * 1e-4 {
                break;
            }
            let j = self.jacobian(&y);
            let jt = j.transpose();
            let jtj = &jt * &j;
            let g = &jt * &r;
            let mut improved = false;
            while lambda < 1e12 {
                let mut a = jtj.clone();
                for k in 0..a.nrows() {
                    a[(k, k)] += lambda * (1.0 + jtj[(k, k)]);
                }
                let Some(step) = a.cholesky().map(|c| c.solve(&(-&g))) else {
                    lambda *= 4.0;
                    continue;
                };
                let cand = &z + &step;
                let cy = self.gauge.unpack(&cand, self.d);
                let cr = self.residuals(&cy);
                let cc = cr.norm_squared();
                if cc < cost {
                    z = cand;
                    y = cy;
                    r = cr;
                    improved = cost - cc > 1e-15 * cost || cc <= threshold;
                    cost = cc;
                    lambda = (lambda / 3.0).max(1e-12);
                    break;
                }
                lambda *= 4.0;
            }
            if !improved {
                break;
            }
        }
        (z, cost)
    }
}

/// Finds frameworks with the edge lengths of `fw` from `restarts` random
/// starts and groups them into congruence classes.
pub fn solve_equivalent(fw: &Framework, restarts: usize, seed: u64) -> Result<OrbitEstimate> {
    let g = fw.graph();
    let d = fw.dimension();
    if g.vertex_count() < d + 1 {
        return input(format!("the oracle needs at least {} vertices", d + 1));
    }
    if !is_rigid_seeded(g, d, seed::derive(seed, "oracle-rigidity")) {
        return input(format!("graph is not rigid in dimension {d}; equivalent frameworks form a continuum"));
    }
    let pin = choose_pin(fw).ok_or_else(|| crate::Error::Singularity {
        step: None,
        message: "no d+1 affinely independent vertices to pin".into(),
    })?;
    let gauge = Gauge::new(fw, &pin);
    let scale = fw.scale();
    let threshold = 1e-16 * scale.powi(4);
    let problem = Problem {
        gauge: &gauge,
        edges: fw.edge_lengths().into_iter().map(|(e, l)| (e, l * l)).collect(),
        offsets: gauge.offsets(),
        d,
    };

    // Bounding box of the local coordinates, scaled by 1.5 about its centre.
    let local: Vec<Vec<f64>> = g.vertices().map(|v| gauge.to_local(&fw.coords()[&v])).collect();
    let bounds: Vec<(f64, f64)> = (0..d)
        .map(|i| {
            let lo = local.iter().map(|y| y[i]).fold(f64::INFINITY, f64::min);
            let hi = local.iter().map(|y| y[i]).fold(f64::NEG_INFINITY, f64::max);
            let (c, h) = ((lo + hi) / 2.0, (hi - lo).max(scale * 1e-3) * 0.75);
            (c - h, c + h)
        })
        .collect();

    let mut classes: Vec<Framework> = Vec::new();
    let mut hits: Vec<usize> = Vec::new();
    let mut converged = 0;
    let mut diagnostics = Vec::new();
    let mut best_failed = f64::INFINITY;
    for i in 0..restarts {
        let mut rng = seed::rng(seed::derive_indexed(seed, "oracle-restart", i as u64), "start");
        let start = DVector::from_iterator(
            gauge.unknowns(),
            gauge.free.values().flat_map(|&k| (0..k).collect::<Vec<_>>()).map(|axis| {
                let (lo, hi) = bounds[axis];
                rng.gen_range(lo..hi)
            }),
        );
        let (z, cost) = problem.solve(start, threshold);
        if cost > threshold {
            best_failed = best_failed.min(cost);
            continue;
        }
        let coords: BTreeMap<Vertex, Vec<f64>> = gauge
            .unpack(&z, d)
            .into_iter()
            .map(|(v, y)| (v, gauge.to_global(&y)))
            .collect();
        let candidate = Framework::new(g, d, coords)?;
        if !is_equivalent(fw, &candidate, ORACLE_EQUIVALENCE_TOL)? {
            diagnostics.push(format!("restart {i}: converged but not equivalent at {ORACLE_EQUIVALENCE_TOL}"));
            continue;
        }
        converged += 1;
        let mut placed = false;
        for (k, rep) in classes.iter().enumerate() {
            if is_congruent(rep, &candidate, CLUSTER_TOL)?.congruent {
                hits[k] += 1;
                placed = true;
                break;
            }
        }
        if !placed {
            classes.push(candidate);
            hits.push(1);
        }
    }
    if converged == 0 {
        diagnostics.push(format!("no restart converged; best summed squared residual {best_failed:e}"));
    }
    Ok(OrbitEstimate {
        classes,
        hits,
        restarts,
        converged,
        residual_threshold: threshold,
        pin,
        seed,
        diagnostics,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchReport {
    pub perfect: bool,
    /// For each oracle class, the enumerated framework it was paired with.
    pub oracle_to_enumerated: Vec<Option<usize>>,
    pub unmatched_oracle: Vec<usize>,
    pub unmatched_enumerated: Vec<usize>,
    /// Oracle classes congruent to more than one enumerated framework, or vice versa.
    pub ambiguous: bool,
}

/// Bipartite matching between oracle classes and enumerated frameworks by
/// congruence at [`CLUSTER_TOL`].
pub fn match_orbits(est: &OrbitEstimate, enumerated: &[Framework]) -> Result<MatchReport> {
    let mut adj: Vec<Vec<usize>> = Vec::with_capacity(est.classes.len());
    for c in &est.classes {
        let mut row = Vec::new();
        for (j, e) in enumerated.iter().enumerate() {
            if is_congruent(c, e, CLUSTER_TOL)?.congruent {
                row.push(j);
            }
        }
        adj.push(row);
    }
    let ambiguous = adj.iter().any(|r| r.len() > 1)
        || (0..enumerated.len()).any(|j| adj.iter().filter(|r| r.contains(&j)).count() > 1);

    // Kuhn's augmenting paths; the sides have at most a few hundred nodes.
    let mut owner: Vec<Option<usize>> = vec![None; enumerated.len()];
    fn augment(i: usize, adj: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
        for &j in &adj[i] {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            if owner[j].is_none_or(|k| augment(k, adj, owner, seen)) {
                owner[j] = Some(i);
                return true;
            }
        }
        false
    }
    for i in 0..adj.len() {
        let mut seen = vec![false; enumerated.len()];
        augment(i, &adj, &mut owner, &mut seen);
    }
    let mut oracle_to_enumerated = vec![None; est.classes.len()];
    for (j, o) in owner.iter().enumerate() {
        if let Some(i) = o {
            oracle_to_enumerated[*i] = Some(j);
        }
    }
    let unmatched_oracle: Vec<usize> = (0..est.classes.len()).filter(|&i| oracle_to_enumerated[i].is_none()).collect();
    let unmatched_enumerated: Vec<usize> = (0..enumerated.len()).filter(|&j| owner[j].is_none()).collect();
    Ok(MatchReport {
        perfect: unmatched_oracle.is_empty() && unmatched_enumerated.is_empty() && !ambiguous,
        oracle_to_enumerated,
        unmatched_oracle,
        unmatched_enumerated,
        ambiguous,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::Graph;
    use crate::reflection::enumerate_realizations;

    fn enumerated(fw: &Framework) -> Vec<Framework> {
        enumerate_realizations(fw).unwrap().realizations.into_iter().map(|r| r.framework).collect()
    }

    #[test]
    fn globally_rigid_has_one_class() {
        let fw = Framework::sample_generic(&Graph::complete(1..=4), 2, 7);
        let est = solve_equivalent(&fw, 200, 1).unwrap();
        assert_eq!(est.class_count(), 1);
        assert!(match_orbits(&est, &enumerated(&fw)).unwrap().perfect);
    }

    #[test]
    fn path_folds_at_the_middle() {
        let fw = Framework::sample_generic(&Graph::path(&[1, 2, 3]), 1, 3);
        let est = solve_equivalent(&fw, 200, 2).unwrap();
        assert_eq!(est.class_count(), 2);
        assert!(match_orbits(&est, &enumerated(&fw)).unwrap().perfect);
    }

    #[test]
    fn two_k4_on_an_edge_has_two_classes() {
        let fw = Framework::sample_generic(&fixtures::two_k4_on_edge(), 2, 11);
        let est = solve_equivalent(&fw, 500, 3).unwrap();
        assert_eq!(est.class_count(), 2);
        let all = enumerated(&fw);
        assert!(match_orbits(&est, &all).unwrap().perfect);
        let report = match_orbits(&est, &all[..1]).unwrap();
        assert!(!report.perfect);
        assert_eq!(report.unmatched_oracle.len(), 1);
    }

    #[test]
    fn representatives_reproduce_edge_lengths() {
        let fw = Framework::sample_generic(&fixtures::clique_chain(3, 4, 2), 2, 5);
        let est = solve_equivalent(&fw, 100, 4).unwrap();
        for c in &est.classes {
            assert!(is_equivalent(&fw, c, ORACLE_EQUIVALENCE_TOL).unwrap());
        }
        assert!(est.converged > 0);
    }

    #[test]
    fn refuses_flexible_graphs() {
        let fw = Framework::sample_generic(&Graph::cycle(&[1, 2, 3, 4]), 2, 1);
        assert!(solve_equivalent(&fw, 10, 1).is_err());
    }
}
