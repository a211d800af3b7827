//! Frameworks, reflections in hyperplanes and numeric comparison of
//! realizations.

use std::collections::BTreeMap;

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::graph::{Edge, Graph, Vertex};
use crate::seed;

/// Relative tolerance for equivalence and congruence.
pub const EQUIVALENCE_TOL: f64 = 1e-9;
/// Absolute tolerance for undoing a reflection on unit-box coordinates.
pub const INVOLUTION_TOL: f64 = 1e-12;
/// Relative lower bound on the smallest singular value of anchor differences.
pub const AFFINE_TOL: f64 = 1e-8;
/// Relative gap required between distances that must differ generically.
pub const DISTANCE_GAP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Provenance {
    SampledGeneric { seed: u64 },
    UserSupplied,
}

/// A realization `(G,p)` of a graph in `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Framework {
    graph: Graph,
    d: usize,
    coords: BTreeMap<Vertex, Vec<f64>>,
    provenance: Provenance,
}

/// Wire format: `{"d":..,"coords":{"<vid>":[..]},"seed":..}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameworkData {
    pub d: usize,
    pub coords: BTreeMap<Vertex, Vec<f64>>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl Framework {
    pub fn new(g: &Graph, d: usize, coords: BTreeMap<Vertex, Vec<f64>>) -> Result<Framework> {
        if d == 0 {
            return input("dimension must be positive");
        }
        for v in g.vertices() {
            match coords.get(&v) {
                None => return input(format!("no coordinates for vertex {v}")),
                Some(p) if p.len() != d => {
                    return input(format!("vertex {v} has {} coordinates, expected {d}", p.len()))
                }
                Some(p) if p.iter().any(|x| !x.is_finite()) => {
                    return input(format!("vertex {v} has a non-finite coordinate"))
                }
                Some(_) => {}
            }
        }
        if let Some(v) = coords.keys().find(|v| !g.has_vertex(**v)) {
            return input(format!("coordinates given for {v}, which is not a vertex"));
        }
        Ok(Framework {
            graph: g.clone(),
            d,
            coords,
            provenance: Provenance::UserSupplied,
        })
    }

    pub fn from_data(g: &Graph, data: FrameworkData) -> Result<Framework> {
        let mut fw = Framework::new(g, data.d, data.coords)?;
        if let Some(seed) = data.seed {
            fw.provenance = Provenance::SampledGeneric { seed };
        }
        Ok(fw)
    }

    pub fn to_data(&self) -> FrameworkData {
        FrameworkData {
            d: self.d,
            coords: self.coords.clone(),
            seed: match self.provenance {
                Provenance::SampledGeneric { seed } => Some(seed),
                Provenance::UserSupplied => None,
            },
        }
    }

    /// Uniform coordinates in `[0,1)^d`, re-sampled until every `d+1` points
    /// are affinely independent.
    pub fn sample_generic(g: &Graph, d: usize, seed: u64) -> Framework {
        assert!(d > 0, "dimension must be positive");
        for attempt in 0..64 {
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed::derive_indexed(seed, "generic-framework", attempt));
            let coords = g
                .vertices()
                .map(|v| (v, (0..d).map(|_| rng.gen::<f64>()).collect()))
                .collect();
            let fw = Framework {
                graph: g.clone(),
                d,
                coords,
                provenance: Provenance::SampledGeneric { seed },
            };
            if fw.in_general_position() {
                return fw;
            }
        }
        panic!("no framework in general position after 64 samples");
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn coords(&self) -> &BTreeMap<Vertex, Vec<f64>> {
        &self.coords
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn point(&self, v: Vertex) -> Result<&[f64]> {
        self.coords
            .get(&v)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::Input(format!("vertex {v} not in framework")))
    }

    pub fn distance(&self, u: Vertex, v: Vertex) -> Result<f64> {
        Ok(dist(self.point(u)?, self.point(v)?))
    }

    /// The largest pairwise distance, or 1 for frameworks collapsed to a point.
    pub fn scale(&self) -> f64 {
        let pts: Vec<&Vec<f64>> = self.coords.values().collect();
        let mut s: f64 = 0.0;
        for (i, p) in pts.iter().enumerate() {
            for q in &pts[i + 1..] {
                s = s.max(dist(p, q));
            }
        }
        if s > 0.0 {
            s
        } else {
            1.0
        }
    }

    pub fn edge_lengths(&self) -> BTreeMap<Edge, f64> {
        self.graph
            .edges()
            .map(|(a, b)| ((a, b), dist(&self.coords[&a], &self.coords[&b])))
            .collect()
    }

    /// Every set of at most `d+1` points is affinely independent.
    pub fn in_general_position(&self) -> bool {
        let pts: Vec<&[f64]> = self.coords.values().map(Vec::as_slice).collect();
        let k = (self.d + 1).min(pts.len());
        let scale = self.scale();
        pts.iter()
            .combinations(k)
            .all(|c| affinely_independent(&c.into_iter().copied().collect::<Vec<_>>(), scale))
    }

    /// The same vertex positions on another graph.
    pub fn with_graph(&self, g: &Graph) -> Result<Framework> {
        let coords = g
            .vertices()
            .map(|v| Ok((v, self.point(v)?.to_vec())))
            .collect::<Result<_>>()?;
        Ok(Framework {
            graph: g.clone(),
            d: self.d,
            coords,
            provenance: self.provenance,
        })
    }

    pub(crate) fn with_coords(&self, coords: BTreeMap<Vertex, Vec<f64>>) -> Framework {
        Framework {
            graph: self.graph.clone(),
            d: self.d,
            coords,
            provenance: Provenance::UserSupplied,
        }
    }
}

pub fn sample_generic(g: &Graph, d: usize, seed: u64) -> Framework {
    Framework::sample_generic(g, d, seed)
}

pub fn edge_lengths(fw: &Framework) -> BTreeMap<Edge, f64> {
    fw.edge_lengths()
}

pub(crate) fn dist(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
}

fn difference_matrix(points: &[&[f64]]) -> DMatrix<f64> {
    let d = points[0].len();
    DMatrix::from_fn(d, points.len() - 1, |r, c| points[c + 1][r] - points[0][r])
}

/// Whether the points are affinely independent, judged by the smallest
/// singular value of their difference matrix against `AFFINE_TOL * scale`.
pub fn affinely_independent(points: &[&[f64]], scale: f64) -> bool {
    if points.len() <= 1 {
        return true;
    }
    if points.len() - 1 > points[0].len() {
        return false;
    }
    let m = difference_matrix(points);
    let smallest = m.svd(false, false).singular_values.min();
    smallest > AFFINE_TOL * scale
}

/// Orthogonal reflection of `x` in the affine hyperplane through the `d`
/// anchors. With `P` the projection onto the span of the anchor differences,
/// the image is `x - 2(I - P)(x - a_1)`.
pub fn reflect_point(anchors: &[&[f64]], x: &[f64]) -> Result<Vec<f64>> {
    let mut all: Vec<&[f64]> = anchors.to_vec();
    all.push(x);
    let mut scale: f64 = 0.0;
    for (i, p) in all.iter().enumerate() {
        for q in &all[i + 1..] {
            scale = scale.max(dist(p, q));
        }
    }
    reflect_point_scaled(anchors, x, if scale > 0.0 { scale } else { 1.0 })
}

pub(crate) fn reflect_point_scaled(anchors: &[&[f64]], x: &[f64], scale: f64) -> Result<Vec<f64>> {
    let d = x.len();
    if anchors.len() != d || anchors.iter().any(|a| a.len() != d) {
        return input(format!("reflection in R^{d} needs {d} anchors of dimension {d}"));
    }
    if !affinely_independent(anchors, scale) {
        return Err(Error::Singularity {
            step: None,
            message: "anchors are affinely dependent".into(),
        });
    }
    let a1 = DVector::from_column_slice(anchors[0]);
    let y = DVector::from_column_slice(x) - &a1;
    let n = unit_normal(anchors)?;
    // Householder form x - 2 n n^T (x - a_1): an exact isometry for any unit n,
    // so applying it twice returns x up to rounding.
    let image = DVector::from_column_slice(x) - &n * (2.0 * n.dot(&y));
    Ok(image.iter().copied().collect())
}

/// Unit normal of the hyperplane through the anchors: the coordinate axis
/// with the largest residual against an orthonormal basis of the anchor
/// differences, orthogonalized twice.
fn unit_normal(anchors: &[&[f64]]) -> Result<DVector<f64>> {
    let d = anchors[0].len();
    if d == 1 {
        return Ok(DVector::from_element(1, 1.0));
    }
    let q = difference_matrix(anchors).qr().q();
    let residual = |v: DVector<f64>| {
        let once = &v - &q * (q.transpose() * &v);
        &once - &q * (q.transpose() * &once)
    };
    let n = (0..d)
        .map(|k| residual(DVector::from_fn(d, |i, _| if i == k { 1.0 } else { 0.0 })))
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("d > 0");
    let norm = n.norm();
    if norm == 0.0 {
        return Err(Error::Singularity { step: None, message: "anchors span no hyperplane".into() });
    }
    Ok(n / norm)
}

/// Outcome of comparing all pairwise distances of two frameworks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CongruenceVerdict {
    pub congruent: bool,
    /// Largest distance discrepancy divided by the framework scale.
    pub max_pairwise_distance_discrepancy: f64,
    pub tolerance: f64,
}

fn check_comparable(a: &Framework, b: &Framework) -> Result<()> {
    if a.graph != b.graph {
        return input("frameworks are on different graphs");
    }
    if a.d != b.d {
        return input(format!("frameworks live in R^{} and R^{}", a.d, b.d));
    }
    Ok(())
}

/// All edge lengths agree within `tol` relative to the larger scale.
pub fn is_equivalent(a: &Framework, b: &Framework, tol: f64) -> Result<bool> {
    check_comparable(a, b)?;
    let scale = a.scale().max(b.scale());
    let (la, lb) = (a.edge_lengths(), b.edge_lengths());
    Ok(la.iter().all(|(e, x)| (x - lb[e]).abs() <= tol * scale))
}

pub fn is_congruent(a: &Framework, b: &Framework, tol: f64) -> Result<CongruenceVerdict> {
    check_comparable(a, b)?;
    let scale = a.scale().max(b.scale());
    let vs: Vec<Vertex> = a.graph.vertices().collect();
    let mut worst: f64 = 0.0;
    for (i, &u) in vs.iter().enumerate() {
        for &v in &vs[i + 1..] {
            let diff = (dist(&a.coords[&u], &a.coords[&v]) - dist(&b.coords[&u], &b.coords[&v])).abs();
            worst = worst.max(diff / scale);
        }
    }
    Ok(CongruenceVerdict {
        congruent: worst <= tol,
        max_pairwise_distance_discrepancy: worst,
        tolerance: tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn reflect_examples() {
        let (a, b) = ([0.0, 0.0], [1.0, 0.0]);
        assert_eq!(reflect_point(&[&a, &b], &[0.5, 3.0]).unwrap(), vec![0.5, -3.0]);
        assert_eq!(reflect_point(&[&a, &b], &[7.0, 0.0]).unwrap(), vec![7.0, 0.0]);
        let x = [0.25, -1.5];
        let once = reflect_point(&[&[0.1, 0.2], &[0.7, 0.9]], &x).unwrap();
        let twice = reflect_point(&[&[0.1, 0.2], &[0.7, 0.9]], &once).unwrap();
        assert!(dist(&twice, &x) < INVOLUTION_TOL);
        assert_eq!(reflect_point(&[&[2.0]], &[5.0]).unwrap(), vec![-1.0]);
        assert!(matches!(
            reflect_point(&[&a, &a], &[0.5, 3.0]),
            Err(Error::Singularity { .. })
        ));
    }

    #[test]
    fn reflection_in_three_dimensions() {
        let anchors: [&[f64]; 3] = [&[0.0, 0.0, 1.0], &[1.0, 0.0, 1.0], &[0.0, 1.0, 1.0]];
        assert_eq!(reflect_point(&anchors, &[0.3, 0.4, 3.0]).unwrap(), vec![0.3, 0.4, -1.0]);
    }

    #[test]
    fn sampling_is_deterministic_and_generic() {
        let g = fixtures::double_banana().graph;
        let a = sample_generic(&g, 3, 11);
        assert_eq!(a, sample_generic(&g, 3, 11));
        assert_ne!(a, sample_generic(&g, 3, 12));
        assert!(a.in_general_position());
        let k4 = Graph::complete(1..=4);
        assert!(sample_generic(&k4, 3, 5).in_general_position());
    }

    #[test]
    fn lengths_and_comparisons() {
        let g = Graph::from_edges([(1, 2)]);
        let fw = Framework::new(&g, 2, [(1, vec![0.0, 0.0]), (2, vec![0.0, 1.0])].into()).unwrap();
        assert_eq!(fw.edge_lengths()[&(1, 2)], 1.0);

        let g = fixtures::two_k4_on_edge();
        let fw = sample_generic(&g, 2, 3);
        assert!(is_equivalent(&fw, &fw, EQUIVALENCE_TOL).unwrap());
        let moved = fw.with_coords(
            fw.coords()
                .iter()
                .map(|(&v, p)| (v, vec![-p[1] + 3.0, p[0] - 1.0]))
                .collect(),
        );
        assert!(is_congruent(&fw, &moved, EQUIVALENCE_TOL).unwrap().congruent);
        assert_eq!(fw.edge_lengths().len(), moved.edge_lengths().len());
        let doubled = fw.with_coords(
            fw.coords().iter().map(|(&v, p)| (v, p.iter().map(|x| 2.0 * x).collect())).collect(),
        );
        assert!(!is_equivalent(&fw, &doubled, EQUIVALENCE_TOL).unwrap());
        let mut bumped = fw.coords().clone();
        bumped.get_mut(&1).unwrap()[0] += 10.0 * EQUIVALENCE_TOL * fw.scale();
        let verdict = is_congruent(&fw, &fw.with_coords(bumped), EQUIVALENCE_TOL).unwrap();
        assert!(!verdict.congruent);
        assert!(is_equivalent(&fw, &sample_generic(&Graph::complete(1..=4), 2, 3), 1e-9).is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = fixtures::two_k4_on_edge();
        let fw = sample_generic(&g, 2, 9);
        let text = serde_json::to_string(&fw.to_data()).unwrap();
        assert!(text.contains("\"1\":["));
        let back: FrameworkData = serde_json::from_str(&text).unwrap();
        assert_eq!(Framework::from_data(&g, back).unwrap(), fw);
        let bad = FrameworkData { d: 2, coords: [(1, vec![0.0, 0.0])].into(), seed: None };
        assert!(Framework::from_data(&g, bad).is_err());
    }
}
