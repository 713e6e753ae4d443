//! Tubular graphs over oriented samples.
//!
//! The confluent graph is directed: every neighbour pair contributes both flow arcs,
//! weighted by arc length and dropped when not ε-confluent. The geodesic graph is the
//! undirected baseline whose edge weight is the sum of the two arcs fitted from either
//! end.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{arc_weight, FlowArc, OrientedSample};
use crate::neighbors::NeighborSystem;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectedArc<T> {
    pub from: u32,
    pub to: u32,
    pub weight: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UndirectedEdge<T> {
    pub u: u32,
    pub v: u32,
    pub weight: T,
}

/// Whether sample tangents carry a trusted flow orientation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TangentMode {
    Oriented,
    /// Only the tangent line is known; arcs may leave along either sign.
    #[default]
    Unoriented,
}

/// Directed graph of ε-confluent flow arcs, sorted by `(from, to)`.
///
/// Only finite-weight arcs are stored. Arc geometry is not kept per arc; it is refitted on
/// demand by [`ConfluentGraph::flow_arc`].
#[derive(Clone, Debug)]
pub struct ConfluentGraph<T> {
    pub samples: Vec<OrientedSample<T>>,
    pub arcs: Vec<DirectedArc<T>>,
    pub epsilon: T,
    pub elastic_lambda: T,
}

impl<T: Real> ConfluentGraph<T> {
    pub fn num_nodes(&self) -> usize {
        self.samples.len()
    }

    /// Geometry of stored arc `i`.
    pub fn flow_arc(&self, i: usize) -> FlowArc<T> {
        let a = &self.arcs[i];
        fit_between(&self.samples, a.from as usize, a.to as usize)
            .expect("stored arcs join distinct points")
    }

    /// Index of the arc `from → to`, if present.
    pub fn find_arc(&self, from: usize, to: usize) -> Option<usize> {
        self.arcs
            .binary_search_by(|a| (a.from, a.to).cmp(&(from as u32, to as u32)))
            .ok()
    }
}

/// Undirected baseline graph, edges sorted by `(u, v)` with `u < v`.
#[derive(Clone, Debug)]
pub struct GeodesicGraph<T> {
    pub samples: Vec<OrientedSample<T>>,
    pub edges: Vec<UndirectedEdge<T>>,
    pub tangents: TangentMode,
}

impl<T: Real> GeodesicGraph<T> {
    pub fn num_nodes(&self) -> usize {
        self.samples.len()
    }

    /// Arc drawn from `from` to `to` for this baseline: the shorter admissible arc leaving
    /// `from`, or the straight chord when that arc is degenerate.
    pub fn edge_arc(&self, from: usize, to: usize) -> Result<FlowArc<T>> {
        shorter_arc(&self.samples[from], &self.samples[to], self.tangents)
    }
}

#[derive(Clone, Debug)]
pub enum TubularGraph<T> {
    Confluent(ConfluentGraph<T>),
    Geodesic(GeodesicGraph<T>),
}

fn fit_between<T: Real>(samples: &[OrientedSample<T>], from: usize, to: usize) -> Result<FlowArc<T>> {
    let p = &samples[from];
    FlowArc::fit(p.position, p.tangent, samples[to].position)
}

fn check_neighbors<T>(samples: &[OrientedSample<T>], neighbors: &NeighborSystem) -> Result<()> {
    if neighbors.num_nodes != samples.len() {
        return Err(Error::InvalidParameter(format!(
            "neighbour system covers {} nodes but {} samples were given",
            neighbors.num_nodes,
            samples.len()
        )));
    }
    Ok(())
}

/// Builds the directed confluent tubular graph over the given neighbour pairs.
pub fn build_confluent_graph<T: Real>(
    samples: &[OrientedSample<T>],
    neighbors: &NeighborSystem,
    epsilon: T,
    elastic_lambda: T,
) -> Result<ConfluentGraph<T>> {
    check_neighbors(samples, neighbors)?;
    if !(epsilon > T::zero() && epsilon <= T::PI()) {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} outside (0, π]")));
    }
    if !(elastic_lambda >= T::zero()) {
        return Err(Error::InvalidParameter("elastic_lambda must be non-negative".into()));
    }
    let directed = |from: u32, to: u32| -> Option<DirectedArc<T>> {
        let arc = fit_between(samples, from as usize, to as usize).ok()?;
        let weight = arc_weight(&arc, samples[to as usize].tangent, epsilon, elastic_lambda);
        weight.is_finite().then_some(DirectedArc { from, to, weight })
    };
    let mut arcs: Vec<DirectedArc<T>> = neighbors
        .pairs
        .par_iter()
        .flat_map_iter(|&(u, v)| [directed(u, v), directed(v, u)].into_iter().flatten())
        .collect();
    arcs.par_sort_unstable_by_key(|a| (a.from, a.to));
    Ok(ConfluentGraph { samples: samples.to_vec(), arcs, epsilon, elastic_lambda })
}

/// Shorter of the arcs leaving `p` towards `q` (both tangent signs when unoriented); the
/// chord replaces a degenerate arc.
pub fn shorter_arc<T: Real>(
    p: &OrientedSample<T>,
    q: &OrientedSample<T>,
    mode: TangentMode,
) -> Result<FlowArc<T>> {
    let mut best = FlowArc::fit(p.position, p.tangent, q.position)?;
    if mode == TangentMode::Unoriented {
        let flipped = FlowArc::fit(p.position, p.tangent.flipped(), q.position)?;
        if flipped.length < best.length {
            best = flipped;
        }
    }
    if best.is_degenerate() {
        best = FlowArc::straight(p.position, q.position)?;
    }
    Ok(best)
}

/// Undirected weight of a neighbour pair: the sum of the arc lengths fitted from each end.
pub fn geodesic_weight<T: Real>(
    p: &OrientedSample<T>,
    q: &OrientedSample<T>,
    mode: TangentMode,
) -> Result<T> {
    Ok(shorter_arc(p, q, mode)?.length + shorter_arc(q, p, mode)?.length)
}

/// Builds the undirected geodesic baseline graph. Pairs of coincident samples are skipped.
pub fn build_geodesic_graph<T: Real>(
    samples: &[OrientedSample<T>],
    neighbors: &NeighborSystem,
    tangents: TangentMode,
) -> Result<GeodesicGraph<T>> {
    check_neighbors(samples, neighbors)?;
    let edges: Vec<UndirectedEdge<T>> = neighbors
        .pairs
        .par_iter()
        .filter_map(|&(u, v)| {
            let weight = geodesic_weight(&samples[u as usize], &samples[v as usize], tangents).ok()?;
            Some(UndirectedEdge { u, v, weight })
        })
        .collect();
    Ok(GeodesicGraph { samples: samples.to_vec(), edges, tangents })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;
    use crate::neighbors::{knn_neighbors, NeighborFlavor};
    use std::f64::consts::FRAC_PI_2;

    fn s(p: [f64; 3], t: [f64; 3]) -> OrientedSample<f64> {
        OrientedSample::new(Vec3::new(p[0], p[1], p[2]), Vec3::new(t[0], t[1], t[2]).normalized().unwrap())
            .unwrap()
    }

    fn pair(n: usize) -> NeighborSystem {
        NeighborSystem::from_pairs(n, 1, NeighborFlavor::Isotropic, [(0, 1)]).unwrap()
    }

    #[test]
    fn aligned_pair_forward_only() {
        // tangents along the chord: p→q is straight, q→p would leave q pointing away
        let samples = vec![s([0.0; 3], [1.0, 0.0, 0.0]), s([3.0, 0.0, 0.0], [1.0, 0.0, 0.0])];
        let g = build_confluent_graph(&samples, &pair(2), FRAC_PI_2, 0.0).unwrap();
        assert_eq!(g.arcs, vec![DirectedArc { from: 0, to: 1, weight: 3.0 }]);
    }

    #[test]
    fn head_to_tail_pair_both_arcs() {
        // q's tangent is exactly the end tangent of the arc from p
        let samples = vec![s([0.0; 3], [1.0, 1.0, 0.0]), s([2.0, 0.0, 0.0], [1.0, -1.0, 0.0])];
        let g = build_confluent_graph(&samples, &pair(2), FRAC_PI_2, 0.0).unwrap();
        assert_eq!(g.arcs.len(), 2);
        // the reverse arc is the major arc of another circle
        assert!(g.arcs[1].weight > g.arcs[0].weight);
        // flipping p kills both arcs
        let flipped = vec![samples[0].flipped(), samples[1]];
        let g = build_confluent_graph(&flipped, &pair(2), FRAC_PI_2, 0.0).unwrap();
        assert!(g.arcs.is_empty());
    }

    #[test]
    fn geodesic_weight_on_chord() {
        let samples = vec![s([0.0; 3], [1.0, 0.0, 0.0]), s([2.0, 0.0, 0.0], [1.0, 0.0, 0.0])];
        for mode in [TangentMode::Oriented, TangentMode::Unoriented] {
            let g = build_geodesic_graph(&samples, &pair(2), mode).unwrap();
            assert_eq!(g.edges[0].weight, 4.0);
        }
    }

    #[test]
    fn rejects_mismatched_neighbors() {
        let samples = vec![s([0.0; 3], [1.0, 0.0, 0.0]), s([2.0, 0.0, 0.0], [1.0, 0.0, 0.0])];
        assert!(build_confluent_graph(&samples, &pair(3), FRAC_PI_2, 0.0).is_err());
        assert!(build_confluent_graph(&samples, &pair(2), 0.0, 0.0).is_err());
    }

    #[test]
    fn flow_arc_roundtrip() {
        let samples: Vec<_> = (0..5)
            .map(|i| s([i as f64, (i as f64 * 0.3).sin(), 0.0], [1.0, 0.2, 0.0]))
            .collect();
        let n = knn_neighbors(&samples, 4).unwrap();
        let g = build_confluent_graph(&samples, &n, FRAC_PI_2, 0.0).unwrap();
        for (i, a) in g.arcs.iter().enumerate() {
            assert_eq!(g.flow_arc(i).length, a.weight);
            assert_eq!(g.find_arc(a.from as usize, a.to as usize), Some(i));
        }
    }
}
