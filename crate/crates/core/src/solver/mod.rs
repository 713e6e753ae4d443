//! Tree extraction: minimum arborescence on confluent graphs, minimum spanning tree on
//! geodesic graphs.

mod arborescence;
mod mst;
mod tree;

pub use arborescence::{min_arborescence, Arborescence};
pub use mst::{min_spanning_tree, SpanningTree};
pub use tree::{TreeEdge, VesselTree};

use log::warn;

use crate::error::{Error, Result};
use crate::graph::{ConfluentGraph, DirectedArc, GeodesicGraph, UndirectedEdge};
use crate::scalar::Real;

/// Anything that can be read as a `(from, to, weight)` triple.
pub trait ArcLike<W> {
    fn endpoints(&self) -> (usize, usize);
    fn weight(&self) -> W;
}

impl<W: Copy> ArcLike<W> for (usize, usize, W) {
    #[inline]
    fn endpoints(&self) -> (usize, usize) {
        (self.0, self.1)
    }
    #[inline]
    fn weight(&self) -> W {
        self.2
    }
}

impl<T: Copy> ArcLike<T> for DirectedArc<T> {
    #[inline]
    fn endpoints(&self) -> (usize, usize) {
        (self.from as usize, self.to as usize)
    }
    #[inline]
    fn weight(&self) -> T {
        self.weight
    }
}

impl<T: Copy> ArcLike<T> for UndirectedEdge<T> {
    #[inline]
    fn endpoints(&self) -> (usize, usize) {
        (self.u as usize, self.v as usize)
    }
    #[inline]
    fn weight(&self) -> T {
        self.weight
    }
}

fn check_root(root: usize, n: usize) -> Result<()> {
    if root >= n {
        return Err(Error::IndexOutOfRange { index: root, len: n });
    }
    Ok(())
}

/// Minimum arborescence of a confluent graph, with arc geometry attached to each edge.
pub fn minimum_arborescence<T: Real>(graph: &ConfluentGraph<T>, root: usize) -> Result<VesselTree<T>> {
    let n = graph.num_nodes();
    check_root(root, n)?;
    let arb = min_arborescence(n, &graph.arcs, root);
    let mut parent = vec![None; n];
    let mut edges = vec![None; n];
    for (v, arc) in arb.parent_arc.iter().enumerate() {
        if let Some(i) = *arc {
            parent[v] = Some(graph.arcs[i].from as usize);
            edges[v] = Some(TreeEdge { arc: graph.flow_arc(i), weight: graph.arcs[i].weight });
        }
    }
    if arb.reachable.iter().filter(|r| **r).count() == 1 && n > 1 {
        warn!("no node is reachable from root {root}; returning a single-node tree");
    }
    let positions = graph.samples.iter().map(|s| s.position).collect();
    VesselTree::new(root, positions, parent, arb.reachable, edges)
}

/// Minimum spanning tree of the root's component in a geodesic graph, oriented from the
/// root. Edge geometry is the baseline's shorter arc from parent to child.
pub fn minimum_spanning_tree<T: Real>(graph: &GeodesicGraph<T>, root: usize) -> Result<VesselTree<T>> {
    let n = graph.num_nodes();
    check_root(root, n)?;
    let mst = min_spanning_tree(n, &graph.edges, root);
    let mut parent = vec![None; n];
    let mut edges = vec![None; n];
    for v in 0..n {
        if let Some((p, e)) = mst.parent[v] {
            parent[v] = Some(p);
            edges[v] = Some(TreeEdge { arc: graph.edge_arc(p, v)?, weight: graph.edges[e].weight });
        }
    }
    if mst.reachable.iter().filter(|r| **r).count() == 1 && n > 1 {
        warn!("root {root} has no incident edges; returning a single-node tree");
    }
    let positions = graph.samples.iter().map(|s| s.position).collect();
    VesselTree::new(root, positions, parent, mst.reachable, edges)
}
