use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{FlowArc, Point3};
use crate::scalar::Real;

/// Geometry and cost of the edge joining a node to its parent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct TreeEdge<T> {
    pub arc: FlowArc<T>,
    pub weight: T,
}

/// Rooted directed tree over sample indices.
///
/// Nodes with `included[v] == false` were not reachable from the root and carry no
/// parent; they are not part of the tree.
#[derive(Clone, Debug, PartialEq)]
pub struct VesselTree<T> {
    pub root: usize,
    pub positions: Vec<Point3<T>>,
    pub parent: Vec<Option<usize>>,
    pub included: Vec<bool>,
    pub edges: Vec<Option<TreeEdge<T>>>,
    pub total_weight: T,
}

impl<T: Real> VesselTree<T> {
    /// Assembles and validates a tree. `edges[v]` must be present exactly for nodes with a
    /// parent.
    pub fn new(
        root: usize,
        positions: Vec<Point3<T>>,
        parent: Vec<Option<usize>>,
        included: Vec<bool>,
        edges: Vec<Option<TreeEdge<T>>>,
    ) -> Result<Self> {
        let total_weight = edges.iter().flatten().map(|e| e.weight).sum();
        let tree = Self { root, positions, parent, included, edges, total_weight };
        tree.validate()?;
        Ok(tree)
    }

    /// Tree whose edges are straight segments weighted by their length.
    pub fn with_straight_edges(
        root: usize,
        positions: Vec<Point3<T>>,
        parent: Vec<Option<usize>>,
        included: Vec<bool>,
    ) -> Result<Self> {
        let mut edges = Vec::with_capacity(parent.len());
        for (v, p) in parent.iter().enumerate() {
            edges.push(match p {
                Some(p) => {
                    let (a, b) = (
                        *positions.get(*p).ok_or(Error::IndexOutOfRange { index: *p, len: positions.len() })?,
                        *positions.get(v).ok_or(Error::IndexOutOfRange { index: v, len: positions.len() })?,
                    );
                    let arc = FlowArc::straight(a, b)?;
                    Some(TreeEdge { weight: arc.length, arc })
                }
                None => None,
            });
        }
        Self::new(root, positions, parent, included, edges)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn excluded_count(&self) -> usize {
        self.included.iter().filter(|i| !**i).count()
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.len()];
        for (v, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                ch[*p].push(v);
            }
        }
        ch
    }

    /// Nodes with out-degree of at least two.
    pub fn branching_nodes(&self) -> Vec<usize> {
        self.children()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.len() >= 2)
            .map(|(v, _)| v)
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.positions.len();
        let bad = |msg: String| Err(Error::MalformedTree(msg));
        if self.parent.len() != n || self.included.len() != n || self.edges.len() != n {
            return bad("per-node vectors differ in length".into());
        }
        if self.root >= n {
            return Err(Error::IndexOutOfRange { index: self.root, len: n });
        }
        if self.parent[self.root].is_some() || !self.included[self.root] {
            return bad("root must be included and have no parent".into());
        }
        for v in 0..n {
            match self.parent[v] {
                Some(p) => {
                    if p >= n {
                        return Err(Error::IndexOutOfRange { index: p, len: n });
                    }
                    if !self.included[v] || !self.included[p] {
                        return bad(format!("edge {p}->{v} touches an excluded node"));
                    }
                    if self.edges[v].is_none() {
                        return bad(format!("node {v} has a parent but no edge geometry"));
                    }
                }
                None => {
                    if v != self.root && self.included[v] {
                        return bad(format!("included node {v} has no parent"));
                    }
                    if self.edges[v].is_some() {
                        return bad(format!("parentless node {v} carries edge geometry"));
                    }
                }
            }
        }
        // every included node must reach the root
        let mut state = vec![0u8; n]; // 0 unknown, 1 in progress, 2 reaches root
        state[self.root] = 2;
        for start in 0..n {
            if !self.included[start] || state[start] == 2 {
                continue;
            }
            let mut trail = Vec::new();
            let mut v = start;
            while state[v] == 0 {
                state[v] = 1;
                trail.push(v);
                v = self.parent[v].expect("checked above");
            }
            if state[v] == 1 {
                return bad(format!("cycle through node {v}"));
            }
            for t in trail {
                state[t] = 2;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;

    fn pts(n: usize) -> Vec<Point3<f64>> {
        (0..n).map(|i| Vec3::new(i as f64, 0.0, 0.0)).collect()
    }

    #[test]
    fn straight_tree_weight() {
        let t = VesselTree::with_straight_edges(0, pts(4), vec![None, Some(0), Some(1), Some(1)], vec![true; 4]);
        // node 3 at x=3 hangs off x=1
        let t = t.unwrap();
        assert_eq!(t.total_weight, 1.0 + 1.0 + 2.0);
        assert_eq!(t.branching_nodes(), vec![1]);
    }

    #[test]
    fn cycle_detected() {
        let r = VesselTree::with_straight_edges(0, pts(3), vec![None, Some(2), Some(1)], vec![true; 3]);
        assert!(matches!(r, Err(Error::MalformedTree(_))));
    }

    #[test]
    fn excluded_nodes_allowed() {
        let t = VesselTree::with_straight_edges(0, pts(3), vec![None, Some(0), None], vec![true, true, false]).unwrap();
        assert_eq!(t.excluded_count(), 1);
        let r = VesselTree::with_straight_edges(0, pts(3), vec![None, Some(0), None], vec![true; 3]);
        assert!(r.is_err());
    }
}
