use std::ops::AddAssign;

use serde::{Deserialize, Serialize};

use super::centerline::{resample_tree, Centerline};
use crate::geometry::OrientedSample;
use crate::neighbors::NeighborSystem;
use crate::scalar::Real;
use crate::spatial::KdTree;

const PROJECTION_STEP: f64 = 0.1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityCounts {
    /// Ground-truth length spanned by correct edges.
    pub covered_length: f64,
    pub total_length: f64,
    pub incorrect_edges: usize,
    pub total_edges: usize,
}

impl ConnectivityCounts {
    pub fn recall(&self) -> f64 {
        if self.total_length > 0.0 {
            self.covered_length / self.total_length
        } else {
            0.0
        }
    }

    pub fn fallout(&self) -> f64 {
        if self.total_edges > 0 {
            self.incorrect_edges as f64 / self.total_edges as f64
        } else {
            0.0
        }
    }
}

impl AddAssign for ConnectivityCounts {
    fn add_assign(&mut self, o: Self) {
        self.covered_length += o.covered_length;
        self.total_length += o.total_length;
        self.incorrect_edges += o.incorrect_edges;
        self.total_edges += o.total_edges;
    }
}

/// Scores a neighbourhood system against the ground-truth tree.
///
/// Each sample is projected to the closest ground-truth location. An edge is correct when
/// one projection lies on the root path of the other; recall is the fraction of tree
/// length covered by the paths between the ends of correct edges, fall-out the fraction of
/// incorrect edges.
pub fn connectivity_roc<T: Real>(
    gt: &impl Centerline<T>,
    neighbors: &NeighborSystem,
    samples: &[OrientedSample<T>],
) -> ConnectivityCounts {
    let n = gt.num_nodes();
    let children = gt.children_lists();
    // Euler-tour intervals for ancestor tests
    let (mut tin, mut tout) = (vec![0usize; n], vec![0usize; n]);
    let mut clock = 0;
    let mut stack = vec![(gt.root(), false)];
    while let Some((v, done)) = stack.pop() {
        if done {
            tout[v] = clock;
            clock += 1;
            continue;
        }
        tin[v] = clock;
        clock += 1;
        stack.push((v, true));
        for &c in children[v].iter().rev() {
            stack.push((c, false));
        }
    }
    let is_ancestor = |a: usize, b: usize| tin[a] <= tin[b] && tout[b] <= tout[a];

    let pts = resample_tree(gt, T::lit(PROJECTION_STEP));
    let index = KdTree::new(&pts.iter().map(|p| p.position).collect::<Vec<_>>());
    let project = |s: &OrientedSample<T>| {
        let p = pts[index.nearest(s.position).expect("tree has points").index];
        (p.edge, p.s.as_f64())
    };
    let proj: Vec<_> = samples.iter().map(project).collect();

    let len: Vec<f64> = (0..n).map(|v| gt.edge_length(v).as_f64()).collect();
    let mut spans: Vec<Vec<(f64, f64)>> = vec![Vec::new(); n];
    let mut counts = ConnectivityCounts {
        total_length: (0..n).filter(|&v| gt.contains(v)).map(|v| len[v]).sum(),
        total_edges: neighbors.len(),
        ..Default::default()
    };
    for &(a, b) in &neighbors.pairs {
        let (pa, pb) = (proj[a as usize], proj[b as usize]);
        let (up, down) = if pa.0 == pb.0 {
            if pa.1 <= pb.1 {
                (pa, pb)
            } else {
                (pb, pa)
            }
        } else if is_ancestor(pa.0, pb.0) {
            (pa, pb)
        } else if is_ancestor(pb.0, pa.0) {
            (pb, pa)
        } else {
            counts.incorrect_edges += 1;
            continue;
        };
        if up.0 == down.0 {
            spans[up.0].push((up.1, down.1));
            continue;
        }
        spans[down.0].push((0.0, down.1));
        let mut w = gt.parent_of(down.0).expect("descendant edge has a parent");
        while w != up.0 {
            spans[w].push((0.0, len[w]));
            w = gt.parent_of(w).expect("ancestor lies on the root path");
        }
        spans[up.0].push((up.1, len[up.0]));
    }
    counts.covered_length = spans.iter_mut().map(|s| union_length(s)).sum();
    counts
}

fn union_length(spans: &mut [(f64, f64)]) -> f64 {
    spans.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut total = 0.0;
    let mut cur: Option<(f64, f64)> = None;
    for &(a, b) in spans.iter() {
        cur = match cur {
            Some((ca, cb)) if a <= cb => Some((ca, cb.max(b))),
            Some((ca, cb)) => {
                total += cb - ca;
                Some((a, b))
            }
            None => Some((a, b)),
        };
    }
    total + cur.map_or(0.0, |(a, b)| b - a)
}
