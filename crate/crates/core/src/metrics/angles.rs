use serde::{Deserialize, Serialize};

use super::centerline::Centerline;
use super::median;
use crate::geometry::{Point3, Vec3};
use crate::scalar::Real;
use crate::spatial::KdTree;

/// Stretch of a child branch, in arc length from the branching node, whose chord gives the
/// branch direction. The walk stops early at the next branching node or leaf.
///
/// Defaults to the first unit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchProbe {
    pub start: f64,
    pub end: f64,
}

impl BranchProbe {
    /// First unit of each child branch.
    pub const FIRST_UNIT: Self = Self { start: 0.0, end: 1.0 };
}

impl Default for BranchProbe {
    fn default() -> Self {
        Self::FIRST_UNIT
    }
}

/// Point at arc length `dist` along the branch that leaves `node` through `child`.
fn along_branch<T: Real, C: Centerline<T> + ?Sized>(
    tree: &C,
    children: &[Vec<usize>],
    child: usize,
    mut dist: T,
) -> Point3<T> {
    let mut v = child;
    loop {
        let len = tree.edge_length(v);
        if dist <= len {
            return tree.edge_point(v, dist);
        }
        if children[v].len() != 1 {
            return tree.position(v);
        }
        dist -= len;
        v = children[v][0];
    }
}

fn branch_direction<T: Real, C: Centerline<T> + ?Sized>(
    tree: &C,
    children: &[Vec<usize>],
    node: usize,
    child: usize,
    probe: BranchProbe,
) -> Option<Vec3<T>> {
    let a = along_branch(tree, children, child, T::lit(probe.start));
    let b = along_branch(tree, children, child, T::lit(probe.end));
    let d = b - a;
    if d.norm() > T::COINCIDENT_TOLERANCE {
        Some(d)
    } else {
        Some(b - tree.position(node)).filter(|d| d.norm() > T::COINCIDENT_TOLERANCE)
    }
}

/// Angle between the outgoing directions of two child branches of `node`, in radians.
/// With more than two children the most widely separated pair is used. `None` for nodes
/// with fewer than two children.
pub fn bifurcation_angle<T: Real, C: Centerline<T> + ?Sized>(tree: &C, node: usize, probe: BranchProbe) -> Option<f64> {
    let children = tree.children_lists();
    angle_with_children(tree, &children, node, probe)
}

fn angle_with_children<T: Real, C: Centerline<T> + ?Sized>(
    tree: &C,
    children: &[Vec<usize>],
    node: usize,
    probe: BranchProbe,
) -> Option<f64> {
    let dirs: Vec<_> = children[node]
        .iter()
        .filter_map(|&c| branch_direction(tree, children, node, c, probe))
        .filter_map(|d| d.normalized())
        .collect();
    let mut best: Option<f64> = None;
    for i in 0..dirs.len() {
        for j in i + 1..dirs.len() {
            let a = dirs[i].angle_to(dirs[j]).as_f64();
            if best.map_or(true, |b| a > b) {
                best = Some(a);
            }
        }
    }
    best
}

/// Median over ground-truth bifurcations of the absolute difference between its angle and
/// the angle at the closest reconstruction branching node, however far away.
///
/// `None` when the ground truth has no bifurcation; `+∞` when the reconstruction has no
/// branching node.
pub fn median_angular_error<T: Real>(
    gt: &impl Centerline<T>,
    recon: &impl Centerline<T>,
    probe: BranchProbe,
) -> Option<f64> {
    Some(median(angular_errors(gt, recon, probe)?).expect("non-empty"))
}

/// Per-bifurcation errors behind [`median_angular_error`], in ground-truth node order.
pub fn angular_errors<T: Real>(
    gt: &impl Centerline<T>,
    recon: &impl Centerline<T>,
    probe: BranchProbe,
) -> Option<Vec<f64>> {
    let gt_children = gt.children_lists();
    let gt_bif: Vec<usize> =
        (0..gt.num_nodes()).filter(|&v| gt.contains(v) && gt_children[v].len() >= 2).collect();
    if gt_bif.is_empty() {
        return None;
    }
    let rc = recon.children_lists();
    let branching: Vec<usize> = (0..recon.num_nodes()).filter(|&v| recon.contains(v) && rc[v].len() >= 2).collect();
    if branching.is_empty() {
        return Some(vec![f64::INFINITY; gt_bif.len()]);
    }
    let index = KdTree::new(&branching.iter().map(|&v| recon.position(v)).collect::<Vec<_>>());
    Some(
        gt_bif
            .iter()
            .map(|&b| {
                let m = branching[index.nearest(gt.position(b)).expect("non-empty index").index];
                match (angle_with_children(gt, &gt_children, b, probe), angle_with_children(recon, &rc, m, probe)) {
                    (Some(x), Some(y)) => (x - y).abs(),
                    _ => f64::INFINITY,
                }
            })
            .collect(),
    )
}
