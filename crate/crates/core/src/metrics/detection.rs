use std::ops::AddAssign;

use serde::{Deserialize, Serialize};

use super::centerline::{resample_tree, Centerline};
use super::{MatchTolerance, DEFAULT_STEP};
use crate::geometry::Point3;
use crate::scalar::Real;
use crate::spatial::KdTree;

/// Raw counts behind a recall / fall-out pair.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchCounts {
    pub gt_total: usize,
    pub gt_matched: usize,
    pub recon_total: usize,
    pub recon_unmatched: usize,
}

impl MatchCounts {
    /// `None` when there is nothing to recall.
    pub fn recall(&self) -> Option<f64> {
        (self.gt_total > 0).then(|| self.gt_matched as f64 / self.gt_total as f64)
    }

    /// Zero for an empty reconstruction.
    pub fn fallout(&self) -> f64 {
        if self.recon_total == 0 {
            0.0
        } else {
            self.recon_unmatched as f64 / self.recon_total as f64
        }
    }
}

impl AddAssign for MatchCounts {
    fn add_assign(&mut self, o: Self) {
        self.gt_total += o.gt_total;
        self.gt_matched += o.gt_matched;
        self.recon_total += o.recon_total;
        self.recon_unmatched += o.recon_unmatched;
    }
}

/// Matches reconstruction points against ground-truth points carrying their own tolerance.
fn match_points<T: Real>(gt: &[(Point3<T>, f64)], recon: &[Point3<T>]) -> MatchCounts {
    let mut counts = MatchCounts { gt_total: gt.len(), recon_total: recon.len(), ..Default::default() };
    if gt.is_empty() || recon.is_empty() {
        counts.recon_unmatched = if gt.is_empty() { recon.len() } else { 0 };
        return counts;
    }
    let recon_index = KdTree::new(recon);
    counts.gt_matched = gt
        .iter()
        .filter(|(p, tol)| recon_index.nearest(*p).is_some_and(|n| n.dist2.as_f64().sqrt() <= *tol))
        .count();
    let gt_points: Vec<_> = gt.iter().map(|g| g.0).collect();
    let gt_index = KdTree::new(&gt_points);
    let max_tol = gt.iter().map(|g| g.1).fold(0.0, f64::max);
    counts.recon_unmatched = recon
        .iter()
        .filter(|r| {
            !gt_index
                .within(**r, T::lit(max_tol * max_tol))
                .iter()
                .any(|n| n.dist2.as_f64().sqrt() <= gt[n.index].1)
        })
        .count();
    counts
}

/// Centerline recall and fall-out with both trees resampled at the default step.
pub fn centerline_roc<T: Real>(
    gt: &impl Centerline<T>,
    recon: &impl Centerline<T>,
    tol: MatchTolerance,
) -> MatchCounts {
    centerline_roc_with_step(gt, recon, tol, T::lit(DEFAULT_STEP))
}

pub fn centerline_roc_with_step<T: Real>(
    gt: &impl Centerline<T>,
    recon: &impl Centerline<T>,
    tol: MatchTolerance,
    step: T,
) -> MatchCounts {
    let gt_pts: Vec<_> = resample_tree(gt, step)
        .into_iter()
        .map(|p| (p.position, tol.at(p.radius.map(|r| r.as_f64()))))
        .collect();
    let recon_pts: Vec<_> = resample_tree(recon, step).into_iter().map(|p| p.position).collect();
    match_points(&gt_pts, &recon_pts)
}

/// Recall and fall-out of ground-truth bifurcations against reconstruction branching nodes
/// (out-degree of at least two).
pub fn bifurcation_roc<T: Real>(
    gt: &impl Centerline<T>,
    recon: &impl Centerline<T>,
    tol: MatchTolerance,
) -> MatchCounts {
    let branching = |c: &dyn Fn(usize) -> bool, ch: Vec<Vec<usize>>| -> Vec<usize> {
        ch.iter().enumerate().filter(|(v, k)| c(*v) && k.len() >= 2).map(|(v, _)| v).collect()
    };
    let gt_pts: Vec<_> = branching(&|v| gt.contains(v), gt.children_lists())
        .into_iter()
        .map(|v| (gt.position(v), tol.at(gt.node_radius(v).map(|r| r.as_f64()))))
        .collect();
    let recon_pts: Vec<_> = branching(&|v| recon.contains(v), recon.children_lists())
        .into_iter()
        .map(|v| recon.position(v))
        .collect();
    match_points(&gt_pts, &recon_pts)
}
