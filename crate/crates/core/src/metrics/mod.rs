//! Reconstruction quality measures against a ground-truth tree.
//!
//! Point matching uses a tolerance of `max(r, ζ)` around the ground truth, with `r` the
//! local vessel radius. Rates are returned together with the raw counts so corpora can be
//! pooled before dividing.

mod angles;
mod centerline;
mod connectivity;
mod detection;

use serde::{Deserialize, Serialize};

pub use angles::{angular_errors, bifurcation_angle, median_angular_error, BranchProbe};
pub use centerline::{resample_tree, Centerline, ResampledPoint};
pub use connectivity::{connectivity_roc, ConnectivityCounts};
pub use detection::{bifurcation_roc, centerline_roc, centerline_roc_with_step, MatchCounts};

/// Default arc-length step used when resampling trees for matching.
pub const DEFAULT_STEP: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchTolerance {
    pub zeta: f64,
    /// Widen the tolerance to the ground-truth radius where that is larger than `zeta`.
    pub uses_radius: bool,
}

impl Default for MatchTolerance {
    fn default() -> Self {
        Self { zeta: std::f64::consts::FRAC_1_SQRT_2, uses_radius: true }
    }
}

impl MatchTolerance {
    pub fn at(&self, radius: Option<f64>) -> f64 {
        match radius {
            Some(r) if self.uses_radius => r.max(self.zeta),
            _ => self.zeta,
        }
    }
}

/// One operating point of an ROC curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub threshold: f64,
    pub recall: f64,
    pub fallout: f64,
}

/// Sorts operating points by threshold (ties keep their order).
pub fn roc_curve(mut points: Vec<RocPoint>) -> Vec<RocPoint> {
    points.sort_by(|a, b| a.threshold.total_cmp(&b.threshold));
    points
}

/// Median of finite or infinite values; `None` when empty. Even counts average the two
/// middle values.
pub fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}
