//! Flow-extrapolating circular arcs.
//!
//! An arc leaves its start point along the start point's flow tangent and ends at a
//! second point. Chord length `d` and the angle `alpha` between the start tangent and
//! the chord fix everything else: the arc subtends a central angle of `2 alpha`, has
//! radius `d / (2 sin alpha)` and length `d alpha / sin alpha`, and its end tangent is
//! the start tangent reflected about the chord direction.

use serde::{Deserialize, Serialize};

use super::{clamped_acos, OrientedSample, Point3, UnitVec3, Vec3};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Oriented circular arc from `start` (leaving along `start_tangent`) to `end`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct FlowArc<T> {
    pub start: Point3<T>,
    pub start_tangent: UnitVec3<T>,
    pub end: Point3<T>,
    pub chord_len: T,
    /// Angle between the start tangent and the chord, in `[0, π]`.
    pub alpha: T,
    /// `+∞` when the arc is degenerate.
    pub length: T,
    pub end_tangent: UnitVec3<T>,
}

impl<T: Real> FlowArc<T> {
    /// Arc from `start` to `end` leaving `start` along `tangent`.
    pub fn fit(start: Point3<T>, tangent: UnitVec3<T>, end: Point3<T>) -> Result<Self> {
        let chord = end - start;
        let chord_len = chord.norm();
        if !(chord_len > T::COINCIDENT_TOLERANCE) {
            return Err(if chord_len.is_finite() {
                Error::CoincidentPoints(chord_len.as_f64())
            } else {
                Error::NonFinite
            });
        }
        let e = UnitVec3::new_unchecked(chord / chord_len);
        let alpha = tangent.angle_to(e);
        let length = if T::PI() - alpha <= T::ANTIPARALLEL_TOLERANCE {
            T::infinity()
        } else {
            chord_len * alpha_over_sin(alpha)
        };
        Ok(Self {
            start,
            start_tangent: tangent,
            end,
            chord_len,
            alpha,
            length,
            end_tangent: reflect_about(tangent, e),
        })
    }

    /// Straight segment from `start` to `end`.
    pub fn straight(start: Point3<T>, end: Point3<T>) -> Result<Self> {
        let dir = (end - start)
            .normalized()
            .ok_or_else(|| Error::CoincidentPoints((end - start).norm().as_f64()))?;
        Self::fit(start, dir, end)
    }

    /// True when the start tangent points (almost) straight away from the end point; the
    /// circle then degenerates and the length is infinite.
    pub fn is_degenerate(&self) -> bool {
        !self.length.is_finite()
    }

    /// Total turning of the tangent along the arc, `2 alpha`.
    pub fn turning_angle(&self) -> T {
        self.alpha + self.alpha
    }

    pub fn chord_dir(&self) -> UnitVec3<T> {
        UnitVec3::new_unchecked((self.end - self.start) / self.chord_len)
    }

    /// In-plane unit normal pointing from the start point towards the circle's centre.
    fn inward_normal(&self) -> Vec3<T> {
        let t = self.start_tangent.as_vec();
        let e = self.chord_dir().as_vec();
        match (e - t * t.dot(e)).normalized() {
            Some(n) => n.as_vec(),
            None => t.any_orthogonal().as_vec(),
        }
    }

    /// Point at parameter `s ∈ [0, 1]`, uniform in arc length. Degenerate arcs fall back to
    /// the chord.
    pub fn point_at(&self, s: T) -> Point3<T> {
        if self.alpha == T::zero() || self.is_degenerate() {
            return self.start.lerp(self.end, s);
        }
        let t = self.start_tangent.as_vec();
        let n = self.inward_normal();
        let (sa, ca) = (self.alpha * s).sin_cos();
        let scale = self.chord_len * sa / self.alpha.sin();
        self.start + (n * sa + t * ca) * scale
    }

    /// Unit tangent at parameter `s ∈ [0, 1]`.
    pub fn tangent_at(&self, s: T) -> UnitVec3<T> {
        if self.alpha == T::zero() || self.is_degenerate() {
            return self.chord_dir();
        }
        let t = self.start_tangent.as_vec();
        let n = self.inward_normal();
        let (s2, c2) = (self.alpha * s * T::lit(2.0)).sin_cos();
        UnitVec3::new_unchecked(t * c2 + n * s2)
    }

    /// Angle between the arc's end tangent and the flow estimate at the end point.
    pub fn confluence_angle(&self, tangent_at_end: UnitVec3<T>) -> T {
        confluence_angle(self, tangent_at_end)
    }
}

/// `alpha / sin(alpha)` with the removable singularity at zero handled.
fn alpha_over_sin<T: Real>(alpha: T) -> T {
    if alpha < T::lit(1e-4) {
        // 1 + a²/6 + 7a⁴/360
        let a2 = alpha * alpha;
        T::one() + a2 / T::lit(6.0) + T::lit(7.0) * a2 * a2 / T::lit(360.0)
    } else {
        alpha / alpha.sin()
    }
}

#[inline]
fn reflect_about<T: Real>(v: UnitVec3<T>, axis: UnitVec3<T>) -> UnitVec3<T> {
    let a = axis.as_vec();
    let r = a * (T::lit(2.0) * v.dot(axis)) - v.as_vec();
    // renormalise to keep rounding drift out of the unit invariant
    UnitVec3::new_unchecked(r / r.norm())
}

/// Fits the flow-extrapolating arc leaving `p` along its tangent and ending at `q`.
pub fn fit_arc<T: Real>(p: &OrientedSample<T>, q: Point3<T>) -> Result<FlowArc<T>> {
    FlowArc::fit(p.position, p.tangent, q)
}

/// End tangent of a circular arc: the start tangent reflected about the chord direction,
/// `2 (τ·e) e − τ`.
pub fn arc_end_tangent<T: Real>(start_tangent: Vec3<T>, chord_dir: Vec3<T>) -> Result<UnitVec3<T>> {
    let t = UnitVec3::try_from(start_tangent)?;
    let e = UnitVec3::try_from(chord_dir)?;
    Ok(reflect_about(t, e))
}

/// Angle in `[0, π]` between the arc's end tangent and `tangent_at_end`.
pub fn confluence_angle<T: Real>(arc: &FlowArc<T>, tangent_at_end: UnitVec3<T>) -> T {
    arc.end_tangent.angle_to(tangent_at_end)
}

/// Directed arc cost: `length + λ·2α` when the arc is ε-confluent with the flow estimate at
/// its end, `+∞` otherwise (and for degenerate arcs).
pub fn arc_weight<T: Real>(
    arc: &FlowArc<T>,
    tangent_at_end: UnitVec3<T>,
    epsilon: T,
    elastic_lambda: T,
) -> T {
    if arc.is_degenerate() || confluence_angle(arc, tangent_at_end) > epsilon {
        return T::infinity();
    }
    if elastic_lambda == T::zero() {
        arc.length
    } else {
        arc.length + elastic_lambda * arc.turning_angle()
    }
}

/// Line angle in `[0, π/2]` between the circle through `p` and `q` tangent to the
/// (unoriented) line of `p`'s tangent, and the unoriented tangent line at `q`.
pub fn cocircularity_angle<T: Real>(p: &OrientedSample<T>, q: &OrientedSample<T>) -> Result<T> {
    let arc = fit_arc(p, q.position)?;
    let theta = clamped_acos(arc.end_tangent.dot(q.tangent));
    Ok(theta.min(T::PI() - theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn sample(p: [f64; 3], t: [f64; 3]) -> OrientedSample<f64> {
        let t = Vec3::new(t[0], t[1], t[2]).normalized().unwrap();
        OrientedSample::new(Vec3::new(p[0], p[1], p[2]), t).unwrap()
    }

    #[test]
    fn straight_arc() {
        let p = sample([0.0; 3], [1.0, 0.0, 0.0]);
        let arc = fit_arc(&p, Vec3::new(2.0, 0.0, 0.0)).unwrap();
        assert_eq!(arc.alpha, 0.0);
        assert_eq!(arc.length, 2.0);
        assert_eq!(arc.end_tangent, UnitVec3::x_axis());
    }

    #[test]
    fn semicircle_arc() {
        let p = sample([0.0; 3], [0.0, 1.0, 0.0]);
        let arc = fit_arc(&p, Vec3::new(2.0, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(arc.alpha, PI / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(arc.length, PI, epsilon = 1e-12);
        let et = arc.end_tangent.as_vec();
        assert_abs_diff_eq!(et.x, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(et.y, -1.0, epsilon = 1e-15);
        // top of the semicircle sits at (1, 1, 0)
        let mid = arc.point_at(0.5);
        assert_abs_diff_eq!(mid.x, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mid.y, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn coincident_points_rejected() {
        let p = sample([1.0, 2.0, 3.0], [1.0, 0.0, 0.0]);
        assert!(matches!(
            fit_arc(&p, Vec3::new(1.0, 2.0, 3.0)),
            Err(Error::CoincidentPoints(_))
        ));
    }

    #[test]
    fn antiparallel_is_degenerate() {
        let p = sample([0.0; 3], [-1.0, 0.0, 0.0]);
        let arc = fit_arc(&p, Vec3::new(3.0, 0.0, 0.0)).unwrap();
        assert!(arc.is_degenerate());
        assert_eq!(arc.length, f64::INFINITY);
        let w = arc_weight(&arc, UnitVec3::x_axis().flipped(), PI, 0.0);
        assert_eq!(w, f64::INFINITY);
    }

    #[test]
    fn major_arc_keeps_closed_form() {
        // tangent pointing partly away from q: alpha > π/2, longer than a semicircle
        let p = sample([0.0; 3], [-1.0, 1.0, 0.0]);
        let arc = fit_arc(&p, Vec3::new(2.0, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(arc.alpha, 0.75 * PI, epsilon = 1e-12);
        assert!(arc.length > PI);
        assert_abs_diff_eq!(arc.length, 2.0 * 0.75 * PI / (0.75 * PI).sin(), epsilon = 1e-12);
    }

    #[test]
    fn end_tangent_reflection_cases() {
        let e = Vec3::new(0.0, 0.0, 1.0);
        assert_eq!(arc_end_tangent(e, e).unwrap().as_vec(), e);
        let t = Vec3::new(1.0, 0.0, 0.0);
        let r = arc_end_tangent(t, e).unwrap().as_vec();
        assert_abs_diff_eq!(r.x, -1.0);
        assert!(matches!(
            arc_end_tangent(Vec3::new(2.0, 0.0, 0.0), e),
            Err(Error::NotUnit(_))
        ));
    }

    #[test]
    fn confluence_angle_extremes() {
        let p = sample([0.0; 3], [1.0, 0.0, 0.0]);
        let arc = fit_arc(&p, Vec3::new(1.0, 0.0, 0.0)).unwrap();
        assert_eq!(arc.confluence_angle(UnitVec3::x_axis()), 0.0);
        assert_abs_diff_eq!(arc.confluence_angle(-UnitVec3::x_axis()), PI, epsilon = 1e-15);
    }

    #[test]
    fn weight_branches() {
        let p = sample([0.0; 3], [0.0, 1.0, 0.0]);
        let arc = fit_arc(&p, Vec3::new(2.0, 0.0, 0.0)).unwrap();
        let end = arc.end_tangent;
        assert_abs_diff_eq!(arc_weight(&arc, end, PI / 2.0, 0.0), PI, epsilon = 1e-12);
        // semicircle turns by π: elastic term adds λπ
        assert_abs_diff_eq!(arc_weight(&arc, end, PI / 2.0, 1.0), 2.0 * PI, epsilon = 1e-12);
        assert_eq!(arc_weight(&arc, end.flipped(), PI / 2.0, 0.0), f64::INFINITY);
    }

    #[test]
    fn cocircular_pair_is_zero_and_flip_invariant() {
        // both points on the unit circle in the xy-plane, tangents along the circle
        let p = sample([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
        let q = sample([0.0, 1.0, 0.0], [-1.0, 0.0, 0.0]);
        assert_abs_diff_eq!(cocircularity_angle(&p, &q).unwrap(), 0.0, epsilon = 1e-7);
        let q2 = sample([0.0, 1.0, 0.0], [-1.0, 0.3, 0.2]);
        let base = cocircularity_angle(&p, &q2).unwrap();
        assert_abs_diff_eq!(cocircularity_angle(&p.flipped(), &q2).unwrap(), base, epsilon = 1e-12);
        assert_abs_diff_eq!(cocircularity_angle(&p, &q2.flipped()).unwrap(), base, epsilon = 1e-12);
    }

    #[test]
    fn works_in_single_precision() {
        let t = Vec3::new(0.0f32, 1.0, 0.0).normalized().unwrap();
        let p = OrientedSample::new(Vec3::new(0.0f32, 0.0, 0.0), t).unwrap();
        let arc = fit_arc(&p, Vec3::new(2.0, 0.0, 0.0)).unwrap();
        assert!((arc.length - std::f32::consts::PI).abs() < 1e-5);
    }
}
