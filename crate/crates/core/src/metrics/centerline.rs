use crate::geometry::Point3;
use crate::scalar::Real;
use crate::solver::VesselTree;
use crate::synth::GroundTruthTree;

/// Read-only view of a rooted tree whose edges are curves.
///
/// Edge `v` is the curve from `parent(v)` to `v`, parameterised by arc length from the
/// parent end.
pub trait Centerline<T: Real> {
    fn num_nodes(&self) -> usize;
    fn root(&self) -> usize;
    fn parent_of(&self, v: usize) -> Option<usize>;
    /// Whether `v` belongs to the tree at all.
    fn contains(&self, v: usize) -> bool;
    fn position(&self, v: usize) -> Point3<T>;
    fn edge_length(&self, v: usize) -> T;
    fn edge_point(&self, v: usize, s: T) -> Point3<T>;
    /// Vessel radius at arc length `s` on edge `v`, if the tree carries radii.
    fn edge_radius(&self, _v: usize, _s: T) -> Option<T> {
        None
    }
    fn node_radius(&self, _v: usize) -> Option<T> {
        None
    }

    fn children_lists(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.num_nodes()];
        for v in 0..self.num_nodes() {
            if let Some(p) = self.parent_of(v) {
                ch[p].push(v);
            }
        }
        ch
    }
}

impl<T: Real> Centerline<T> for GroundTruthTree<T> {
    fn num_nodes(&self) -> usize {
        self.len()
    }
    fn root(&self) -> usize {
        self.root
    }
    fn parent_of(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }
    fn contains(&self, _v: usize) -> bool {
        true
    }
    fn position(&self, v: usize) -> Point3<T> {
        self.positions[v]
    }
    fn edge_length(&self, v: usize) -> T {
        GroundTruthTree::edge_length(self, v)
    }
    fn edge_point(&self, v: usize, s: T) -> Point3<T> {
        let p = self.parent[v].expect("edge has a parent");
        let len = GroundTruthTree::edge_length(self, v);
        self.positions[p].lerp(self.positions[v], if len > T::zero() { s / len } else { T::zero() })
    }
    fn edge_radius(&self, v: usize, s: T) -> Option<T> {
        let p = self.parent[v]?;
        let len = GroundTruthTree::edge_length(self, v);
        let f = if len > T::zero() { s / len } else { T::zero() };
        Some(self.radii[p] + (self.radii[v] - self.radii[p]) * f)
    }
    fn node_radius(&self, v: usize) -> Option<T> {
        Some(self.radii[v])
    }
}

impl<T: Real> Centerline<T> for VesselTree<T> {
    fn num_nodes(&self) -> usize {
        self.len()
    }
    fn root(&self) -> usize {
        self.root
    }
    fn parent_of(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }
    fn contains(&self, v: usize) -> bool {
        self.included[v]
    }
    fn position(&self, v: usize) -> Point3<T> {
        self.positions[v]
    }
    fn edge_length(&self, v: usize) -> T {
        self.edges[v].as_ref().map_or(T::zero(), |e| e.arc.length)
    }
    fn edge_point(&self, v: usize, s: T) -> Point3<T> {
        let arc = &self.edges[v].as_ref().expect("edge has geometry").arc;
        let f = if arc.length > T::zero() && arc.length.is_finite() { s / arc.length } else { T::zero() };
        arc.point_at(f)
    }
}

/// A resampled point and where it came from: `edge` is the child node of its edge (or the
/// node itself for node points, with `s` equal to the edge length).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResampledPoint<T> {
    pub position: Point3<T>,
    pub radius: Option<T>,
    pub edge: usize,
    pub s: T,
}

/// Every tree node plus interior points splitting each edge into equal pieces no longer
/// than `step`.
///
/// # Panics
/// If `step` is not positive.
pub fn resample_tree<T: Real, C: Centerline<T> + ?Sized>(tree: &C, step: T) -> Vec<ResampledPoint<T>> {
    assert!(step > T::zero(), "resampling step must be positive");
    let mut out = Vec::new();
    for v in 0..tree.num_nodes() {
        if tree.contains(v) {
            out.push(ResampledPoint {
                position: tree.position(v),
                radius: tree.node_radius(v),
                edge: v,
                s: tree.edge_length(v),
            });
        }
    }
    for v in 0..tree.num_nodes() {
        if !tree.contains(v) || tree.parent_of(v).is_none() {
            continue;
        }
        let len = tree.edge_length(v);
        let pieces = (len / step).ceil().to_usize().unwrap_or(1).max(1);
        for i in 1..pieces {
            let s = len * T::lit(i as f64) / T::lit(pieces as f64);
            out.push(ResampledPoint { position: tree.edge_point(v, s), radius: tree.edge_radius(v, s), edge: v, s });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;

    fn line(len: f64) -> GroundTruthTree<f64> {
        GroundTruthTree::new(0, vec![Vec3::zero(), Vec3::new(len, 0.0, 0.0)], vec![1.0, 0.5], vec![None, Some(0)], 10.0)
            .unwrap()
    }

    #[test]
    fn unit_edge_half_step_gives_three_points() {
        assert_eq!(resample_tree(&line(1.0), 0.5).len(), 3);
    }

    #[test]
    fn long_step_gives_endpoints_only() {
        assert_eq!(resample_tree(&line(1.0), 5.0).len(), 2);
    }

    #[test]
    fn radius_is_interpolated() {
        let pts = resample_tree(&line(2.0), 1.0);
        let mid = pts.iter().find(|p| p.position.x == 1.0).unwrap();
        assert_eq!(mid.radius, Some(0.75));
    }

    #[test]
    fn arc_edges_follow_geometry() {
        let pos = vec![Vec3::zero(), Vec3::new(2.0, 0.0, 0.0)];
        let arc = crate::geometry::FlowArc::fit(pos[0], crate::geometry::UnitVec3::y_axis(), pos[1]).unwrap();
        let tree = VesselTree::new(
            0,
            pos,
            vec![None, Some(0)],
            vec![true, true],
            vec![None, Some(crate::solver::TreeEdge { arc, weight: arc.length })],
        )
        .unwrap();
        let pts = resample_tree(&tree, 0.1);
        assert_eq!(pts.len(), 2 + 31);
        for p in &pts {
            assert!((p.position.distance(Vec3::new(1.0f64, 0.0, 0.0)) - 1.0).abs() < 1e-12);
        }
    }
}
