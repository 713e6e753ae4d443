use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point3, Vec3};
use crate::scalar::Real;

/// Polyline vessel tree with a radius per node.
///
/// `radii[v]` is the radius of the vessel arriving at `v`; for the root it is the inlet
/// radius. Every node with two or more children is listed in `bifurcations`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruthTree<T> {
    pub root: usize,
    pub positions: Vec<Point3<T>>,
    pub radii: Vec<T>,
    pub parent: Vec<Option<usize>>,
    pub bifurcations: Vec<usize>,
    pub domain_size: T,
}

impl<T: Real> GroundTruthTree<T> {
    pub fn new(
        root: usize,
        positions: Vec<Point3<T>>,
        radii: Vec<T>,
        parent: Vec<Option<usize>>,
        domain_size: T,
    ) -> Result<Self> {
        let n = positions.len();
        if radii.len() != n || parent.len() != n {
            return Err(Error::MalformedTree("per-node vectors differ in length".into()));
        }
        let mut tree = Self { root, positions, radii, parent, bifurcations: Vec::new(), domain_size };
        tree.bifurcations = tree.children().iter().enumerate().filter(|(_, c)| c.len() >= 2).map(|(v, _)| v).collect();
        tree.validate()?;
        Ok(tree)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
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

    pub fn leaves(&self) -> Vec<usize> {
        self.children().iter().enumerate().filter(|(v, c)| c.is_empty() && *v != self.root).map(|(v, _)| v).collect()
    }

    /// Length of the segment ending at `v` (zero for the root).
    pub fn edge_length(&self, v: usize) -> T {
        self.parent[v].map_or(T::zero(), |p| self.positions[p].distance(self.positions[v]))
    }

    pub fn total_length(&self) -> T {
        (0..self.len()).map(|v| self.edge_length(v)).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        let bad = |msg: String| Err(Error::MalformedTree(msg));
        if self.root >= n {
            return Err(Error::IndexOutOfRange { index: self.root, len: n });
        }
        if self.parent[self.root].is_some() {
            return bad("root has a parent".into());
        }
        for v in 0..n {
            if !self.positions[v].is_finite() {
                return Err(Error::NonFinite);
            }
            if !(self.radii[v] > T::zero()) {
                return bad(format!("radius of node {v} is not positive"));
            }
            match self.parent[v] {
                None if v != self.root => return bad(format!("node {v} has no parent")),
                Some(p) if p >= n => return Err(Error::IndexOutOfRange { index: p, len: n }),
                Some(p) if self.radii[v] > self.radii[p] => {
                    return bad(format!("radius grows from node {p} to node {v}"))
                }
                _ => {}
            }
        }
        let mut depth_known = vec![false; n];
        depth_known[self.root] = true;
        for start in 0..n {
            let mut trail = Vec::new();
            let mut v = start;
            while !depth_known[v] {
                if trail.len() > n {
                    return bad(format!("cycle through node {start}"));
                }
                trail.push(v);
                v = self.parent[v].expect("checked above");
            }
            for t in trail {
                depth_known[t] = true;
            }
        }
        let ch = self.children();
        if self.bifurcations.iter().any(|&b| b >= n || ch[b].len() < 2) {
            return bad("listed bifurcation has fewer than two children".into());
        }
        Ok(())
    }
}

/// Parameters of [`generate_tree_with`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TreeGenConfig {
    pub n_leaves: usize,
    pub domain_size: f64,
    pub seed: u64,
    /// Moves each new bifurcation halfway towards a random end of its host segment.
    pub relocate_bifurcations: bool,
    pub root_radius: f64,
    /// Minimum length of a new terminal branch, as a fraction of the domain size.
    pub min_branch_fraction: f64,
    /// Minimum length of the two pieces a host segment is split into.
    pub min_piece: f64,
    /// Free border kept on each face of the domain.
    pub margin: f64,
    /// Angle between a new branch and the downstream part of its host before relocation,
    /// degrees. 90 joins at the closest point of the host.
    pub join_angle_deg: f64,
    /// Candidate terminals whose final branch angle exceeds this are redrawn, degrees.
    pub max_branch_angle_deg: f64,
}

impl Default for TreeGenConfig {
    fn default() -> Self {
        Self {
            n_leaves: 8,
            domain_size: 100.0,
            seed: 0,
            relocate_bifurcations: true,
            root_radius: 2.0,
            min_branch_fraction: 0.15,
            min_piece: 6.0,
            margin: 5.0,
            join_angle_deg: 68.0,
            max_branch_angle_deg: 110.0,
        }
    }
}

/// Grows a binary tree with `n_leaves` terminals inside `[0, domain_size]³`.
pub fn generate_tree<T: Real>(
    n_leaves: usize,
    domain_size: T,
    seed: u64,
    relocate_bifurcations: bool,
) -> Result<GroundTruthTree<T>> {
    let cfg = TreeGenConfig {
        n_leaves,
        domain_size: domain_size.as_f64(),
        seed,
        relocate_bifurcations,
        margin: TreeGenConfig::default().margin.min(domain_size.as_f64() / 10.0),
        min_piece: TreeGenConfig::default().min_piece.min(domain_size.as_f64() / 20.0),
        ..TreeGenConfig::default()
    };
    generate_tree_with(&cfg)
}

/// Each new terminal is a random point joined to the segment it reaches with the shortest
/// branch, which is split there. On the host the joint sits where the branch leaves at
/// `join_angle_deg` to the downstream direction, kept within the middle 60% of the host.
pub fn generate_tree_with<T: Real>(cfg: &TreeGenConfig) -> Result<GroundTruthTree<T>> {
    const MAX_ATTEMPTS: usize = 100_000;
    if cfg.n_leaves < 2 {
        return Err(Error::InvalidParameter(format!("n_leaves must be at least 2, got {}", cfg.n_leaves)));
    }
    let d = cfg.domain_size;
    if !(d > 2.0 * cfg.margin && cfg.margin >= 0.0) || !(cfg.root_radius > 0.0) {
        return Err(Error::InvalidParameter("domain too small for its margin, or bad root radius".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let random_point = |rng: &mut ChaCha8Rng| {
        let mut c = || rng.gen_range(cfg.margin..=d - cfg.margin);
        Vec3::new(c(), c(), c())
    };
    let min_branch = cfg.min_branch_fraction * d;
    if !(cfg.join_angle_deg > 0.0 && cfg.join_angle_deg <= 90.0) {
        return Err(Error::InvalidParameter(format!("join_angle_deg must lie in (0, 90], got {}", cfg.join_angle_deg)));
    }
    let (sin_join, cos_join) = cfg.join_angle_deg.to_radians().sin_cos();
    let max_cos = cfg.max_branch_angle_deg.to_radians().cos() - 1e-12;

    let root = random_point(&mut rng);
    let mut pos = vec![root];
    let mut parent: Vec<Option<usize>> = vec![None];
    for _ in 0..MAX_ATTEMPTS {
        let p = random_point(&mut rng);
        if p.distance(root) >= d / 3.0 {
            pos.push(p);
            parent.push(Some(0));
            break;
        }
    }
    if pos.len() < 2 {
        return Err(Error::InvalidParameter("could not place the first terminal".into()));
    }

    for _ in 1..cfg.n_leaves {
        let mut placed = false;
        for _ in 0..MAX_ATTEMPTS {
            let x = random_point(&mut rng);
            let mut best: Option<(f64, usize, Vec3<f64>)> = None;
            for v in 0..pos.len() {
                let Some(u) = parent[v] else { continue };
                let (a, b) = (pos[u], pos[v]);
                let ab = b - a;
                let len = ab.norm();
                // minimises cos(join) * s + |x - m(s)|, so the branch leaves at the join angle
                let along = (x - a).dot(ab) / len;
                let h = (x - a.lerp(b, along / len)).norm();
                let s = along - h * cos_join / sin_join;
                let m = a.lerp(b, (s / len).clamp(0.2, 0.8));
                let dist = x.distance(m);
                if best.map_or(true, |(bd, _, _)| dist < bd) {
                    best = Some((dist, v, m));
                }
            }
            let (_, v, mut m) = best.expect("tree has a segment");
            let u = parent[v].expect("segment end has a parent");
            if cfg.relocate_bifurcations {
                let end = if rng.gen_bool(0.5) { pos[u] } else { pos[v] };
                m = m.lerp(end, 0.5);
            }
            let host = (pos[v] - pos[u]).normalized().expect("segments have length");
            let branch = (x - m).normalized();
            if branch.map_or(true, |d| d.dot(host) < max_cos) {
                continue;
            }
            if x.distance(m) < min_branch || m.distance(pos[u]) < cfg.min_piece || m.distance(pos[v]) < cfg.min_piece {
                continue;
            }
            let b = pos.len();
            pos.push(m);
            parent.push(Some(u));
            parent[v] = Some(b);
            pos.push(x);
            parent.push(Some(b));
            placed = true;
            break;
        }
        if !placed {
            return Err(Error::InvalidParameter("could not place a terminal; domain too crowded".into()));
        }
    }

    let radii = murray_radii(&parent, 0, cfg.root_radius);
    GroundTruthTree::new(
        0,
        pos.into_iter().map(|p| Vec3::new(T::lit(p.x), T::lit(p.y), T::lit(p.z))).collect(),
        radii.into_iter().map(T::lit).collect(),
        parent,
        T::lit(d),
    )
}

/// `r_root · 2^(-g/3)` where `g` counts the bifurcations strictly above a node.
fn murray_radii(parent: &[Option<usize>], root: usize, root_radius: f64) -> Vec<f64> {
    let n = parent.len();
    let mut out_degree = vec![0usize; n];
    for p in parent.iter().flatten() {
        out_degree[*p] += 1;
    }
    let mut generation: Vec<Option<u32>> = vec![None; n];
    generation[root] = Some(0);
    for start in 0..n {
        let mut trail = Vec::new();
        let mut v = start;
        while generation[v].is_none() {
            trail.push(v);
            v = parent[v].expect("non-root node has a parent");
        }
        let mut g = generation[v].unwrap();
        for &t in trail.iter().rev() {
            let p = parent[t].unwrap();
            if out_degree[p] >= 2 {
                g += 1;
            }
            generation[t] = Some(g);
        }
    }
    generation.into_iter().map(|g| root_radius * (-(g.unwrap() as f64) / 3.0).exp2()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_leaves_one_bifurcation() {
        let t: GroundTruthTree<f64> = generate_tree(2, 100.0, 7, false).unwrap();
        assert_eq!(t.bifurcations.len(), 1);
        assert_eq!(t.leaves().len(), 2);
        assert_eq!(t.len(), 4);
    }

    #[test]
    fn binary_with_n_leaves() {
        for relocate in [false, true] {
            let t: GroundTruthTree<f64> = generate_tree(9, 100.0, 3, relocate).unwrap();
            assert_eq!(t.leaves().len(), 9);
            assert_eq!(t.bifurcations.len(), 8);
            assert!(t.children().iter().all(|c| c.len() <= 2));
        }
    }

    #[test]
    fn deterministic() {
        let a: GroundTruthTree<f64> = generate_tree(6, 100.0, 11, true).unwrap();
        let b: GroundTruthTree<f64> = generate_tree(6, 100.0, 11, true).unwrap();
        assert_eq!(a, b);
        let c: GroundTruthTree<f64> = generate_tree(6, 100.0, 12, true).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn radii_follow_generations() {
        let t: GroundTruthTree<f64> = generate_tree(2, 100.0, 1, false).unwrap();
        let b = t.bifurcations[0];
        assert_eq!(t.radii[t.root], 2.0);
        assert_eq!(t.radii[b], 2.0);
        for (v, p) in t.parent.iter().enumerate() {
            if *p == Some(b) {
                assert!((t.radii[v] - 2.0 * 2f64.powf(-1.0 / 3.0)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_single_leaf() {
        assert!(generate_tree::<f64>(1, 100.0, 0, false).is_err());
    }

    #[test]
    fn validation_catches_cycles_and_growth() {
        let p = vec![Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0), Vec3::new(2.0, 0.0, 0.0)];
        assert!(GroundTruthTree::new(0, p.clone(), vec![1.0; 3], vec![None, Some(2), Some(1)], 10.0).is_err());
        assert!(GroundTruthTree::new(0, p.clone(), vec![1.0, 2.0, 1.0], vec![None, Some(0), Some(1)], 10.0).is_err());
        assert!(GroundTruthTree::new(0, p, vec![1.0; 3], vec![None, Some(0), Some(1)], 10.0).is_ok());
    }
}
