//! Neighbourhood systems over oriented samples.
//!
//! Both flavours are symmetrised: a pair is kept as soon as either node lists the other
//! among its nearest neighbours.

use std::cmp::Ordering;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{OrientedSample, Point3};
use crate::scalar::Real;
use crate::spatial::KdTree;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum NeighborFlavor {
    Isotropic,
    /// Squared aspect ratio of the tangent-aligned metric.
    Anisotropic { aspect_ratio_sq: f64 },
}

/// Unordered node pairs `(u, v)` with `u < v`, sorted and free of duplicates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeighborSystem {
    pub k: usize,
    pub num_nodes: usize,
    pub pairs: Vec<(u32, u32)>,
    pub flavor: NeighborFlavor,
}

impl NeighborSystem {
    /// Builds a system from arbitrary pairs: orders each pair, drops self-pairs and
    /// duplicates.
    pub fn from_pairs(
        num_nodes: usize,
        k: usize,
        flavor: NeighborFlavor,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut out = Vec::new();
        for (u, v) in pairs {
            for idx in [u, v] {
                if idx >= num_nodes {
                    return Err(Error::IndexOutOfRange { index: idx, len: num_nodes });
                }
            }
            if u != v {
                out.push(ordered(u, v));
            }
        }
        Ok(Self::from_ordered(num_nodes, k, flavor, out))
    }

    fn from_ordered(num_nodes: usize, k: usize, flavor: NeighborFlavor, mut pairs: Vec<(u32, u32)>) -> Self {
        pairs.par_sort_unstable();
        pairs.dedup();
        Self { k, num_nodes, pairs, flavor }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.pairs.binary_search(&ordered(u, v)).is_ok()
    }

    /// Per-node adjacency lists, ascending.
    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.num_nodes];
        for &(u, v) in &self.pairs {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }
}

#[inline]
fn ordered(u: usize, v: usize) -> (u32, u32) {
    (u.min(v) as u32, u.max(v) as u32)
}

fn check_k(n: usize, k: usize, what: &str) -> Result<usize> {
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    if k == 0 {
        return Err(Error::InvalidParameter(format!("{what} must be at least 1")));
    }
    if k >= n {
        warn!("{what}={k} exceeds the {} other samples; clamping to {}", n - 1, n - 1);
        return Ok(n - 1);
    }
    Ok(k)
}

fn positions<T: Real>(samples: &[OrientedSample<T>]) -> Vec<Point3<T>> {
    samples.iter().map(|s| s.position).collect()
}

/// Symmetrised k-nearest-neighbour system under the Euclidean metric.
pub fn knn_neighbors<T: Real>(samples: &[OrientedSample<T>], k: usize) -> Result<NeighborSystem> {
    let k = check_k(samples.len(), k, "k")?;
    let pts = positions(samples);
    let tree = KdTree::new(&pts);
    let pairs: Vec<(u32, u32)> = (0..pts.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            tree.knn(pts[i], k, Some(i))
                .into_iter()
                .map(move |n| ordered(i, n.index))
        })
        .collect();
    Ok(NeighborSystem::from_ordered(samples.len(), k, NeighborFlavor::Isotropic, pairs))
}

/// Squared tangent-aligned distance from `sample` to `q`: `d∥² / ar² + d⊥²`, where `d∥` is
/// the displacement along the sample's tangent.
pub fn anisotropic_distance_sq<T: Real>(sample: &OrientedSample<T>, q: Point3<T>, aspect_ratio_sq: T) -> T {
    let d = q - sample.position;
    let along = d.dot(sample.tangent.as_vec());
    let total = d.norm_squared();
    let perp = (total - along * along).max(T::zero());
    along * along / aspect_ratio_sq + perp
}

/// Anisotropic k-nearest neighbours: `k_candidate` Euclidean candidates per node are
/// re-ranked with [`anisotropic_distance_sq`] under that node's tangent and the best
/// `k_final` kept.
pub fn anisotropic_knn<T: Real>(
    samples: &[OrientedSample<T>],
    k_final: usize,
    k_candidate: usize,
    aspect_ratio_sq: T,
) -> Result<NeighborSystem> {
    if k_candidate < k_final {
        return Err(Error::InvalidParameter(format!(
            "k_candidate ({k_candidate}) must be at least k_final ({k_final})"
        )));
    }
    if !(aspect_ratio_sq > T::zero()) {
        return Err(Error::InvalidParameter("aspect_ratio_sq must be positive".into()));
    }
    let k_final = check_k(samples.len(), k_final, "k_final")?;
    let k_candidate = check_k(samples.len(), k_candidate, "k_candidate")?;
    let pts = positions(samples);
    let tree = KdTree::new(&pts);
    let pairs: Vec<(u32, u32)> = (0..pts.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut scored: Vec<(T, usize)> = tree
                .knn(pts[i], k_candidate, Some(i))
                .into_iter()
                .map(|n| (anisotropic_distance_sq(&samples[i], pts[n.index], aspect_ratio_sq), n.index))
                .collect();
            scored.sort_by(|a, b| {
                a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1))
            });
            scored.truncate(k_final);
            scored.into_iter().map(move |(_, j)| ordered(i, j))
        })
        .collect();
    Ok(NeighborSystem::from_ordered(
        samples.len(),
        k_final,
        NeighborFlavor::Anisotropic { aspect_ratio_sq: aspect_ratio_sq.as_f64() },
        pairs,
    ))
}
