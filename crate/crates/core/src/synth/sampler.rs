use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::GroundTruthTree;
use crate::error::{Error, Result};
use crate::geometry::{OrientedSample, UnitVec3, Vec3};
use crate::scalar::Real;

/// Corruption applied when turning a tree into oriented samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplerConfig {
    /// Mean arc length between consecutive samples on an edge.
    pub spacing: f64,
    pub position_noise_std: f64,
    /// Standard deviation of the angle each tangent is tilted by.
    pub tangent_noise_std_rad: f64,
    pub orientation_flip_prob: f64,
    pub dropout_prob: f64,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            spacing: 1.0,
            position_noise_std: 0.0,
            tangent_noise_std_rad: 0.0,
            orientation_flip_prob: 0.0,
            dropout_prob: 0.0,
            seed: 0,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        let prob = |p: f64| (0.0..=1.0).contains(&p);
        if !(self.spacing > 0.0 && self.spacing.is_finite()) {
            return Err(Error::InvalidParameter(format!("spacing must be positive, got {}", self.spacing)));
        }
        if !(self.position_noise_std >= 0.0 && self.tangent_noise_std_rad >= 0.0) {
            return Err(Error::InvalidParameter("noise levels must be non-negative".into()));
        }
        if !prob(self.orientation_flip_prob) || !prob(self.dropout_prob) {
            return Err(Error::InvalidParameter("probabilities must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

/// Oriented samples along the tree, with tangents following the flow away from the root.
///
/// Every tree node is emitted first, in index order, followed by the interior samples of
/// each edge (ordered by child node). The root comes out as sample 0 when it is node 0.
/// Root and leaves are never dropped.
pub fn sample_centerline<T: Real>(tree: &GroundTruthTree<T>, cfg: &SamplerConfig) -> Result<Vec<OrientedSample<T>>> {
    cfg.validate()?;
    tree.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pos_noise = Normal::new(0.0, cfg.position_noise_std).expect("validated std");
    let ang_noise = Normal::new(0.0, cfg.tangent_noise_std_rad).expect("validated std");
    let children = tree.children();
    let p64 = |v: usize| {
        let p = tree.positions[v];
        Vec3::new(p.x.as_f64(), p.y.as_f64(), p.z.as_f64())
    };
    let flow = |v: usize| -> Vec3<f64> {
        match (tree.parent[v], children[v].first()) {
            (Some(p), _) => p64(v) - p64(p),
            (None, Some(&c)) => p64(c) - p64(v),
            (None, None) => Vec3::new(1.0, 0.0, 0.0),
        }
    };

    let mut out = Vec::new();
    let mut emit = |rng: &mut ChaCha8Rng, pos: Vec3<f64>, dir: Vec3<f64>, radius: f64, keep: bool| -> Result<()> {
        let noise = Vec3::new(pos_noise.sample(rng), pos_noise.sample(rng), pos_noise.sample(rng));
        let tilt = ang_noise.sample(rng);
        let tangent = perturb(rng, dir.normalized().ok_or(Error::NonFinite)?, tilt);
        let flip = rng.gen::<f64>() < cfg.orientation_flip_prob;
        let drop = rng.gen::<f64>() < cfg.dropout_prob;
        if keep || !drop {
            let t = if flip { tangent.flipped() } else { tangent }.as_vec();
            let q = pos + noise;
            out.push(OrientedSample::with_radius(
                Vec3::new(T::lit(q.x), T::lit(q.y), T::lit(q.z)),
                Vec3::new(T::lit(t.x), T::lit(t.y), T::lit(t.z)).normalized().ok_or(Error::NonFinite)?,
                Some(T::lit(radius)),
            )?);
        }
        Ok(())
    };

    for v in 0..tree.len() {
        let essential = v == tree.root || children[v].is_empty();
        emit(&mut rng, p64(v), flow(v), tree.radii[v].as_f64(), essential)?;
    }
    for v in 0..tree.len() {
        let Some(u) = tree.parent[v] else { continue };
        let (a, b) = (p64(u), p64(v));
        let len = a.distance(b);
        let (ra, rb) = (tree.radii[u].as_f64(), tree.radii[v].as_f64());
        let mut s = rng.gen_range(0.0..cfg.spacing);
        while s < len {
            if s > 0.0 {
                let f = s / len;
                emit(&mut rng, a.lerp(b, f), b - a, ra + (rb - ra) * f, false)?;
            }
            s += cfg.spacing;
        }
    }
    Ok(out)
}

/// Tilts `t` by `angle` about a uniformly random axis orthogonal to it.
fn perturb(rng: &mut ChaCha8Rng, t: UnitVec3<f64>, angle: f64) -> UnitVec3<f64> {
    let u1 = t.as_vec().any_orthogonal().as_vec();
    let u2 = t.as_vec().cross(u1);
    let psi = rng.gen_range(0.0..std::f64::consts::TAU);
    let k = u1 * psi.cos() + u2 * psi.sin();
    let r = t.as_vec() * angle.cos() + k.cross(t.as_vec()) * angle.sin();
    r.normalized().unwrap_or(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::generate_tree;

    fn tree() -> GroundTruthTree<f64> {
        generate_tree(5, 100.0, 4, true).unwrap()
    }

    fn on_segment(tree: &GroundTruthTree<f64>, s: &OrientedSample<f64>) -> Option<usize> {
        (0..tree.len()).find(|&v| {
            let Some(u) = tree.parent[v] else { return tree.positions[v] == s.position };
            let (a, b) = (tree.positions[u], tree.positions[v]);
            let ab = b - a;
            let t = (s.position - a).dot(ab) / ab.norm_squared();
            (-1e-12..=1.0 + 1e-12).contains(&t)
                && a.lerp(b, t).distance(s.position) < 1e-9
                && (1.0 - s.tangent.as_vec().dot(ab / ab.norm())).abs() < 1e-12
        })
    }

    #[test]
    fn clean_samples_lie_on_tree() {
        let t = tree();
        let samples = sample_centerline(&t, &SamplerConfig::default()).unwrap();
        assert!(samples.len() as f64 > t.total_length() * 0.9);
        for s in &samples {
            assert!(on_segment(&t, s).is_some(), "{s:?}");
        }
        assert_eq!(samples[0].position, t.positions[t.root]);
    }

    #[test]
    fn flips_reverse_every_tangent() {
        let t = tree();
        let clean = sample_centerline(&t, &SamplerConfig::default()).unwrap();
        let flipped =
            sample_centerline(&t, &SamplerConfig { orientation_flip_prob: 1.0, ..Default::default() }).unwrap();
        assert_eq!(clean.len(), flipped.len());
        for (a, b) in clean.iter().zip(&flipped) {
            assert!((a.tangent.dot(b.tangent) + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn full_dropout_keeps_root_and_leaves() {
        let t = tree();
        let s = sample_centerline(&t, &SamplerConfig { dropout_prob: 1.0, spacing: 1000.0, ..Default::default() })
            .unwrap();
        assert_eq!(s.len(), 1 + t.leaves().len());
    }

    #[test]
    fn tangent_noise_has_requested_spread() {
        let t = tree();
        let cfg = SamplerConfig { tangent_noise_std_rad: 0.2, ..Default::default() };
        let clean = sample_centerline(&t, &SamplerConfig::default()).unwrap();
        let noisy = sample_centerline(&t, &cfg).unwrap();
        let n = clean.len() as f64;
        let ms: f64 = clean.iter().zip(&noisy).map(|(a, b)| a.tangent.angle_to(b.tangent).powi(2)).sum::<f64>() / n;
        assert!((ms.sqrt() - 0.2).abs() < 0.03, "rms angle {}", ms.sqrt());
    }

    #[test]
    fn rejects_bad_config() {
        let t = tree();
        for cfg in [
            SamplerConfig { spacing: 0.0, ..Default::default() },
            SamplerConfig { dropout_prob: 1.5, ..Default::default() },
            SamplerConfig { tangent_noise_std_rad: -1.0, ..Default::default() },
        ] {
            assert!(sample_centerline(&t, &cfg).is_err());
        }
    }
}
