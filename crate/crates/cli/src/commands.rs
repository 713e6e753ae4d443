//! The work behind each subcommand, usable without going through the argument parser.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use confluent_core::formats;
use confluent_core::graph::{build_confluent_graph, build_geodesic_graph, TubularGraph};
use confluent_core::metrics::{
    angular_errors, bifurcation_roc, centerline_roc_with_step, connectivity_roc, median, ConnectivityCounts,
    MatchCounts,
};
use confluent_core::neighbors::{anisotropic_knn, knn_neighbors, NeighborSystem};
use confluent_core::solver::{minimum_arborescence, minimum_spanning_tree};
use confluent_core::spatial::KdTree;
use confluent_core::synth::{generate_tree_with, sample_centerline, SamplerConfig, TreeGenConfig};
use confluent_core::{GroundTruthTree, OrientedSample, Vec3, VesselTree};
use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{EvalConfig, Flavor, GraphConfig, GraphMode, PipelineConfig, RootSelector};
use crate::corpus::{derive_seed, pair_entries, read_with, write_json, write_with, Entry, Manifest};
use crate::report::{read_csv, write_csv, CompareRow, RocRow, SummaryRow, ALL};

pub const GROUND_TRUTH: &str = "ground-truth";
pub const RECONSTRUCTION: &str = "reconstruction";
pub const NEIGHBORS: &str = "neighbors";

pub const SUMMARY_CSV: &str = "summary.csv";
pub const ROC_CSV: &str = "roc.csv";

// ---------------------------------------------------------------- synth

/// Generates `cfg.corpus.trees` ground-truth trees and their sample clouds under `out`.
pub fn synth(cfg: &PipelineConfig, out: &Path) -> Result<Manifest> {
    ensure!(cfg.corpus.trees > 0, "corpus needs at least one tree");
    cfg.sampler.validate()?;
    let entries: Vec<Entry> = (0..cfg.corpus.trees)
        .into_par_iter()
        .map(|i| {
            let name = format!("tree_{i:03}");
            let tree_seed = derive_seed(cfg.corpus.seed, i, 0);
            let sampler_seed = derive_seed(cfg.corpus.seed, i, 1);
            let tree: GroundTruthTree = generate_tree_with(&TreeGenConfig { seed: tree_seed, ..cfg.generator.clone() })?;
            let samples = sample_centerline(&tree, &SamplerConfig { seed: sampler_seed, ..cfg.sampler.clone() })?;
            let (file, points) = (format!("{name}.gt"), format!("{name}.pts"));
            write_with(&out.join(&file), |w| formats::write_ground_truth(w, &tree))?;
            write_with(&out.join(&points), |w| formats::write_points(w, &samples))?;
            let r = tree.positions[tree.root];
            Ok(Entry {
                name,
                file,
                points: Some(points),
                root_position: Some([r.x, r.y, r.z]),
                tree_seed: Some(tree_seed),
                sampler_seed: Some(sampler_seed),
            })
        })
        .collect::<Result<_>>()?;
    let config = serde_json::json!({ "corpus": cfg.corpus, "generator": cfg.generator, "sampler": cfg.sampler });
    let manifest = Manifest { kind: GROUND_TRUTH.into(), config, entries };
    manifest.write(out)?;
    info!("wrote {} trees to {}", manifest.entries.len(), out.display());
    Ok(manifest)
}

// ---------------------------------------------------------------- reconstruct

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconStats {
    pub nodes: usize,
    /// Arcs (confluent) or edges (geodesic) of the tubular graph.
    pub arcs: usize,
    pub excluded: usize,
    pub total_weight: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

pub fn neighbor_system(samples: &[OrientedSample], g: &GraphConfig) -> Result<NeighborSystem> {
    Ok(match g.flavor {
        Flavor::Isotropic => knn_neighbors(samples, g.k)?,
        Flavor::Anisotropic => anisotropic_knn(samples, g.k_final, g.k, g.aspect_ratio_sq)?,
    })
}

pub fn tubular_graph(samples: &[OrientedSample], neighbors: &NeighborSystem, g: &GraphConfig) -> Result<TubularGraph<f64>> {
    Ok(match g.mode {
        GraphMode::Confluent => {
            TubularGraph::Confluent(build_confluent_graph(samples, neighbors, g.epsilon, g.elastic_lambda)?)
        }
        GraphMode::Geodesic => TubularGraph::Geodesic(build_geodesic_graph(samples, neighbors, g.tangents.into())?),
    })
}

pub fn resolve_root(samples: &[OrientedSample], root: Option<RootSelector>) -> Result<usize> {
    match root {
        Some(RootSelector::Index(i)) => {
            ensure!(i < samples.len(), "root index {i} out of range for {} samples", samples.len());
            Ok(i)
        }
        Some(RootSelector::Nearest([x, y, z])) => {
            let pts: Vec<_> = samples.iter().map(|s| s.position).collect();
            let hit = KdTree::new(&pts).nearest(Vec3::new(x, y, z)).context("no samples to root the tree at")?;
            Ok(hit.index)
        }
        None => bail!("no root given: pass a root index or root coordinates"),
    }
}

/// Algorithm 1 from samples to tree: neighbours, tubular graph, optimal tree.
pub fn reconstruct(samples: &[OrientedSample], root: usize, g: &GraphConfig) -> Result<(VesselTree, ReconStats)> {
    g.validate()?;
    ensure!(samples.len() >= 2, "need at least two samples, got {}", samples.len());
    let start = Instant::now();
    let neighbors = neighbor_system(samples, g)?;
    let (tree, arcs) = match tubular_graph(samples, &neighbors, g)? {
        TubularGraph::Confluent(graph) => (minimum_arborescence(&graph, root)?, graph.arcs.len()),
        TubularGraph::Geodesic(graph) => (minimum_spanning_tree(&graph, root)?, graph.edges.len()),
    };
    let stats = ReconStats {
        nodes: samples.len(),
        arcs,
        excluded: tree.excluded_count(),
        total_weight: tree.total_weight,
        wall_time_s: Some(start.elapsed().as_secs_f64()),
    };
    Ok((tree, stats))
}

fn stats_path(tree_path: &Path) -> PathBuf {
    let mut name = tree_path.file_name().unwrap_or_default().to_os_string();
    name.push(".stats.json");
    tree_path.with_file_name(name)
}

fn write_reconstruction(path: &Path, tree: &VesselTree, mut stats: ReconStats, omit_timing: bool) -> Result<ReconStats> {
    if omit_timing {
        stats.wall_time_s = None;
    }
    write_with(path, |w| formats::write_tree(w, tree))?;
    write_json(&stats_path(path), &stats)?;
    Ok(stats)
}

pub fn reconstruct_file(points: &Path, out: &Path, g: &GraphConfig, omit_timing: bool) -> Result<ReconStats> {
    let samples: Vec<OrientedSample> = read_with(points, formats::read_points)?;
    ensure!(!samples.is_empty(), "{} holds no samples", points.display());
    let root = resolve_root(&samples, g.root)?;
    let (tree, stats) = reconstruct(&samples, root, g)?;
    write_reconstruction(out, &tree, stats, omit_timing)
}

/// Reconstructs every cloud of a ground-truth corpus. Without an explicit root selector
/// each tree is rooted at the sample nearest the recorded root location.
pub fn reconstruct_corpus(corpus: &Path, out: &Path, g: &GraphConfig, omit_timing: bool) -> Result<Manifest> {
    let manifest = Manifest::read(corpus)?;
    manifest.expect_kind(GROUND_TRUTH, corpus)?;
    let entries: Vec<Entry> = manifest
        .entries
        .par_iter()
        .map(|e| {
            let points = e.points.as_deref().with_context(|| format!("entry {} lists no point file", e.name))?;
            let samples: Vec<OrientedSample> = read_with(&corpus.join(points), formats::read_points)?;
            let selector = g.root.or(e.root_position.map(RootSelector::Nearest));
            let root = resolve_root(&samples, selector).with_context(|| format!("rooting {}", e.name))?;
            let (tree, stats) = reconstruct(&samples, root, g).with_context(|| format!("reconstructing {}", e.name))?;
            let file = format!("{}.tree", e.name);
            write_reconstruction(&out.join(&file), &tree, stats, omit_timing)?;
            Ok(Entry { name: e.name.clone(), file, points: None, root_position: None, tree_seed: None, sampler_seed: None })
        })
        .collect::<Result<_>>()?;
    let result = Manifest { kind: RECONSTRUCTION.into(), config: serde_json::to_value(g)?, entries };
    result.write(out)?;
    Ok(result)
}

// ---------------------------------------------------------------- graph-dump

/// Writes the neighbour system and, if requested, the tubular graph's arcs.
pub fn graph_dump_file(points: &Path, neighbors_out: &Path, arcs_out: Option<&Path>, g: &GraphConfig) -> Result<()> {
    g.validate()?;
    let samples: Vec<OrientedSample> = read_with(points, formats::read_points)?;
    let neighbors = neighbor_system(&samples, g)?;
    write_with(neighbors_out, |w| formats::write_neighbors(w, &neighbors))?;
    if let Some(path) = arcs_out {
        match tubular_graph(&samples, &neighbors, g)? {
            TubularGraph::Confluent(graph) => write_with(path, |w| formats::write_confluent_arcs(w, &graph))?,
            TubularGraph::Geodesic(graph) => write_with(path, |w| formats::write_geodesic_edges(w, &graph))?,
        }
    }
    Ok(())
}

/// Neighbour systems (and arcs when `with_arcs`) for every cloud of a ground-truth corpus.
pub fn graph_dump_corpus(corpus: &Path, out: &Path, g: &GraphConfig, with_arcs: bool) -> Result<Manifest> {
    let manifest = Manifest::read(corpus)?;
    manifest.expect_kind(GROUND_TRUTH, corpus)?;
    let entries: Vec<Entry> = manifest
        .entries
        .par_iter()
        .map(|e| {
            let points = e.points.as_deref().with_context(|| format!("entry {} lists no point file", e.name))?;
            let file = format!("{}.nbr", e.name);
            let arcs = out.join(format!("{}.arcs", e.name));
            graph_dump_file(&corpus.join(points), &out.join(&file), with_arcs.then_some(arcs.as_path()), g)?;
            Ok(Entry { name: e.name.clone(), file, points: None, root_position: None, tree_seed: None, sampler_seed: None })
        })
        .collect::<Result<_>>()?;
    let result = Manifest { kind: NEIGHBORS.into(), config: serde_json::to_value(g)?, entries };
    result.write(out)?;
    Ok(result)
}

// ---------------------------------------------------------------- evaluate

/// Everything measured on one ground-truth / reconstruction pair, kept as raw counts so
/// trees can be pooled.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeEvaluation {
    pub centerline: MatchCounts,
    pub bifurcation: MatchCounts,
    /// Per ground-truth bifurcation, radians; `None` without bifurcations.
    pub angle_errors: Option<Vec<f64>>,
    pub connectivity: Option<ConnectivityCounts>,
    /// `(zeta, centerline, bifurcation)` per swept tolerance.
    pub sweep: Vec<(f64, MatchCounts, MatchCounts)>,
}

pub fn evaluate_pair(
    gt: &GroundTruthTree,
    recon: &VesselTree,
    connectivity: Option<(&[OrientedSample], &NeighborSystem)>,
    ev: &EvalConfig,
) -> Result<TreeEvaluation> {
    ev.validate()?;
    let tol = ev.tolerance(ev.zeta);
    let sweep = ev
        .sweep
        .iter()
        .map(|&z| {
            let t = ev.tolerance(z);
            (z, centerline_roc_with_step(gt, recon, t, ev.step), bifurcation_roc(gt, recon, t))
        })
        .collect();
    let connectivity = match connectivity {
        Some((samples, neighbors)) => {
            ensure!(
                neighbors.num_nodes == samples.len(),
                "neighbour system covers {} nodes but the cloud has {}",
                neighbors.num_nodes,
                samples.len()
            );
            Some(connectivity_roc(gt, neighbors, samples))
        }
        None => None,
    };
    Ok(TreeEvaluation {
        centerline: centerline_roc_with_step(gt, recon, tol, ev.step),
        bifurcation: bifurcation_roc(gt, recon, tol),
        angle_errors: angular_errors(gt, recon, ev.probe()),
        connectivity,
        sweep,
    })
}

/// Sums the counts of several evaluations and pools their angle errors.
pub fn pool(evals: &[TreeEvaluation]) -> TreeEvaluation {
    let mut total = TreeEvaluation {
        centerline: MatchCounts::default(),
        bifurcation: MatchCounts::default(),
        angle_errors: None,
        connectivity: None,
        sweep: evals.first().map_or(Vec::new(), |e| {
            e.sweep.iter().map(|(z, _, _)| (*z, MatchCounts::default(), MatchCounts::default())).collect()
        }),
    };
    for e in evals {
        total.centerline += e.centerline;
        total.bifurcation += e.bifurcation;
        if let Some(errs) = &e.angle_errors {
            total.angle_errors.get_or_insert_with(Vec::new).extend(errs);
        }
        if let Some(c) = e.connectivity {
            *total.connectivity.get_or_insert_with(ConnectivityCounts::default) += c;
        }
        for (acc, (_, c, b)) in total.sweep.iter_mut().zip(&e.sweep) {
            acc.1 += *c;
            acc.2 += *b;
        }
    }
    total
}

impl TreeEvaluation {
    pub fn median_angular_error_deg(&self) -> Option<f64> {
        self.angle_errors.clone().and_then(median).map(f64::to_degrees)
    }

    pub fn summary(&self, tree: &str) -> SummaryRow {
        SummaryRow {
            tree: tree.into(),
            centerline_recall: self.centerline.recall(),
            centerline_fallout: self.centerline.fallout(),
            bifurcation_recall: self.bifurcation.recall(),
            bifurcation_fallout: self.bifurcation.fallout(),
            gt_bifurcations: self.bifurcation.gt_total,
            recon_branching: self.bifurcation.recon_total,
            angular_error_deg: self.median_angular_error_deg(),
            connectivity_recall: self.connectivity.map(|c| c.recall()),
            connectivity_fallout: self.connectivity.map(|c| c.fallout()),
        }
    }

    pub fn roc_rows(&self, tree: &str) -> Vec<RocRow> {
        let row = |metric: &str, threshold: f64, m: &MatchCounts| RocRow {
            tree: tree.into(),
            metric: metric.into(),
            threshold,
            recall: m.recall(),
            fallout: m.fallout(),
            gt_total: m.gt_total,
            gt_matched: m.gt_matched,
            recon_total: m.recon_total,
            recon_unmatched: m.recon_unmatched,
        };
        let mut rows: Vec<RocRow> = self.sweep.iter().map(|(z, c, _)| row("centerline", *z, c)).collect();
        rows.extend(self.sweep.iter().map(|(z, _, b)| row("bifurcation", *z, b)));
        rows
    }
}

/// Reads the optional neighbour system for `name` from a neighbours corpus.
fn neighbors_for(dir: &Path, manifest: &Manifest, name: &str) -> Result<NeighborSystem> {
    let e = manifest
        .entries
        .iter()
        .find(|e| e.name == name)
        .with_context(|| format!("no neighbour system for {name} in {}", dir.display()))?;
    read_with(&dir.join(&e.file), formats::read_neighbors)
}

/// Evaluates a reconstruction corpus against its ground truth and writes `summary.csv`
/// and `roc.csv` (per tree, then pooled) into `out`.
pub fn evaluate_corpus(gt_dir: &Path, recon_dir: &Path, neighbors_dir: Option<&Path>, out: &Path, ev: &EvalConfig) -> Result<Vec<SummaryRow>> {
    let gt = Manifest::read(gt_dir)?;
    gt.expect_kind(GROUND_TRUTH, gt_dir)?;
    let recon = Manifest::read(recon_dir)?;
    recon.expect_kind(RECONSTRUCTION, recon_dir)?;
    let nbr = neighbors_dir
        .map(|d| -> Result<_> {
            let m = Manifest::read(d)?;
            m.expect_kind(NEIGHBORS, d)?;
            Ok((d, m))
        })
        .transpose()?;
    let pairs = pair_entries(&gt, &recon)?;
    let evals: Vec<(String, TreeEvaluation)> = pairs
        .par_iter()
        .map(|(g, r)| {
            let truth: GroundTruthTree = read_with(&gt_dir.join(&g.file), formats::read_ground_truth)?;
            let tree: VesselTree = read_with(&recon_dir.join(&r.file), formats::read_tree)?;
            let conn = match &nbr {
                Some((dir, m)) => {
                    let points = g.points.as_deref().with_context(|| format!("entry {} lists no point file", g.name))?;
                    let samples: Vec<OrientedSample> = read_with(&gt_dir.join(points), formats::read_points)?;
                    Some((samples, neighbors_for(dir, m, &g.name)?))
                }
                None => None,
            };
            let conn_ref = conn.as_ref().map(|(s, n)| (s.as_slice(), n));
            let e = evaluate_pair(&truth, &tree, conn_ref, ev).with_context(|| format!("evaluating {}", g.name))?;
            Ok((g.name.clone(), e))
        })
        .collect::<Result<_>>()?;
    let pooled = pool(&evals.iter().map(|(_, e)| e.clone()).collect::<Vec<_>>());
    let mut summary: Vec<SummaryRow> = evals.iter().map(|(n, e)| e.summary(n)).collect();
    summary.push(pooled.summary(ALL));
    let mut roc: Vec<RocRow> = evals.iter().flat_map(|(n, e)| e.roc_rows(n)).collect();
    roc.extend(pooled.roc_rows(ALL));
    write_csv(&out.join(SUMMARY_CSV), &summary)?;
    write_csv(&out.join(ROC_CSV), &roc)?;
    Ok(summary)
}

/// Single-pair variant of [`evaluate_corpus`]. Connectivity needs both the cloud and its
/// neighbour system.
pub fn evaluate_files(
    gt: &Path,
    recon: &Path,
    connectivity: Option<(&Path, &Path)>,
    out: &Path,
    ev: &EvalConfig,
) -> Result<SummaryRow> {
    let truth: GroundTruthTree = read_with(gt, formats::read_ground_truth)?;
    let tree: VesselTree = read_with(recon, formats::read_tree)?;
    let conn = match connectivity {
        Some((points, nbr)) => {
            let samples: Vec<OrientedSample> = read_with(points, formats::read_points)?;
            Some((samples, read_with(nbr, formats::read_neighbors)?))
        }
        None => None,
    };
    let name = recon.file_stem().map_or("tree".into(), |s| s.to_string_lossy().into_owned());
    let e = evaluate_pair(&truth, &tree, conn.as_ref().map(|(s, n)| (s.as_slice(), n)), ev)?;
    let row = e.summary(&name);
    write_csv(&out.join(SUMMARY_CSV), std::slice::from_ref(&row))?;
    write_csv(&out.join(ROC_CSV), &e.roc_rows(&name))?;
    Ok(row)
}

// ---------------------------------------------------------------- compare

/// Puts the pooled summaries of two evaluation directories side by side.
pub fn compare(a_dir: &Path, b_dir: &Path, out: &Path) -> Result<Vec<CompareRow>> {
    let pooled = |dir: &Path| -> Result<SummaryRow> {
        let rows: Vec<SummaryRow> = read_csv(&dir.join(SUMMARY_CSV))?;
        // single-pair evaluations have no pooled row; their only row stands in for it
        let single = (rows.len() == 1).then(|| rows[0].clone());
        rows.into_iter()
            .find(|r| r.tree == ALL)
            .or(single)
            .with_context(|| format!("{} has no pooled row", dir.join(SUMMARY_CSV).display()))
    };
    let (a, b) = (pooled(a_dir)?, pooled(b_dir)?);
    // (name, a, b, higher is better)
    let metrics = [
        ("centerline_recall", a.centerline_recall, b.centerline_recall, true),
        ("centerline_fallout", Some(a.centerline_fallout), Some(b.centerline_fallout), false),
        ("bifurcation_recall", a.bifurcation_recall, b.bifurcation_recall, true),
        ("bifurcation_fallout", Some(a.bifurcation_fallout), Some(b.bifurcation_fallout), false),
        ("angular_error_deg", a.angular_error_deg, b.angular_error_deg, false),
        ("connectivity_recall", a.connectivity_recall, b.connectivity_recall, true),
        ("connectivity_fallout", a.connectivity_fallout, b.connectivity_fallout, false),
    ];
    let rows: Vec<CompareRow> = metrics
        .into_iter()
        .map(|(metric, a, b, higher)| {
            let better = match (a, b) {
                (Some(x), Some(y)) if x == y => "tie",
                (Some(x), Some(y)) if (x > y) == higher => "a",
                (Some(_), Some(_)) => "b",
                _ => "",
            };
            let difference = a.zip(b).map(|(x, y)| y - x);
            CompareRow { metric: metric.into(), a, b, difference, better: better.into() }
        })
        .collect();
    write_csv(out, &rows)?;
    Ok(rows)
}
