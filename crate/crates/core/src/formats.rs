//! Plain-text file formats.
//!
//! All formats are whitespace separated, one record per line, with `#` starting a comment.
//! Floats are written in their shortest round-trip form, so reading back what was written
//! reproduces every value exactly.
//!
//! * point cloud: `x y z tx ty tz [r]`
//! * tree: header `root <i>`, then one line per node in index order:
//!   `node -1 x y z` for the root and excluded nodes, or
//!   `node parent x y z alpha length weight tx ty tz` for nodes with an incoming arc
//!   (`t` is the arc's start tangent at the parent)
//! * ground-truth tree: headers `root <i>` and `domain_size <d>`, then
//!   `node parent x y z radius` with parent `-1` for the root
//! * neighbours: headers `nodes <n>`, `k <k>`, `flavor isotropic|anisotropic <ar²>`, then `u v`
//! * arcs: header `nodes <n>`, then `from to weight`

use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{FlowArc, OrientedSample, Point3, UnitVec3, Vec3};
use crate::graph::{ConfluentGraph, GeodesicGraph};
use crate::neighbors::{NeighborFlavor, NeighborSystem};
use crate::scalar::Real;
use crate::solver::{TreeEdge, VesselTree};
use crate::synth::GroundTruthTree;

/// Non-empty, comment-stripped lines with 1-based line numbers.
fn records<R: BufRead>(r: R) -> impl Iterator<Item = Result<(usize, Vec<String>)>> {
    r.lines().enumerate().filter_map(|(i, line)| match line {
        Err(e) => Some(Err(e.into())),
        Ok(line) => {
            let body = line.split('#').next().unwrap_or("");
            let fields: Vec<String> = body.split_whitespace().map(str::to_owned).collect();
            (!fields.is_empty()).then_some(Ok((i + 1, fields)))
        }
    })
}

fn field<F: FromStr>(fields: &[String], i: usize, line: usize) -> Result<F> {
    let raw = fields.get(i).ok_or_else(|| Error::Parse { line, msg: format!("missing column {}", i + 1) })?;
    raw.parse().map_err(|_| Error::Parse { line, msg: format!("cannot parse {raw:?} in column {}", i + 1) })
}

fn point<T: Real>(f: &[String], at: usize, line: usize) -> Result<Point3<T>> {
    Ok(Vec3::new(field(f, at, line)?, field(f, at + 1, line)?, field(f, at + 2, line)?))
}

/// Reads a direction, keeping it bit-exact when it is already unit length.
fn direction<T: Real>(f: &[String], at: usize, line: usize) -> Result<UnitVec3<T>> {
    let v: Vec3<T> = point(f, at, line)?;
    UnitVec3::try_from(v)
        .or_else(|_| v.normalized().ok_or(Error::NonFinite))
        .map_err(|_| Error::Parse { line, msg: "zero or non-finite tangent".into() })
}

fn parent_field(f: &[String], line: usize) -> Result<Option<usize>> {
    let p: i64 = field(f, 1, line)?;
    match p {
        -1 => Ok(None),
        p if p >= 0 => Ok(Some(p as usize)),
        p => Err(Error::Parse { line, msg: format!("invalid parent {p}") }),
    }
}

fn expect_columns(f: &[String], allowed: &[usize], line: usize) -> Result<()> {
    if allowed.contains(&f.len()) {
        Ok(())
    } else {
        Err(Error::Parse { line, msg: format!("expected {allowed:?} columns, found {}", f.len()) })
    }
}

fn header<T: FromStr>(f: &[String], key: &str, line: usize) -> Result<T> {
    if f.len() == 2 && f[0] == key {
        field(f, 1, line)
    } else {
        Err(Error::Parse { line, msg: format!("expected header `{key} <value>`") })
    }
}

pub fn write_points<T: Real, W: Write>(mut w: W, samples: &[OrientedSample<T>]) -> Result<()> {
    writeln!(w, "# x y z tx ty tz [r]")?;
    for s in samples {
        let (p, t) = (s.position, s.tangent.as_vec());
        write!(w, "{} {} {} {} {} {}", p.x, p.y, p.z, t.x, t.y, t.z)?;
        if let Some(r) = s.radius {
            write!(w, " {r}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn read_points<T: Real, R: BufRead>(r: R) -> Result<Vec<OrientedSample<T>>> {
    let mut out = Vec::new();
    for rec in records(r) {
        let (line, f) = rec?;
        expect_columns(&f, &[6, 7], line)?;
        let radius = if f.len() == 7 { Some(field(&f, 6, line)?) } else { None };
        let s = OrientedSample::with_radius(point(&f, 0, line)?, direction(&f, 3, line)?, radius)
            .map_err(|e| Error::Parse { line, msg: e.to_string() })?;
        out.push(s);
    }
    Ok(out)
}

pub fn write_tree<T: Real, W: Write>(mut w: W, tree: &VesselTree<T>) -> Result<()> {
    writeln!(w, "root {}", tree.root)?;
    writeln!(w, "# node parent x y z [alpha length weight tx ty tz]")?;
    for v in 0..tree.len() {
        let p = tree.positions[v];
        match (tree.parent[v], &tree.edges[v]) {
            (Some(par), Some(e)) => {
                let t = e.arc.start_tangent.as_vec();
                writeln!(
                    w,
                    "{v} {par} {} {} {} {} {} {} {} {} {}",
                    p.x, p.y, p.z, e.arc.alpha, e.arc.length, e.weight, t.x, t.y, t.z
                )?;
            }
            _ => writeln!(w, "{v} -1 {} {} {}", p.x, p.y, p.z)?,
        }
    }
    Ok(())
}

/// Reads a reconstructed tree. Nodes other than the root with parent `-1` are excluded.
/// Edges given without arc columns (`node parent x y z`) become straight segments.
pub fn read_tree<T: Real, R: BufRead>(r: R) -> Result<VesselTree<T>> {
    let mut recs = records(r);
    let (line, f) = recs.next().ok_or(Error::Parse { line: 1, msg: "empty tree file".into() })??;
    let root: usize = header(&f, "root", line)?;
    let mut positions = Vec::new();
    let mut parent = Vec::new();
    // (tangent, weight, alpha, length) per node with an arc
    let mut arcs: Vec<Option<(Option<UnitVec3<T>>, Option<T>, Option<(T, T)>, usize)>> = Vec::new();
    for rec in recs {
        let (line, f) = rec?;
        expect_columns(&f, &[5, 11], line)?;
        let node: usize = field(&f, 0, line)?;
        if node != positions.len() {
            return Err(Error::Parse { line, msg: format!("expected node {}, found {node}", positions.len()) });
        }
        positions.push(point(&f, 2, line)?);
        let par = parent_field(&f, line)?;
        parent.push(par);
        arcs.push(match (par, f.len()) {
            (None, _) => None,
            (Some(_), 5) => Some((None, None, None, line)),
            (Some(_), _) => Some((
                Some(direction(&f, 8, line)?),
                Some(field(&f, 7, line)?),
                Some((field(&f, 5, line)?, field(&f, 6, line)?)),
                line,
            )),
        });
    }
    let n = positions.len();
    let mut edges = Vec::with_capacity(n);
    for v in 0..n {
        edges.push(match (parent[v], arcs[v]) {
            (Some(p), Some((tangent, weight, stored, line))) => {
                let start = *positions.get(p).ok_or(Error::IndexOutOfRange { index: p, len: n })?;
                let arc = match tangent {
                    Some(t) => FlowArc::fit(start, t, positions[v]),
                    None => FlowArc::straight(start, positions[v]),
                }
                .map_err(|e| Error::Parse { line, msg: e.to_string() })?;
                if let Some((alpha, length)) = stored {
                    let close = |a: T, b: T| a == b || (a - b).abs() <= T::lit(1e-9) * a.abs().max(b.abs());
                    if !close(alpha, arc.alpha) || !close(length, arc.length) {
                        return Err(Error::Parse { line, msg: "arc columns disagree with the geometry".into() });
                    }
                }
                Some(TreeEdge { arc, weight: weight.unwrap_or(arc.length) })
            }
            _ => None,
        });
    }
    let mut included: Vec<bool> = parent.iter().map(Option::is_some).collect();
    if root < n {
        included[root] = true;
    }
    VesselTree::new(root, positions, parent, included, edges)
}

pub fn write_ground_truth<T: Real, W: Write>(mut w: W, tree: &GroundTruthTree<T>) -> Result<()> {
    writeln!(w, "root {}", tree.root)?;
    writeln!(w, "domain_size {}", tree.domain_size)?;
    writeln!(w, "# node parent x y z radius")?;
    for v in 0..tree.len() {
        let p = tree.positions[v];
        let par = tree.parent[v].map_or(-1, |p| p as i64);
        writeln!(w, "{v} {par} {} {} {} {}", p.x, p.y, p.z, tree.radii[v])?;
    }
    Ok(())
}

pub fn read_ground_truth<T: Real, R: BufRead>(r: R) -> Result<GroundTruthTree<T>> {
    let mut recs = records(r);
    let mut next_header = |key: &str| -> Result<(usize, Vec<String>)> {
        recs.next().ok_or(Error::Parse { line: 1, msg: format!("missing `{key}` header") })?
    };
    let (line, f) = next_header("root")?;
    let root: usize = header(&f, "root", line)?;
    let (line, f) = next_header("domain_size")?;
    let domain_size: T = header(&f, "domain_size", line)?;
    let (mut positions, mut radii, mut parent) = (Vec::new(), Vec::new(), Vec::new());
    for rec in recs {
        let (line, f) = rec?;
        expect_columns(&f, &[6], line)?;
        let node: usize = field(&f, 0, line)?;
        if node != positions.len() {
            return Err(Error::Parse { line, msg: format!("expected node {}, found {node}", positions.len()) });
        }
        parent.push(parent_field(&f, line)?);
        positions.push(point(&f, 2, line)?);
        radii.push(field(&f, 5, line)?);
    }
    GroundTruthTree::new(root, positions, radii, parent, domain_size)
}

pub fn write_neighbors<W: Write>(mut w: W, n: &NeighborSystem) -> Result<()> {
    writeln!(w, "nodes {}", n.num_nodes)?;
    writeln!(w, "k {}", n.k)?;
    match n.flavor {
        NeighborFlavor::Isotropic => writeln!(w, "flavor isotropic")?,
        NeighborFlavor::Anisotropic { aspect_ratio_sq } => writeln!(w, "flavor anisotropic {aspect_ratio_sq}")?,
    }
    for &(u, v) in &n.pairs {
        writeln!(w, "{u} {v}")?;
    }
    Ok(())
}

pub fn read_neighbors<R: BufRead>(r: R) -> Result<NeighborSystem> {
    let mut recs = records(r);
    let mut next = |what: &str| -> Result<(usize, Vec<String>)> {
        recs.next().ok_or(Error::Parse { line: 1, msg: format!("missing `{what}` header") })?
    };
    let (line, f) = next("nodes")?;
    let nodes: usize = header(&f, "nodes", line)?;
    let (line, f) = next("k")?;
    let k: usize = header(&f, "k", line)?;
    let (line, f) = next("flavor")?;
    let flavor = match (f.first().map(String::as_str), f.get(1).map(String::as_str), f.len()) {
        (Some("flavor"), Some("isotropic"), 2) => NeighborFlavor::Isotropic,
        (Some("flavor"), Some("anisotropic"), 3) => NeighborFlavor::Anisotropic { aspect_ratio_sq: field(&f, 2, line)? },
        _ => return Err(Error::Parse { line, msg: "expected `flavor isotropic|anisotropic <ar2>`".into() }),
    };
    let mut pairs = Vec::new();
    for rec in recs {
        let (line, f) = rec?;
        expect_columns(&f, &[2], line)?;
        pairs.push((field::<usize>(&f, 0, line)?, field::<usize>(&f, 1, line)?));
    }
    NeighborSystem::from_pairs(nodes, k, flavor, pairs)
}

pub fn write_confluent_arcs<T: Real, W: Write>(mut w: W, g: &ConfluentGraph<T>) -> Result<()> {
    writeln!(w, "nodes {}", g.num_nodes())?;
    writeln!(w, "# from to weight")?;
    for a in &g.arcs {
        writeln!(w, "{} {} {}", a.from, a.to, a.weight)?;
    }
    Ok(())
}

pub fn write_geodesic_edges<T: Real, W: Write>(mut w: W, g: &GeodesicGraph<T>) -> Result<()> {
    writeln!(w, "nodes {}", g.num_nodes())?;
    writeln!(w, "# u v weight")?;
    for e in &g.edges {
        writeln!(w, "{} {} {}", e.u, e.v, e.weight)?;
    }
    Ok(())
}

/// Reads `from to weight` records written by either arc writer.
pub fn read_arcs<T: Real, R: BufRead>(r: R) -> Result<(usize, Vec<(usize, usize, T)>)> {
    let mut recs = records(r);
    let (line, f) = recs.next().ok_or(Error::Parse { line: 1, msg: "missing `nodes` header".into() })??;
    let nodes: usize = header(&f, "nodes", line)?;
    let mut arcs = Vec::new();
    for rec in recs {
        let (line, f) = rec?;
        expect_columns(&f, &[3], line)?;
        let (u, v): (usize, usize) = (field(&f, 0, line)?, field(&f, 1, line)?);
        if u >= nodes || v >= nodes {
            return Err(Error::Parse { line, msg: format!("endpoint out of range for {nodes} nodes") });
        }
        arcs.push((u, v, field(&f, 2, line)?));
    }
    Ok((nodes, arcs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_confluent_graph, build_geodesic_graph, TangentMode};
    use crate::neighbors::knn_neighbors;
    use crate::solver::{minimum_arborescence, minimum_spanning_tree};
    use crate::synth::{generate_tree, sample_centerline, SamplerConfig};

    fn corpus() -> (GroundTruthTree<f64>, Vec<OrientedSample<f64>>) {
        let gt = generate_tree(4, 60.0, 5, true).unwrap();
        let cfg = SamplerConfig { tangent_noise_std_rad: 0.1, position_noise_std: 0.1, dropout_prob: 0.1, ..Default::default() };
        let s = sample_centerline(&gt, &cfg).unwrap();
        (gt, s)
    }

    fn roundtrip<V, E: std::fmt::Debug>(
        value: &V,
        write: impl Fn(&mut Vec<u8>, &V) -> Result<()>,
        read: impl Fn(&[u8]) -> std::result::Result<V, E>,
    ) -> (V, Vec<u8>) {
        let mut buf = Vec::new();
        write(&mut buf, value).unwrap();
        (read(&buf).unwrap(), buf)
    }

    #[test]
    fn points_roundtrip_exactly() {
        let (_, s) = corpus();
        let (back, _) = roundtrip(&s, |b, s| write_points(b, s), |b| read_points::<f64, _>(b));
        assert_eq!(back, s);
    }

    #[test]
    fn ground_truth_roundtrip_exactly() {
        let (gt, _) = corpus();
        let (back, _) = roundtrip(&gt, |b, t| write_ground_truth(b, t), |b| read_ground_truth::<f64, _>(b));
        assert_eq!(back, gt);
    }

    #[test]
    fn trees_roundtrip_exactly() {
        let (_, s) = corpus();
        let n = knn_neighbors(&s, 30).unwrap();
        let arb = minimum_arborescence(&build_confluent_graph(&s, &n, 1.5, 0.3).unwrap(), 0).unwrap();
        let mst = minimum_spanning_tree(&build_geodesic_graph(&s, &n, TangentMode::Unoriented).unwrap(), 0).unwrap();
        for t in [arb, mst] {
            let (back, bytes) = roundtrip(&t, |b, t| write_tree(b, t), |b| read_tree::<f64, _>(b));
            assert_eq!(back, t);
            let mut again = Vec::new();
            write_tree(&mut again, &back).unwrap();
            assert_eq!(again, bytes);
        }
    }

    #[test]
    fn neighbors_roundtrip_exactly() {
        let (_, s) = corpus();
        let n = crate::neighbors::anisotropic_knn(&s, 4, 40, 10.0).unwrap();
        let (back, _) = roundtrip(&n, |b, n| write_neighbors(b, n), |b| read_neighbors(b));
        assert_eq!(back.pairs, n.pairs);
        assert_eq!((back.k, back.flavor, back.num_nodes), (n.k, n.flavor, n.num_nodes));
    }

    #[test]
    fn arcs_roundtrip() {
        let (_, s) = corpus();
        let n = knn_neighbors(&s, 10).unwrap();
        let g = build_confluent_graph(&s, &n, 1.5, 0.0).unwrap();
        let mut buf = Vec::new();
        write_confluent_arcs(&mut buf, &g).unwrap();
        let (nodes, arcs) = read_arcs::<f64, _>(&buf[..]).unwrap();
        assert_eq!(nodes, s.len());
        assert!(arcs.iter().zip(&g.arcs).all(|(a, b)| (a.0, a.1, a.2) == (b.from as usize, b.to as usize, b.weight)));
    }

    #[test]
    fn straight_rows_and_comments() {
        let text = "root 0\n# comment\n0 -1 0 0 0\n1 0 2 0 0 # tail\n2 -1 9 9 9\n";
        let t = read_tree::<f64, _>(text.as_bytes()).unwrap();
        assert_eq!(t.total_weight, 2.0);
        assert_eq!(t.included, vec![true, true, false]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = read_points::<f64, _>("0 0 0 1 0 0\n0 0 0 1 0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = read_tree::<f64, _>("root 0\n0 -1 0 0 0\n1 0 1 0 0 0.5 1 1 1 0 0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        assert!(read_points::<f64, _>("0 0 0 0 0 0\n".as_bytes()).is_err());
    }
}
