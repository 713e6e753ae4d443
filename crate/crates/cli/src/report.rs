//! CSV report rows. Empty cells stand for values that do not exist, such as recall over a
//! tree without bifurcations.

use std::io::{Read, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::corpus::write_atomic;

/// Label of the rows pooling all trees of a corpus.
pub const ALL: &str = "ALL";

/// Scalar summary of one tree, or of the pooled corpus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub tree: String,
    pub centerline_recall: Option<f64>,
    pub centerline_fallout: f64,
    pub bifurcation_recall: Option<f64>,
    pub bifurcation_fallout: f64,
    pub gt_bifurcations: usize,
    pub recon_branching: usize,
    /// Median absolute bifurcation angle difference, degrees.
    pub angular_error_deg: Option<f64>,
    pub connectivity_recall: Option<f64>,
    pub connectivity_fallout: Option<f64>,
}

/// One point of a recall / fall-out sweep over the match tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RocRow {
    pub tree: String,
    /// `centerline` or `bifurcation`.
    pub metric: String,
    pub threshold: f64,
    pub recall: Option<f64>,
    pub fallout: f64,
    pub gt_total: usize,
    pub gt_matched: usize,
    pub recon_total: usize,
    pub recon_unmatched: usize,
}

/// Pooled metric of two runs side by side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub metric: String,
    pub a: Option<f64>,
    pub b: Option<f64>,
    /// `b - a`.
    pub difference: Option<f64>,
    /// `a`, `b`, `tie`, or empty when either value is missing.
    pub better: String,
}

pub fn write_rows<R: Serialize, W: Write>(w: W, rows: &[R]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_rows<R: DeserializeOwned, Rd: Read>(r: Rd) -> Result<Vec<R>> {
    csv::Reader::from_reader(r).deserialize().map(|row| Ok(row?)).collect()
}

pub fn write_csv<R: Serialize>(path: &Path, rows: &[R]) -> Result<()> {
    write_atomic(path, |w| write_rows(w, rows))
}

pub fn read_csv<R: DeserializeOwned>(path: &Path) -> Result<Vec<R>> {
    let f = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_rows(f).with_context(|| format!("parsing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn roundtrip<R: Serialize + DeserializeOwned>(rows: &[R]) -> Vec<R> {
        let mut buf = Vec::new();
        write_rows(&mut buf, rows).unwrap();
        read_rows(&buf[..]).unwrap()
    }

    fn value() -> impl Strategy<Value = f64> {
        prop_oneof![0.0..1.0f64, any::<f64>().prop_filter("not nan", |x| !x.is_nan()), Just(f64::INFINITY)]
    }

    proptest! {
        #[test]
        fn summary_rows_roundtrip(
            tree in "[a-z_0-9]{1,12}",
            vals in prop::collection::vec(prop::option::of(value()), 6),
            f in value(),
            n in any::<usize>(),
        ) {
            let row = SummaryRow {
                tree,
                centerline_recall: vals[0],
                centerline_fallout: f,
                bifurcation_recall: vals[1],
                bifurcation_fallout: f,
                gt_bifurcations: n,
                recon_branching: n / 2,
                angular_error_deg: vals[2],
                connectivity_recall: vals[3],
                connectivity_fallout: vals[4],
            };
            prop_assert_eq!(roundtrip(&[row.clone(), row.clone()]), vec![row.clone(), row]);
        }

        #[test]
        fn roc_rows_roundtrip(t in value(), r in prop::option::of(value()), f in value(), c in any::<[usize; 4]>()) {
            let row = RocRow {
                tree: ALL.into(),
                metric: "centerline".into(),
                threshold: t,
                recall: r,
                fallout: f,
                gt_total: c[0],
                gt_matched: c[1],
                recon_total: c[2],
                recon_unmatched: c[3],
            };
            prop_assert_eq!(roundtrip(&[row.clone()]), vec![row]);
        }

        #[test]
        fn compare_rows_roundtrip(a in prop::option::of(value()), b in prop::option::of(value())) {
            let row = CompareRow { metric: "angular_error_deg".into(), a, b, difference: None, better: "tie".into() };
            prop_assert_eq!(roundtrip(&[row.clone()]), vec![row]);
        }
    }
}
