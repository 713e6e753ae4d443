//! Corpus layout, manifests and file helpers.

use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub const MANIFEST: &str = "manifest.json";

/// One entry per tree. File names are relative to the manifest's directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub name: String,
    pub file: String,
    /// Point file (ground-truth corpora only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<String>,
    /// Where the reconstruction should be rooted (ground-truth corpora only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_position: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler_seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    /// `ground-truth`, `reconstruction` or `neighbors`.
    pub kind: String,
    /// Effective configuration that produced the corpus.
    pub config: serde_json::Value,
    pub entries: Vec<Entry>,
}

impl Manifest {
    pub fn read(dir: &Path) -> Result<Self> {
        read_json(&dir.join(MANIFEST))
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        write_json(&dir.join(MANIFEST), self)
    }

    pub fn expect_kind(&self, kind: &str, dir: &Path) -> Result<()> {
        if self.kind != kind {
            bail!("{} holds a {} corpus, expected {kind}", dir.display(), self.kind);
        }
        Ok(())
    }
}

/// Pairs entries of two manifests by name, failing with every unmatched name.
pub fn pair_entries<'a>(a: &'a Manifest, b: &'a Manifest) -> Result<Vec<(&'a Entry, &'a Entry)>> {
    let missing_b: Vec<&str> =
        a.entries.iter().filter(|e| !b.entries.iter().any(|f| f.name == e.name)).map(|e| e.name.as_str()).collect();
    let missing_a: Vec<&str> =
        b.entries.iter().filter(|e| !a.entries.iter().any(|f| f.name == e.name)).map(|e| e.name.as_str()).collect();
    if !missing_a.is_empty() || !missing_b.is_empty() {
        bail!(
            "manifests do not match: missing reconstructions [{}], missing ground truth [{}]",
            missing_b.join(", "),
            missing_a.join(", ")
        );
    }
    Ok(a.entries.iter().map(|e| (e, b.entries.iter().find(|f| f.name == e.name).expect("checked"))).collect())
}

/// Per-tree seed from the corpus seed: one SplitMix64 step over `(base, index, stream)`.
pub fn derive_seed(base: u64, index: usize, stream: u64) -> u64 {
    let mut z = base
        .wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(stream.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Writes through a temporary file in the target directory, then renames it into place.
pub fn write_atomic(path: &Path, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating a file in {}", dir.display()))?;
    {
        let mut w = BufWriter::new(tmp.as_file_mut());
        write(&mut w).with_context(|| format!("writing {}", path.display()))?;
        w.flush()?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("moving {} into place", path.display()))?;
    Ok(())
}

pub fn write_json<V: Serialize>(path: &Path, value: &V) -> Result<()> {
    write_atomic(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)?;
        Ok(())
    })
}

pub fn read_json<V: DeserializeOwned>(path: &Path) -> Result<V> {
    let f = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    serde_json::from_reader(BufReader::new(f)).with_context(|| format!("parsing {}", path.display()))
}

/// Opens a text file for one of the core readers, attaching the path to any error.
pub fn read_with<V>(path: &Path, read: impl FnOnce(BufReader<fs::File>) -> confluent_core::Result<V>) -> Result<V> {
    let f = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read(BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
}

pub fn write_with(path: &Path, write: impl FnOnce(&mut dyn Write) -> confluent_core::Result<()>) -> Result<()> {
    write_atomic(path, |w| Ok(write(w)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(name: &str) -> Entry {
        Entry { name: name.into(), file: format!("{name}.tree"), points: None, root_position: None, tree_seed: None, sampler_seed: None }
    }

    fn manifest(names: &[&str]) -> Manifest {
        Manifest { kind: "x".into(), config: serde_json::Value::Null, entries: names.iter().map(|n| entry(n)).collect() }
    }

    #[test]
    fn mismatched_manifests_list_missing_names() {
        let err = pair_entries(&manifest(&["a", "b", "c"]), &manifest(&["a", "d"])).unwrap_err().to_string();
        assert!(err.contains("[b, c]") && err.contains("[d]"), "{err}");
        assert_eq!(pair_entries(&manifest(&["a", "b"]), &manifest(&["b", "a"])).unwrap().len(), 2);
    }

    #[test]
    fn seeds_differ_by_index_and_stream() {
        let s: Vec<u64> = (0..4).map(|i| derive_seed(7, i, 0)).collect();
        assert!(s.windows(2).all(|w| w[0] != w[1]));
        assert_ne!(derive_seed(7, 0, 0), derive_seed(7, 0, 1));
        assert_eq!(derive_seed(7, 3, 1), derive_seed(7, 3, 1));
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.txt");
        write_atomic(&path, |w| Ok(write!(w, "one")?)).unwrap();
        write_atomic(&path, |w| Ok(write!(w, "two")?)).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
        let failed = write_atomic(&path, |_| bail!("boom"));
        assert!(failed.is_err());
        assert_eq!(fs::read_to_string(&path).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
