//! Persisted ground-truth atlases.
//!
//! An order-`n` atlas in a directory is three files:
//!
//! * `n{n}.g6`: one graph6 line per graph, in emission order;
//! * `n{n}.csv`: the statistics table, same order;
//! * `n{n}.json`: the manifest with counts, SHA-256 checksums of the other
//!   two files and the exact maximum average path length.
//!
//! The manifest is renamed into place last, so an atlas without one does
//! not exist as far as [`load_atlas`] and [`list_atlases`] are concerned.

mod graph6;
mod table;

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tempfile::NamedTempFile;

use crate::enumerate::{self, MAX_ENUMERATION_ORDER};
use crate::error::{Error, Result};
use crate::graph::{pair_count, Graph};
use crate::stats::{stat_vector, StatVector};

pub use graph6::{decode_graph6, encode_graph6};
pub use table::{format_real, quantize, read_rows, round_sig12, write_rows, AtlasRow, COLUMNS};

pub const FORMAT_VERSION: u32 = 1;

/// Number of graphs per edge count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeHistogram {
    pub n: usize,
    /// Indexed by edge count, `0..=n(n-1)/2`.
    pub counts: Vec<u64>,
}

impl EdgeHistogram {
    pub fn from_stats<'a, I>(n: usize, stats: I) -> Self
    where
        I: IntoIterator<Item = &'a StatVector>,
    {
        let mut counts = vec![0; pair_count(n) + 1];
        for s in stats {
            counts[s.m] += 1;
        }
        EdgeHistogram { n, counts }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `counts[m] == counts[max - m]` for every `m`.
    pub fn is_complement_symmetric(&self) -> bool {
        self.counts.iter().eq(self.counts.iter().rev())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub n: usize,
    pub count: usize,
    pub sha256_graphs: String,
    pub sha256_stats: String,
    /// Largest average path length over the atlas.
    pub apl_ref: f64,
    pub format_version: u32,
    /// Unix seconds.
    pub built_at: u64,
    pub builder: String,
    /// How undefined assortativity (regular graphs) is stored.
    pub undefined_assortativity: String,
}

/// In-memory atlas: rows in emission order plus derived summaries.
#[derive(Clone, Debug)]
pub struct Atlas {
    pub n: usize,
    pub rows: Vec<AtlasRow>,
    pub histogram: EdgeHistogram,
    pub apl_ref: f64,
}

impl Atlas {
    /// Computes statistics for a complete set of representatives. Real
    /// values carry the table's precision, so a freshly built atlas equals
    /// the same atlas loaded from disk.
    pub fn from_graphs(n: usize, graphs: &[Graph]) -> Result<Atlas> {
        if n < 2 {
            return Err(Error::OrderTooSmall { n, min: 2 });
        }
        let rows: Vec<AtlasRow> = graphs
            .par_iter()
            .map(|g| {
                Ok(AtlasRow {
                    graph6: encode_graph6(g),
                    stats: quantize(&stat_vector(g)?),
                })
            })
            .collect::<Result<_>>()?;
        Ok(Atlas::from_rows(n, rows))
    }

    fn from_rows(n: usize, rows: Vec<AtlasRow>) -> Atlas {
        let histogram = EdgeHistogram::from_stats(n, rows.iter().map(|r| &r.stats));
        let apl_ref = rows.iter().map(|r| r.stats.apl).fold(0.0, f64::max);
        Atlas {
            n,
            rows,
            histogram,
            apl_ref: if apl_ref > 0.0 { apl_ref } else { 1.0 },
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn stats(&self) -> impl Iterator<Item = &StatVector> + '_ {
        self.rows.iter().map(|r| &r.stats)
    }

    pub fn graph(&self, i: usize) -> Result<Graph> {
        decode_graph6(&self.rows[i].graph6)
    }
}

#[derive(Clone, Debug)]
pub struct AtlasPaths {
    pub graphs: PathBuf,
    pub stats: PathBuf,
    pub manifest: PathBuf,
    pub lock: PathBuf,
}

pub fn atlas_paths(dir: &Path, n: usize) -> AtlasPaths {
    AtlasPaths {
        graphs: dir.join(format!("n{n}.g6")),
        stats: dir.join(format!("n{n}.csv")),
        manifest: dir.join(format!("n{n}.json")),
        lock: dir.join(format!("n{n}.lock")),
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct BuildOptions {
    /// Order 10 canonicalizes roughly 1.4e8 candidates; it must be asked
    /// for explicitly.
    pub allow_order_ten: bool,
}

/// Removes the lock file when the build ends, successfully or not.
struct BuildLock(PathBuf);

impl BuildLock {
    fn acquire(path: PathBuf) -> Result<Self> {
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(_) => Ok(BuildLock(path)),
            Err(e) if e.kind() == io::ErrorKind::AlreadyExists => {
                Err(Error::Locked(path.display().to_string()))
            }
            Err(e) => Err(e.into()),
        }
    }
}

impl Drop for BuildLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

struct HashingWriter<W> {
    inner: W,
    hasher: Sha256,
}

impl<W: Write> Write for HashingWriter<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let k = self.inner.write(buf)?;
        self.hasher.update(&buf[..k]);
        Ok(k)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

/// Writes a temporary file next to its destination, returning it with the
/// SHA-256 of the bytes written.
fn write_hashed<F>(dir: &Path, body: F) -> Result<(NamedTempFile, String)>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    let tmp = NamedTempFile::new_in(dir)?;
    let mut w = HashingWriter {
        inner: BufWriter::new(tmp.as_file().try_clone()?),
        hasher: Sha256::new(),
    };
    body(&mut w)?;
    w.flush()?;
    let digest = hex::encode(w.hasher.finalize());
    tmp.as_file().sync_all()?;
    Ok((tmp, digest))
}

fn check_build_order(n: usize, opts: BuildOptions) -> Result<()> {
    if !(2..=MAX_ENUMERATION_ORDER).contains(&n) {
        return Err(Error::OrderOutOfRange {
            n,
            min: 2,
            max: MAX_ENUMERATION_ORDER,
        });
    }
    if n == MAX_ENUMERATION_ORDER && !opts.allow_order_ten {
        return Err(Error::BadParam(
            "order 10 enumeration must be enabled explicitly".into(),
        ));
    }
    Ok(())
}

/// Enumerates order `n` (extending the order `n - 1` atlas in `dir` when one
/// exists), computes statistics and writes the atlas files.
pub fn build_atlas(dir: &Path, n: usize, opts: BuildOptions) -> Result<(Atlas, Manifest)> {
    check_build_order(n, opts)?;
    let graphs = match load_atlas(dir, n - 1) {
        Ok(lower) => {
            let parents: Vec<Graph> = lower
                .rows
                .iter()
                .map(|r| decode_graph6(&r.graph6))
                .collect::<Result<_>>()?;
            enumerate::extend(&parents).0
        }
        Err(_) => enumerate::enumerate_all(n)?,
    };
    write_atlas(dir, n, &graphs)
}

/// Validates externally enumerated graphs and writes them as the order-`n`
/// atlas.
pub fn import_atlas(dir: &Path, n: usize, graphs: &[Graph]) -> Result<(Atlas, Manifest)> {
    let canonical = enumerate::import_atlas(n, graphs)?;
    write_atlas(dir, n, &canonical)
}

pub fn read_graph6_file(path: &Path) -> Result<Vec<Graph>> {
    let file = File::open(path)?;
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(decode_graph6(line.trim())?);
    }
    Ok(out)
}

fn write_atlas(dir: &Path, n: usize, graphs: &[Graph]) -> Result<(Atlas, Manifest)> {
    fs::create_dir_all(dir)?;
    let paths = atlas_paths(dir, n);
    let _lock = BuildLock::acquire(paths.lock.clone())?;
    let atlas = Atlas::from_graphs(n, graphs)?;

    let (g6_tmp, sha_graphs) = write_hashed(dir, |w| {
        for row in &atlas.rows {
            w.write_all(row.graph6.as_bytes())?;
            w.write_all(b"\n")?;
        }
        Ok(())
    })?;
    let (csv_tmp, sha_stats) = write_hashed(dir, |w| {
        write_rows(w, atlas.rows.iter().map(|r| (r.graph6.as_str(), &r.stats)))
    })?;
    let manifest = Manifest {
        n,
        count: atlas.len(),
        sha256_graphs: sha_graphs,
        sha256_stats: sha_stats,
        apl_ref: atlas.apl_ref,
        format_version: FORMAT_VERSION,
        built_at: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        builder: concat!("gstats ", env!("CARGO_PKG_VERSION")).to_string(),
        undefined_assortativity: "empty field; pairwise deletion in correlations".to_string(),
    };
    let (manifest_tmp, _) = write_hashed(dir, |w| {
        serde_json::to_writer_pretty(&mut *w, &manifest)?;
        w.write_all(b"\n")?;
        Ok(())
    })?;
    // A stale manifest must not vouch for the new data files while they
    // are being swapped in.
    match fs::remove_file(&paths.manifest) {
        Ok(()) => {}
        Err(e) if e.kind() == io::ErrorKind::NotFound => {}
        Err(e) => return Err(e.into()),
    }
    g6_tmp.persist(&paths.graphs).map_err(|e| e.error)?;
    csv_tmp.persist(&paths.stats).map_err(|e| e.error)?;
    manifest_tmp.persist(&paths.manifest).map_err(|e| e.error)?;
    Ok((atlas, manifest))
}

pub fn read_manifest(dir: &Path, n: usize) -> Result<Manifest> {
    let path = atlas_paths(dir, n).manifest;
    let bytes = match fs::read(&path) {
        Ok(b) => b,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Err(Error::MissingAtlas(n)),
        Err(e) => return Err(e.into()),
    };
    let manifest: Manifest = serde_json::from_slice(&bytes)
        .map_err(|e| Error::CorruptAtlas(format!("manifest: {e}")))?;
    if manifest.n != n {
        return Err(Error::CorruptAtlas(format!(
            "manifest for order {} stored as order {n}",
            manifest.n
        )));
    }
    if manifest.format_version != FORMAT_VERSION {
        return Err(Error::CorruptAtlas(format!(
            "unsupported format version {}",
            manifest.format_version
        )));
    }
    Ok(manifest)
}

fn read_checked(path: &Path, n: usize, expected: &str) -> Result<Vec<u8>> {
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Err(Error::MissingAtlas(n)),
        Err(e) => return Err(e.into()),
    };
    let digest = hex::encode(Sha256::digest(&bytes));
    if digest != expected {
        return Err(Error::CorruptAtlas(format!(
            "{} checksum mismatch",
            path.display()
        )));
    }
    Ok(bytes)
}

/// Loads and validates the order-`n` atlas in `dir`.
pub fn load_atlas(dir: &Path, n: usize) -> Result<Atlas> {
    let manifest = read_manifest(dir, n)?;
    let paths = atlas_paths(dir, n);
    let g6 = read_checked(&paths.graphs, n, &manifest.sha256_graphs)?;
    let csv = read_checked(&paths.stats, n, &manifest.sha256_stats)?;
    let rows = read_rows(csv.as_slice())?;
    let lines: Vec<&[u8]> = g6.split(|&b| b == b'\n').filter(|l| !l.is_empty()).collect();
    if rows.len() != manifest.count || lines.len() != manifest.count {
        return Err(Error::CorruptAtlas(format!(
            "{} graphs and {} stat rows, manifest says {}",
            lines.len(),
            rows.len(),
            manifest.count
        )));
    }
    if let Some(i) = rows
        .iter()
        .zip(&lines)
        .position(|(r, l)| r.graph6.as_bytes() != *l || r.stats.n != n)
    {
        return Err(Error::CorruptAtlas(format!("row {i} disagrees with the graph file")));
    }
    let mut atlas = Atlas::from_rows(n, rows);
    atlas.apl_ref = manifest.apl_ref;
    Ok(atlas)
}

/// Manifests of every atlas in `dir`, ordered by `n`. A missing directory
/// holds no atlases.
pub fn list_atlases(dir: &Path) -> Result<Vec<Manifest>> {
    let entries = match fs::read_dir(dir) {
        Ok(e) => e,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e.into()),
    };
    let mut out = Vec::new();
    for entry in entries {
        let name = entry?.file_name();
        let Some(n) = name
            .to_str()
            .and_then(|s| s.strip_prefix('n'))
            .and_then(|s| s.strip_suffix(".json"))
            .and_then(|s| s.parse::<usize>().ok())
        else {
            continue;
        };
        if let Ok(m) = read_manifest(dir, n) {
            out.push(m);
        }
    }
    out.sort_by_key(|m| m.n);
    Ok(out)
}
