//! On-disk cache of embeddings found by the search.
//!
//! One file per type, named after the descriptor and the format version.
//! Entries are never trusted: a hit is rebuilt and re-verified in full, and
//! anything that fails is treated as a miss.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use num_bigint::BigInt;
use sextic_lattice::lattice::Lattice;
use sextic_lattice::linalg::IntMatrix;
use sextic_lattice::sextic::{
    embedding_from_rows, find_primitive_embedding, K3Embedding, SingularType,
};

use crate::error::CliError;

pub const CACHE_FORMAT_VERSION: u32 = 1;
const HEADER: &str = "sextic-embedding v1";
pub const CACHE_DIR_ENV: &str = "SEXTIC_CACHE_DIR";

/// `<tmp>/sextic-lattice-cache`.
pub fn default_cache_dir() -> PathBuf {
    std::env::temp_dir().join("sextic-lattice-cache")
}

#[derive(Debug, Clone)]
pub struct EmbeddingCache {
    dir: PathBuf,
}

impl EmbeddingCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// `1,5` → `1_5.v1.emb`, `6[n=3]` → `6n3.v1.emb`.
    pub fn path_for(&self, t: &SingularType) -> PathBuf {
        let stem: String = t
            .descriptor()
            .replace("[n=", "n")
            .chars()
            .filter_map(|c| match c {
                ',' => Some('_'),
                ']' => None,
                c => Some(c),
            })
            .collect();
        self.dir.join(format!("{stem}.v{CACHE_FORMAT_VERSION}.emb"))
    }

    /// A verified embedding from the cache, or `None` on a miss or a stale
    /// entry.
    pub fn load(&self, t: &SingularType) -> Option<K3Embedding> {
        let text = fs::read_to_string(self.path_for(t)).ok()?;
        let (descriptor, rows, complement) = parse_entry(&text)?;
        if descriptor != t.descriptor() {
            return None;
        }
        let e = embedding_from_rows(t, &rows).ok()??;
        (e.complement.lattice() == complement).then_some(e)
    }

    pub fn store(&self, e: &K3Embedding) -> Result<(), CliError> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| CliError::Io { path, source }
        };
        fs::create_dir_all(&self.dir).map_err(io(&self.dir))?;
        let path = self.path_for(&e.singular_type);
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, render_entry(e)).map_err(io(&tmp))?;
        fs::rename(&tmp, &path).map_err(io(&path))
    }
}

pub fn render_entry(e: &K3Embedding) -> String {
    let b = e.m.basis();
    let mut out = format!(
        "{HEADER}\ntype {}\nimages {} {}\n",
        e.singular_type.descriptor(),
        b.rows(),
        b.cols()
    );
    out += &b.to_string();
    out += "complement\n";
    out += &e.complement.lattice().to_text();
    out
}

fn parse_entry(text: &str) -> Option<(String, IntMatrix, Lattice)> {
    let mut lines = text.lines();
    if lines.next()? != HEADER {
        return None;
    }
    let descriptor = lines.next()?.strip_prefix("type ")?.to_string();
    let mut dims = lines.next()?.strip_prefix("images ")?.split_whitespace();
    let (r, c): (usize, usize) = (dims.next()?.parse().ok()?, dims.next()?.parse().ok()?);
    let mut rows = Vec::with_capacity(r);
    for _ in 0..r {
        let row: Vec<BigInt> = lines
            .next()?
            .split_whitespace()
            .map(|x| x.parse().ok())
            .collect::<Option<_>>()?;
        rows.push(row);
    }
    let images = IntMatrix::from_rows(rows, c).ok()?;
    if lines.next()? != "complement" {
        return None;
    }
    let rest: Vec<&str> = lines.collect();
    let complement = Lattice::from_text(&rest.join("\n")).ok()?;
    Some((descriptor, images, complement))
}

/// Cache lookup followed by a search on a miss; successful searches are
/// written back. Cache write failures are not fatal.
pub fn find_embedding(
    t: &SingularType,
    budget: Duration,
    cache: Option<&EmbeddingCache>,
) -> Result<Option<K3Embedding>, CliError> {
    if let Some(hit) = cache.and_then(|c| c.load(t)) {
        return Ok(Some(hit));
    }
    let found = find_primitive_embedding(t, budget)?;
    if let (Some(e), Some(c)) = (&found, cache) {
        let _ = c.store(e);
    }
    Ok(found)
}
