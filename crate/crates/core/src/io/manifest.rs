//! Artifact digest manifests.
//!
//! An experiment directory ends with a `manifest.txt` in `sha256sum`
//! format — one `digest  relative-path` row per artifact, sorted by path —
//! so a rerun can be checked for bit-identical output with a single file
//! comparison (or `sha256sum -c manifest.txt`).

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// File name of the manifest inside an experiment directory.
pub const MANIFEST_NAME: &str = "manifest.txt";

/// Lowercase hex SHA-256 of a byte string.
pub fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Lowercase hex SHA-256 of a file's contents.
pub fn digest_file(path: &Path) -> Result<String> {
    Ok(hex_digest(&fs::read(path)?))
}

/// Writes `dir/manifest.txt` covering `artifacts` (paths relative to
/// `dir`), sorted and deduplicated. Returns the manifest path.
pub fn write_manifest(dir: &Path, artifacts: &[PathBuf]) -> Result<PathBuf> {
    let mut rows = Vec::with_capacity(artifacts.len());
    for rel in artifacts {
        if rel.is_absolute() {
            return Err(Error::Config(format!(
                "manifest entries must be relative paths, got {}",
                rel.display()
            )));
        }
        let digest = digest_file(&dir.join(rel))?;
        rows.push((rel.to_string_lossy().into_owned(), digest));
    }
    rows.sort();
    rows.dedup();
    let mut text = String::new();
    for (path, digest) in &rows {
        text.push_str(digest);
        text.push_str("  ");
        text.push_str(path);
        text.push('\n');
    }
    let manifest = dir.join(MANIFEST_NAME);
    fs::write(&manifest, text)?;
    Ok(manifest)
}
