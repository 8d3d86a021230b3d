//! Versioned TOML model files.
//!
//! A model file carries one fitted model (GPD tail or Rayleigh mean),
//! the format version, the producing tool, an optional digest of the
//! source trace, and a digest of the model payload itself. Loading an
//! unknown format version is an error; a payload digest mismatch is
//! reported as a warning, not a failure — hand-edited parameters are a
//! legitimate workflow, they just should not masquerade as fit output.
//! Files contain no timestamps, so identical models produce identical
//! bytes and reruns stay digest-stable.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitting::GpdModel;
use crate::io::manifest::hex_digest;
use crate::rate::RayleighModel;

/// The one format version this build reads and writes.
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// A persistable fitted model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StoredModel {
    Gpd(GpdModel),
    Rayleigh(RayleighModel),
}

/// On-disk model container.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub created_by: String,
    /// Digest of the trace file the model was fitted on, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_digest: Option<String>,
    /// Digest of the serialized model payload.
    pub content_digest: String,
    pub model: StoredModel,
}

/// A loaded model plus any non-fatal observations made during loading.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedModel {
    pub file: ModelFile,
    pub warnings: Vec<String>,
}

fn model_digest(model: &StoredModel) -> Result<String> {
    let text = toml::to_string(model)
        .map_err(|e| Error::Config(format!("cannot serialize model: {e}")))?;
    Ok(hex_digest(text.as_bytes()))
}

/// Writes `model` to `path` as format version 1.
pub fn save_model(path: &Path, model: &StoredModel, source_digest: Option<&str>) -> Result<ModelFile> {
    let file = ModelFile {
        format_version: MODEL_FORMAT_VERSION,
        created_by: format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")),
        source_digest: source_digest.map(str::to_owned),
        content_digest: model_digest(model)?,
        model: *model,
    };
    let text = toml::to_string_pretty(&file)
        .map_err(|e| Error::Config(format!("cannot serialize model file: {e}")))?;
    fs::write(path, text)?;
    Ok(file)
}

/// Reads a model file, enforcing the format version and checking the
/// payload digest.
pub fn load_model(path: &Path) -> Result<LoadedModel> {
    let text = fs::read_to_string(path)?;
    let file: ModelFile = toml::from_str(&text).map_err(|e| {
        Error::Config(format!("{}: invalid model file: {e}", path.display()))
    })?;
    if file.format_version != MODEL_FORMAT_VERSION {
        return Err(Error::Version {
            found: file.format_version,
            supported: MODEL_FORMAT_VERSION,
        });
    }
    let mut warnings = Vec::new();
    let recomputed = model_digest(&file.model)?;
    if recomputed != file.content_digest {
        warnings.push(format!(
            "{}: content digest mismatch (file says {}, payload hashes to {recomputed}); \
             the model was edited after it was written",
            path.display(),
            file.content_digest
        ));
    }
    Ok(LoadedModel { file, warnings })
}
