//! File formats: traces, model files, plot data, digest manifests.
//!
//! Everything here is deterministic — no timestamps, stable field order,
//! 17-significant-digit floats — so identical inputs produce identical
//! bytes and an experiment rerun can be verified by comparing manifests.

pub mod emit;
pub mod manifest;
pub mod model_file;
pub mod trace_file;

pub use emit::{
    write_mrl, write_pp, write_qq, write_rate_sweep, write_reliability, write_stability,
    PlotKind, PLOT_KINDS,
};
pub use manifest::{digest_file, hex_digest, write_manifest, MANIFEST_NAME};
pub use model_file::{load_model, save_model, LoadedModel, ModelFile, StoredModel,
    MODEL_FORMAT_VERSION};
pub use trace_file::{parse_trace, read_trace, write_exceedances, write_trace};
