//! Dataset manifest, ingestion, external metric imports and snapshots.

mod external;
mod ingest;
mod integrity;
mod manifest;
mod snapshot;

use std::path::Path;

pub use external::{import_external_metrics, join_external, ExternalMetricTable};
pub use ingest::{ingest, load_scripts, script_path, IngestReport, IngestWarning, IMAGES_DIR, SCRIPTS_DIR};
pub use integrity::{check_integrity, DanglingReference, IntegrityReport};
pub use manifest::{
    image_content_id, Category, DatasetManifest, ManifestEntry, MANIFEST_FILE, MANIFEST_VERSION,
};
pub use snapshot::{
    dangling_ids, snapshot, snapshot_digest, verify_snapshot, SnapshotContents, CHECKSUMS_MEMBER,
    SNAPSHOT_VERSION,
};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum DatasetError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("directory {0} holds no candidate image files")]
    EmptyDirectory(String),
    #[error("duplicate image id {0}")]
    DuplicateId(String),
    #[error("entry {0} is not ORIGINAL but has no provenance script")]
    MissingProvenance(String),
    #[error("unknown category {0:?}")]
    UnknownCategory(String),
    #[error("unknown image ids: {}", .0.join(", "))]
    UnknownIds(Vec<String>),
    #[error("manifest: {0}")]
    ManifestFormat(String),
    #[error("stored script: {0}")]
    ScriptFormat(String),
    #[error("external metric csv: {0}")]
    ExternalFormat(String),
    #[error("archive: {0}")]
    Archive(String),
    #[error("checksum mismatch for archive member {0}")]
    ChecksumMismatch(String),
}

impl DatasetError {
    pub(crate) fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        DatasetError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }
}
