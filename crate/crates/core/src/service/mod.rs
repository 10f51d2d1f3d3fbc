//! HTTP+JSON service under `/v1`: manipulation sessions for the studio
//! and the two-stage rating flow.

mod error;
mod routes;

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use crate::dataset::{DatasetError, DatasetManifest, MANIFEST_FILE};
use crate::imaging::{load_image, RasterImage, SeededRandom};
use crate::rating::RatingCoordinator;
use crate::uglifier::{EngineConfig, ManipulationSession};

pub use error::ApiError;
pub use routes::router;

/// Saved studio outputs go here, relative to the dataset root.
pub const SAVED_DIR: &str = "saved";

pub struct ServiceState {
    pub root: PathBuf,
    pub manifest: DatasetManifest,
    pub config: EngineConfig,
    sessions: Mutex<HashMap<String, Arc<Mutex<ManipulationSession>>>>,
    rating: Mutex<Option<RatingCoordinator>>,
    ids: Mutex<SeededRandom>,
}

pub type SharedState = Arc<ServiceState>;

impl ServiceState {
    /// Loads the dataset at `root`. Rating is enabled when the manifest
    /// can supply a training set and main pool.
    pub fn open(root: impl Into<PathBuf>, config: EngineConfig, seed: u64) -> Result<SharedState, DatasetError> {
        let root = root.into();
        let manifest = DatasetManifest::load(root.join(MANIFEST_FILE))?;
        Ok(Self::with_manifest(root, manifest, config, seed))
    }

    pub fn with_manifest(root: PathBuf, manifest: DatasetManifest, config: EngineConfig, seed: u64) -> SharedState {
        let rating = RatingCoordinator::from_manifest(&manifest, seed ^ 0x5eed).ok();
        Arc::new(ServiceState {
            root,
            manifest,
            config,
            sessions: Mutex::new(HashMap::new()),
            rating: Mutex::new(rating),
            ids: Mutex::new(SeededRandom::new(seed)),
        })
    }

    fn new_id(&self, prefix: &str) -> String {
        let mut rng = self.ids.lock().unwrap();
        format!("{prefix}{:016x}", rng.next_u64())
    }

    fn load(&self, image_id: &str) -> Result<RasterImage, ApiError> {
        let entry = self
            .manifest
            .get(image_id)
            .ok_or_else(|| ApiError::not_found(format!("unknown image {image_id}")))?;
        load_image(self.root.join(&entry.path)).map_err(|e| ApiError::internal(e.to_string()))
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<ManipulationSession>>, ApiError> {
        self.sessions
            .lock()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(format!("unknown session {id}")))
    }

    pub fn open_sessions(&self) -> usize {
        self.sessions.lock().unwrap().len()
    }
}
