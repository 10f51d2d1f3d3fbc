use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::imaging::decode_image;
use crate::uglifier::ManipulationScript;

use super::manifest::{image_content_id, Category, DatasetManifest, ManifestEntry};
use super::DatasetError;

/// Stored provenance scripts live here, relative to the dataset root.
pub const SCRIPTS_DIR: &str = "scripts";

/// Images ingested from outside the root are copied under this directory.
pub const IMAGES_DIR: &str = "images";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestWarning {
    pub path: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub added: Vec<ManifestEntry>,
    /// Files whose pixels already have an entry.
    pub duplicates: Vec<String>,
    pub warnings: Vec<IngestWarning>,
}

fn is_image_file(p: &Path) -> bool {
    !matches!(
        p.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref(),
        Some("json") | Some("csv") | Some("txt") | Some("md") | Some("toml")
    ) && !p
        .file_name()
        .and_then(|n| n.to_str())
        .is_some_and(|n| n.starts_with('.'))
}

fn relative(rel: &Path) -> String {
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join("/")
}

pub fn script_path(root: &Path, script_id: &str) -> PathBuf {
    root.join(SCRIPTS_DIR).join(format!("{script_id}.json"))
}

/// Adds every decodable image in `dir` (sorted by file name) to the
/// manifest. Non-ORIGINAL images need a sidecar `<stem>.json` script,
/// which is copied into the dataset's script store. Files outside `root`
/// are copied to `root/images/<category>/<id>.<ext>` so the dataset stays
/// self-contained.
pub fn ingest(
    manifest: &mut DatasetManifest,
    root: &Path,
    dir: &Path,
    category: Category,
    source_tag: &str,
) -> Result<IngestReport, DatasetError> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| DatasetError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && is_image_file(p))
        .collect();
    if files.is_empty() {
        return Err(DatasetError::EmptyDirectory(dir.display().to_string()));
    }
    files.sort();
    let mut report = IngestReport::default();
    for path in files {
        let shown = relative(path.strip_prefix(root).unwrap_or(&path));
        let warn = |report: &mut IngestReport, message: String| {
            report.warnings.push(IngestWarning {
                path: shown.clone(),
                message,
            })
        };
        let bytes = std::fs::read(&path).map_err(|e| DatasetError::io(&path, e))?;
        let img = match decode_image(&bytes) {
            Ok(img) => img,
            Err(e) => {
                warn(&mut report, e.to_string());
                continue;
            }
        };
        let image_id = image_content_id(&img);
        if manifest.contains(&image_id) {
            report.duplicates.push(shown);
            continue;
        }
        let provenance = if category == Category::Original {
            None
        } else {
            let sidecar = path.with_extension("json");
            let script = std::fs::read_to_string(&sidecar)
                .map_err(|e| e.to_string())
                .and_then(|t| ManipulationScript::from_json(&t).map_err(|e| e.to_string()));
            match script {
                Ok(script) => {
                    let id = script.script_id();
                    let target = script_path(root, &id);
                    if let Some(parent) = target.parent() {
                        std::fs::create_dir_all(parent).map_err(|e| DatasetError::io(parent, e))?;
                    }
                    std::fs::write(&target, script.to_json_pretty() + "\n")
                        .map_err(|e| DatasetError::io(&target, e))?;
                    Some(id)
                }
                Err(e) => {
                    warn(&mut report, format!("no usable provenance script: {e}"));
                    continue;
                }
            }
        };
        let stored = match path.strip_prefix(root) {
            Ok(rel) => relative(rel),
            Err(_) => {
                let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("png").to_ascii_lowercase();
                let rel = PathBuf::from(IMAGES_DIR)
                    .join(category.name().to_ascii_lowercase())
                    .join(format!("{image_id}.{ext}"));
                let target = root.join(&rel);
                if let Some(parent) = target.parent() {
                    std::fs::create_dir_all(parent).map_err(|e| DatasetError::io(parent, e))?;
                }
                std::fs::write(&target, &bytes).map_err(|e| DatasetError::io(&target, e))?;
                relative(&rel)
            }
        };
        let entry = ManifestEntry {
            image_id,
            path: stored,
            category,
            source_tag: source_tag.to_string(),
            provenance_script_id: provenance,
            width: img.width(),
            height: img.height(),
        };
        manifest.insert(entry.clone())?;
        report.added.push(entry);
    }
    Ok(report)
}

/// Loads every stored provenance script, keyed by id.
pub fn load_scripts(root: &Path) -> Result<Vec<ManipulationScript>, DatasetError> {
    let dir = root.join(SCRIPTS_DIR);
    if !dir.exists() {
        return Ok(Vec::new());
    }
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)
        .map_err(|e| DatasetError::io(&dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p).map_err(|e| DatasetError::io(p, e))?;
            ManipulationScript::from_json(&text).map_err(|e| DatasetError::ScriptFormat(e.to_string()))
        })
        .collect()
}
