use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::imaging::{convert, ColorSpace, RasterImage};

use super::DatasetError;

pub const MANIFEST_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Category {
    Original,
    Beautified,
    Uglified,
    AutoUglified,
}

impl Category {
    pub const ALL: [Category; 4] = [
        Category::Original,
        Category::Beautified,
        Category::Uglified,
        Category::AutoUglified,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::Original => "ORIGINAL",
            Category::Beautified => "BEAUTIFIED",
            Category::Uglified => "UGLIFIED",
            Category::AutoUglified => "AUTO_UGLIFIED",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Category {
    type Err = DatasetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().replace('-', "_");
        Category::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(&norm))
            .ok_or_else(|| DatasetError::UnknownCategory(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ManifestEntry {
    pub image_id: String,
    /// Relative to the dataset root, `/`-separated.
    pub path: String,
    pub category: Category,
    pub source_tag: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance_script_id: Option<String>,
    pub width: usize,
    pub height: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DatasetManifest {
    pub version: u32,
    pub entries: Vec<ManifestEntry>,
}

impl Default for DatasetManifest {
    fn default() -> Self {
        DatasetManifest {
            version: MANIFEST_VERSION,
            entries: Vec::new(),
        }
    }
}

impl DatasetManifest {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, image_id: &str) -> Option<&ManifestEntry> {
        self.entries.iter().find(|e| e.image_id == image_id)
    }

    pub fn contains(&self, image_id: &str) -> bool {
        self.get(image_id).is_some()
    }

    pub fn ids(&self) -> BTreeSet<&str> {
        self.entries.iter().map(|e| e.image_id.as_str()).collect()
    }

    pub fn insert(&mut self, entry: ManifestEntry) -> Result<(), DatasetError> {
        if self.contains(&entry.image_id) {
            return Err(DatasetError::DuplicateId(entry.image_id));
        }
        if entry.category != Category::Original && entry.provenance_script_id.is_none() {
            return Err(DatasetError::MissingProvenance(entry.image_id));
        }
        self.entries.push(entry);
        Ok(())
    }

    pub fn by_category(&self, category: Category) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(move |e| e.category == category)
    }

    pub fn category_of(&self, image_id: &str) -> Option<Category> {
        self.get(image_id).map(|e| e.category)
    }

    /// Every category, including empty ones.
    pub fn category_counts(&self) -> BTreeMap<Category, usize> {
        let mut counts: BTreeMap<Category, usize> = Category::ALL.iter().map(|c| (*c, 0)).collect();
        for e in &self.entries {
            *counts.get_mut(&e.category).unwrap() += 1;
        }
        counts
    }

    /// Entries sorted by image id.
    pub fn sorted(&self) -> DatasetManifest {
        let mut m = self.clone();
        m.entries.sort_by(|a, b| a.image_id.cmp(&b.image_id));
        m
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, DatasetError> {
        let raw: DatasetManifest =
            serde_json::from_str(text).map_err(|e| DatasetError::ManifestFormat(e.to_string()))?;
        if raw.version != MANIFEST_VERSION {
            return Err(DatasetError::ManifestFormat(format!("unsupported manifest version {}", raw.version)));
        }
        let mut checked = DatasetManifest::new();
        for e in raw.entries {
            checked.insert(e)?;
        }
        Ok(checked)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DatasetError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| DatasetError::io(path, e))?;
        Self::from_json(&text)
    }

    /// Loads the manifest under `root`, or an empty one if none exists.
    pub fn load_or_default(root: impl AsRef<Path>) -> Result<Self, DatasetError> {
        let path = root.as_ref().join(MANIFEST_FILE);
        if path.exists() {
            Self::load(path)
        } else {
            Ok(Self::new())
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), DatasetError> {
        let path = path.as_ref();
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(|e| DatasetError::io(parent, e))?;
        }
        std::fs::write(path, self.to_json() + "\n").map_err(|e| DatasetError::io(path, e))
    }
}

/// Content id: first 16 hex digits of the SHA-256 over the dimensions
/// and the 16-bit quantized sRGB samples.
pub fn image_content_id(img: &RasterImage) -> String {
    let rgb = convert(img, ColorSpace::SrgbUnit).expect("every space converts to sRGB");
    let mut h = Sha256::new();
    h.update((rgb.width() as u64).to_le_bytes());
    h.update((rgb.height() as u64).to_le_bytes());
    for i in 0..rgb.pixel_count() {
        for v in rgb.pixel(i) {
            h.update(((v * 65535.0).round() as u16).to_be_bytes());
        }
    }
    hex::encode(&h.finalize()[..8])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(id: &str, category: Category, prov: Option<&str>) -> ManifestEntry {
        ManifestEntry {
            image_id: id.into(),
            path: format!("images/{id}.png"),
            category,
            source_tag: "test".into(),
            provenance_script_id: prov.map(String::from),
            width: 8,
            height: 8,
        }
    }

    #[test]
    fn invariants() {
        let mut m = DatasetManifest::new();
        m.insert(entry("a", Category::Original, None)).unwrap();
        assert_eq!(m.insert(entry("a", Category::Original, None)), Err(DatasetError::DuplicateId("a".into())));
        assert_eq!(
            m.insert(entry("b", Category::Uglified, None)),
            Err(DatasetError::MissingProvenance("b".into()))
        );
        m.insert(entry("c", Category::AutoUglified, Some("s"))).unwrap();
        let counts = m.category_counts();
        assert_eq!(counts[&Category::Original], 1);
        assert_eq!(counts[&Category::Beautified], 0);
        assert_eq!(DatasetManifest::from_json(&m.to_json()).unwrap(), m);
    }

    #[test]
    fn category_names() {
        assert_eq!("auto_uglified".parse::<Category>().unwrap(), Category::AutoUglified);
        assert_eq!("AUTO-UGLIFIED".parse::<Category>().unwrap(), Category::AutoUglified);
        assert!("pretty".parse::<Category>().is_err());
        assert_eq!(serde_json::to_string(&Category::AutoUglified).unwrap(), "\"AUTO_UGLIFIED\"");
    }

    #[test]
    fn content_id_tracks_pixels() {
        let a = RasterImage::uniform(ColorSpace::SrgbUnit, 8, 8, &[0.5; 3]).unwrap();
        let b = RasterImage::uniform(ColorSpace::SrgbUnit, 8, 8, &[0.5, 0.5, 0.6]).unwrap();
        let c = RasterImage::uniform(ColorSpace::SrgbUnit, 16, 4 * 2, &[0.5; 3]).unwrap();
        assert_eq!(image_content_id(&a), image_content_id(&a.clone()));
        assert_ne!(image_content_id(&a), image_content_id(&b));
        assert_ne!(image_content_id(&a), image_content_id(&c));
        assert_eq!(image_content_id(&a).len(), 16);
    }
}
