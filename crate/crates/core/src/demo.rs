//! Builds the bundled demo dataset from a directory of photos, and
//! simulates observers voting through the rating protocol.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::dataset::{image_content_id, Category, DatasetError, DatasetManifest};
use crate::imaging::{load_image, save_png, RasterImage, SeededRandom};
use crate::rating::{RatingCoordinator, RatingError, MAIN_MINIMUM, TRAINING_SIZE};
use crate::stats::LikertHistogram;
use crate::uglifier::{apply_script, crop_fraction, ManipulationScript, PalettePreset, ScriptLabel, Step};

pub const DEMO_AUTHOR: &str = "demo-studio";
pub const BEAUTIFIED_COUNT: usize = 5;
pub const UGLIFIED_COUNT: usize = 5;

#[derive(Debug, thiserror::Error)]
pub enum DemoError {
    #[error("{0}")]
    Imaging(#[from] crate::imaging::ImagingError),
    #[error("{0}")]
    Engine(#[from] crate::uglifier::EngineError),
    #[error("{0}")]
    Dataset(#[from] DatasetError),
    #[error("{0}")]
    Rating(#[from] RatingError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("photo directory {0} holds fewer than {1} PNG files")]
    NotEnoughPhotos(String, usize),
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> DemoError + '_ {
    move |source| DemoError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Incoming directories ready for ingestion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemoLayout {
    pub original: PathBuf,
    pub beautified: PathBuf,
    pub uglified: PathBuf,
}

fn beautify_steps(i: usize) -> Vec<Step> {
    match i % 5 {
        0 => vec![Step::Contrast { t: 0.25 }, Step::BlurSharpen { t: 0.3 }],
        1 => vec![Step::Lightness { t: 0.08 }, Step::ChannelGain { gains: [1.05, 1.0, 0.95] }],
        2 => vec![Step::Crop { x: 0.1, y: 0.1, w: 0.8, h: 0.8 }, Step::Contrast { t: 0.15 }],
        3 => vec![Step::BlurSharpen { t: 0.4 }],
        _ => vec![Step::Contrast { t: 0.2 }, Step::Lightness { t: 0.05 }],
    }
}

fn uglify_steps(i: usize, rng: &mut SeededRandom) -> Vec<Step> {
    match i % 5 {
        0 => vec![Step::Contrast { t: -0.6 }, Step::PhaseNoise { s: 0.6, seed: rng.next_u64() }],
        1 => vec![Step::ChannelPermute { order: [2, 0, 1] }, Step::RandomNoise { s: 0.5, seed: rng.next_u64() }],
        2 => vec![Step::ColorInvert { s: 1.0 }, Step::BlurSharpen { t: -0.7 }],
        3 => vec![Step::PaletteExchange { preset: PalettePreset::Greenish }, Step::Lightness { t: -0.4 }],
        _ => vec![
            Step::Grayscale,
            Step::Crop { x: 0.0, y: 0.25, w: 0.6, h: 0.5 },
            Step::RandomNoise { s: 0.3, seed: rng.next_u64() },
        ],
    }
}

fn write_with_script(dir: &Path, name: &str, img: &RasterImage, script: &ManipulationScript) -> Result<(), DemoError> {
    save_png(img, dir.join(format!("{name}.png")))?;
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, script.to_json_pretty() + "\n").map_err(io(&path))
}

/// From `photos` (sorted PNG files) writes the originals (each photo and
/// its centre crop), plus beautified and uglified edits of the first
/// photos with sidecar scripts, under `out/incoming`.
pub fn prepare_demo(photos: &Path, out: &Path, seed: u64) -> Result<DemoLayout, DemoError> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(photos)
        .map_err(io(photos))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("png")))
        .collect();
    files.sort();
    let needed = BEAUTIFIED_COUNT + UGLIFIED_COUNT;
    if files.len() < needed {
        return Err(DemoError::NotEnoughPhotos(photos.display().to_string(), needed));
    }
    let incoming = out.join("incoming");
    let layout = DemoLayout {
        original: incoming.join("original"),
        beautified: incoming.join("beautified"),
        uglified: incoming.join("uglified"),
    };
    for d in [&layout.original, &layout.beautified, &layout.uglified] {
        std::fs::create_dir_all(d).map_err(io(d))?;
    }
    let mut rng = SeededRandom::new(seed);
    for (i, f) in files.iter().enumerate() {
        let stem = f.file_stem().unwrap().to_string_lossy().into_owned();
        let img = load_image(f)?;
        let centre = crop_fraction(&img, 0.125, 0.125, 0.75, 0.75)?;
        save_png(&img, layout.original.join(format!("{stem}.png")))?;
        save_png(&centre, layout.original.join(format!("{stem}_centre.png")))?;
        let id = image_content_id(&img);
        let (label, steps, dir) = if i < BEAUTIFIED_COUNT {
            (ScriptLabel::Beautified, beautify_steps(i), &layout.beautified)
        } else if i < needed {
            (ScriptLabel::Uglified, uglify_steps(i, &mut rng), &layout.uglified)
        } else {
            continue;
        };
        let script = ManipulationScript::new(id, label, DEMO_AUTHOR).with_steps(steps);
        let edited = apply_script(&img, &script)?;
        write_with_script(dir, &stem, &edited, &script)?;
    }
    Ok(layout)
}

/// Mean latent valuation per category for simulated observers.
pub fn latent_base(category: Category) -> f64 {
    match category {
        Category::Original => 3.3,
        Category::Beautified => 3.7,
        Category::Uglified => 1.8,
        Category::AutoUglified => 2.1,
    }
}

/// Runs `observers` simulated rating sessions. Each image gets a latent
/// valuation (category mean plus spread); each vote adds observer noise
/// and rounds into 1..=5.
pub fn simulate_votes(manifest: &DatasetManifest, observers: usize, seed: u64) -> Result<Vec<LikertHistogram>, DemoError> {
    let mut coordinator = RatingCoordinator::from_manifest(manifest, seed)?;
    let mut rng = SeededRandom::new(seed.wrapping_add(1));
    let latent: BTreeMap<String, f64> = manifest
        .sorted()
        .entries
        .iter()
        .map(|e| (e.image_id.clone(), latent_base(e.category) + 0.45 * rng.normal()))
        .collect();
    for o in 0..observers {
        let session = coordinator.start(Some(format!("observer-{o}")));
        let main = MAIN_MINIMUM + rng.below(7) as usize;
        for _ in 0..TRAINING_SIZE + main {
            let served = match coordinator.next_image(&session) {
                Ok(s) => s,
                Err(RatingError::Exhausted) => break,
                Err(e) => return Err(e.into()),
            };
            let score = (latent[&served.image_id] + 0.8 * rng.normal()).round().clamp(1.0, 5.0) as i64;
            coordinator.vote(&session, &served.image_id, score)?;
        }
        coordinator.finish(&session)?;
    }
    Ok(coordinator.histograms())
}
