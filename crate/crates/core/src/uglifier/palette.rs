//! Palette exchange by mean / standard deviation transfer in CIELAB.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::imaging::{convert, ColorSpace, Plane, RasterImage};

use super::EngineError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PalettePreset {
    Reddish,
    Bluish,
    Greenish,
    Whitish,
}

impl PalettePreset {
    pub const ALL: [PalettePreset; 4] = [
        PalettePreset::Reddish,
        PalettePreset::Bluish,
        PalettePreset::Greenish,
        PalettePreset::Whitish,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PalettePreset::Reddish => "REDDISH",
            PalettePreset::Bluish => "BLUISH",
            PalettePreset::Greenish => "GREENISH",
            PalettePreset::Whitish => "WHITISH",
        }
    }

    /// Shipped CIELAB statistics, measured from [`reference_swatch`].
    pub fn stats(self) -> LabStats {
        match self {
            PalettePreset::Reddish => LabStats {
                mean: [REDDISH[0], REDDISH[1], REDDISH[2]],
                std: [REDDISH[3], REDDISH[4], REDDISH[5]],
            },
            PalettePreset::Bluish => LabStats {
                mean: [BLUISH[0], BLUISH[1], BLUISH[2]],
                std: [BLUISH[3], BLUISH[4], BLUISH[5]],
            },
            PalettePreset::Greenish => LabStats {
                mean: [GREENISH[0], GREENISH[1], GREENISH[2]],
                std: [GREENISH[3], GREENISH[4], GREENISH[5]],
            },
            PalettePreset::Whitish => LabStats {
                mean: [WHITISH[0], WHITISH[1], WHITISH[2]],
                std: [WHITISH[3], WHITISH[4], WHITISH[5]],
            },
        }
    }
}

// mean L, a, b then std L, a, b
const REDDISH: [f64; 6] = [47.7897922501677, 59.12866124411129, 47.537573343389425, 3.9356470116394284, 7.348544060403273, 2.7744472435901755];
const BLUISH: [f64; 6] = [40.68803515908294, 24.669739187655477, -61.14563462697, 6.002690598798413, 10.329088744694054, 6.788343533513119];
const GREENISH: [f64; 6] = [59.88812179158716, -54.048375837813474, 46.401948871365605, 7.4785947849867345, 7.104111040345467, 9.755366218685888];
const WHITISH: [f64; 6] = [92.17161285727845, 0.9557349886728385, -2.4198835901735385, 2.9060678056636515, 6.249942119975912, 1.8448655688930264];

impl fmt::Display for PalettePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PalettePreset {
    type Err = EngineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PalettePreset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| EngineError::UnknownPreset(s.to_string()))
    }
}

/// Per-channel mean and population standard deviation in CIELAB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabStats {
    pub mean: [f64; 3],
    pub std: [f64; 3],
}

fn plane_mean_std(p: &Plane) -> (f64, f64) {
    let mean = p.mean();
    let var = p.data().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / p.len() as f64;
    (mean, var.sqrt())
}

pub fn lab_statistics(img: &RasterImage) -> LabStats {
    let lab = convert(img, ColorSpace::Cielab).expect("every space converts to CIELAB");
    let mut stats = LabStats {
        mean: [0.0; 3],
        std: [0.0; 3],
    };
    for k in 0..3 {
        let (m, s) = plane_mean_std(lab.plane(k));
        stats.mean[k] = m;
        stats.std[k] = s;
    }
    stats
}

/// Shifts and rescales each CIELAB plane onto `target`. A constant plane
/// cannot take on a spread and is moved to the target mean only.
pub fn transfer_statistics(img: &RasterImage, target: &LabStats) -> RasterImage {
    let lab = convert(img, ColorSpace::Cielab).expect("every space converts to CIELAB");
    let planes = lab
        .planes()
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let (m, s) = plane_mean_std(p);
            let gain = if s > 1e-12 { target.std[k] / s } else { 0.0 };
            let plane = p.map(|v| (v - m) * gain + target.mean[k]);
            if k == 0 {
                plane.map(|v| v.clamp(0.0, 100.0))
            } else {
                plane
            }
        })
        .collect();
    RasterImage::new(ColorSpace::Cielab, planes).expect("transfer keeps CIELAB invariants")
}

pub fn palette_exchange(img: &RasterImage, preset: PalettePreset) -> RasterImage {
    transfer_statistics(img, &preset.stats())
}

/// 64×64 sRGB swatch the preset statistics were measured from.
pub fn reference_swatch(preset: PalettePreset) -> RasterImage {
    let n = 64;
    let channel = |f: fn(f64, f64) -> f64| {
        Plane::from_fn(n, n, move |x, y| {
            let u = x as f64 / (n - 1) as f64;
            let v = y as f64 / (n - 1) as f64;
            f(u, v)
        })
    };
    let planes = match preset {
        PalettePreset::Reddish => vec![
            channel(|u, _| 0.70 + 0.25 * u),
            channel(|_, v| 0.12 + 0.18 * v),
            channel(|u, v| 0.10 + 0.15 * u * v),
        ],
        PalettePreset::Bluish => vec![
            channel(|u, _| 0.10 + 0.15 * u),
            channel(|_, v| 0.22 + 0.25 * v),
            channel(|u, v| 0.60 + 0.20 * u + 0.15 * v),
        ],
        PalettePreset::Greenish => vec![
            channel(|u, v| 0.15 + 0.15 * u * v),
            channel(|_, v| 0.50 + 0.30 * v),
            channel(|u, _| 0.12 + 0.18 * u),
        ],
        PalettePreset::Whitish => vec![
            channel(|u, _| 0.84 + 0.14 * u),
            channel(|_, v| 0.84 + 0.14 * v),
            channel(|u, v| 0.86 + 0.07 * (u + v)),
        ],
    };
    RasterImage::new(ColorSpace::SrgbUnit, planes).expect("swatch values are in range")
}
