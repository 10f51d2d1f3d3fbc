//! The individual manipulation modules.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::imaging::{
    convert, crop, gaussian_blur_plane, luma, plane_from_spectrum, plane_spectrum, wrap_phase,
    ColorSpace, Plane, RasterImage, SeededRandom,
};

use super::palette::{palette_exchange, PalettePreset};
use super::step::Step;
use super::EngineError;

/// Maximum effect of each slider at full scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    /// Lightness shift in L units at `t = 1`.
    pub lightness_span: f64,
    /// Contrast gain is `2^(contrast_log2_span * t)`.
    pub contrast_log2_span: f64,
    /// Standard deviation of additive noise at `s = 1`, unit sRGB scale.
    pub noise_sigma_max: f64,
    /// Blur sigma in pixels at `t = -1`.
    pub blur_sigma_max: f64,
    /// Unsharp-mask gain at `t = 1`.
    pub sharpen_gain_max: f64,
    /// Gaussian sigma of the unsharp mask.
    pub sharpen_sigma: f64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            lightness_span: 100.0,
            contrast_log2_span: 2.0,
            noise_sigma_max: 0.25,
            blur_sigma_max: 8.0,
            sharpen_gain_max: 3.0,
            sharpen_sigma: 2.0,
        }
    }
}

fn to_space(img: &RasterImage, space: ColorSpace) -> RasterImage {
    convert(img, space).expect("all engine color conversions are supported")
}

fn lab_with_lightness(lab: &RasterImage, l: Plane) -> RasterImage {
    let planes = vec![l, lab.plane(1).clone(), lab.plane(2).clone()];
    RasterImage::new(ColorSpace::Cielab, planes).expect("lightness stays in range")
}

pub fn adjust_lightness(img: &RasterImage, t: f64, cfg: &EngineConfig) -> Result<RasterImage, EngineError> {
    let step = Step::Lightness { t };
    step.validate()?;
    if step.is_neutral() {
        return Ok(img.clone());
    }
    let lab = to_space(img, ColorSpace::Cielab);
    let shift = cfg.lightness_span * t;
    let l = lab.plane(0).map(|v| (v + shift).clamp(0.0, 100.0));
    Ok(lab_with_lightness(&lab, l))
}

pub fn adjust_contrast(img: &RasterImage, t: f64, cfg: &EngineConfig) -> Result<RasterImage, EngineError> {
    let step = Step::Contrast { t };
    step.validate()?;
    if step.is_neutral() {
        return Ok(img.clone());
    }
    let lab = to_space(img, ColorSpace::Cielab);
    let mean = lab.plane(0).mean();
    let gain = (cfg.contrast_log2_span * t).exp2();
    let l = lab
        .plane(0)
        .map(|v| ((v - mean) * gain + mean).clamp(0.0, 100.0));
    Ok(lab_with_lightness(&lab, l))
}

/// Blend toward the opponent image `(100 - L, -a, -b)`.
pub fn invert_colors(img: &RasterImage, s: f64) -> Result<RasterImage, EngineError> {
    let step = Step::ColorInvert { s };
    step.validate()?;
    if step.is_neutral() {
        return Ok(img.clone());
    }
    let lab = to_space(img, ColorSpace::Cielab);
    let keep = 1.0 - s;
    let planes = vec![
        lab.plane(0).map(|v| (keep * v + s * (100.0 - v)).clamp(0.0, 100.0)),
        lab.plane(1).map(|v| keep * v - s * v),
        lab.plane(2).map(|v| keep * v - s * v),
    ];
    Ok(RasterImage::new(ColorSpace::Cielab, planes).expect("inversion stays in range"))
}

/// Odd-symmetric uniform phase field: `u(-k) = -u(k)`, zero on
/// self-conjugate frequencies, laid out in natural FFT order.
pub fn phase_noise_field(width: usize, height: usize, rng: &mut SeededRandom) -> Vec<f64> {
    let mut field = vec![f64::NAN; width * height];
    for y in 0..height {
        for x in 0..width {
            let i = y * width + x;
            let mirror = ((height - y) % height) * width + (width - x) % width;
            if !field[i].is_nan() {
                continue;
            }
            if mirror == i {
                field[i] = 0.0;
            } else {
                let u = rng.uniform(-PI, PI);
                field[i] = u;
                field[mirror] = -u;
            }
        }
    }
    field
}

/// Randomizes Fourier phases while keeping every channel's amplitude
/// spectrum. Operates on linear RGB; the result is left unclamped so the
/// amplitude spectra survive exactly.
pub fn phase_noise(img: &RasterImage, s: f64, rng: &mut SeededRandom) -> Result<RasterImage, EngineError> {
    let step = Step::PhaseNoise { s, seed: rng.seed() };
    step.validate()?;
    if step.is_neutral() {
        return Ok(img.clone());
    }
    let linear = to_space(img, ColorSpace::LinearRgb);
    let (w, h) = (linear.width(), linear.height());
    let field = phase_noise_field(w, h, rng);
    let planes = linear
        .planes()
        .iter()
        .map(|p| {
            let mut spec = plane_spectrum(p);
            for y in 0..h {
                for x in 0..w {
                    let (fx, fy) = spec.frequency_at(x, y);
                    let nx = fx.rem_euclid(w as isize) as usize;
                    let ny = fy.rem_euclid(h as isize) as usize;
                    let i = y * w + x;
                    let phi = spec.phase()[i];
                    spec.phase_mut()[i] = wrap_phase(phi + s * field[ny * w + nx]);
                }
            }
            plane_from_spectrum(&spec)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RasterImage::new(ColorSpace::LinearRgb, planes)?)
}

pub fn channel_gain(img: &RasterImage, gains: [f64; 3]) -> Result<RasterImage, EngineError> {
    let step = Step::ChannelGain { gains };
    step.validate()?;
    if step.is_neutral() {
        return Ok(img.clone());
    }
    let rgb = to_space(img, ColorSpace::SrgbUnit);
    let planes = rgb
        .planes()
        .iter()
        .zip(gains)
        .map(|(p, g)| p.map(|v| (v * g).clamp(0.0, 1.0)))
        .collect();
    Ok(RasterImage::new(ColorSpace::SrgbUnit, planes)?)
}

pub fn channel_permute(img: &RasterImage, order: [usize; 3]) -> Result<RasterImage, EngineError> {
    let step = Step::ChannelPermute { order };
    step.validate()?;
    if step.is_neutral() {
        return Ok(img.clone());
    }
    let rgb = to_space(img, ColorSpace::SrgbUnit);
    let planes = order.iter().map(|&c| rgb.plane(c).clone()).collect();
    Ok(RasterImage::new(ColorSpace::SrgbUnit, planes)?)
}

/// Replaces all three channels with luma; the image stays 3-channel sRGB.
pub fn grayscale(img: &RasterImage) -> RasterImage {
    let rgb = to_space(img, ColorSpace::SrgbUnit);
    let data: Vec<f64> = (0..rgb.pixel_count()).map(|i| luma(rgb.pixel(i))).collect();
    let plane = Plane::new(rgb.width(), rgb.height(), data).expect("luma plane size");
    RasterImage::new(ColorSpace::SrgbUnit, vec![plane.clone(), plane.clone(), plane])
        .expect("luma of unit values is in range")
}

/// Unclamped additive noise planes with standard deviation `sigma`, drawn
/// plane by plane in row-major order.
pub fn gaussian_noise_planes(width: usize, height: usize, sigma: f64, rng: &mut SeededRandom) -> Vec<Plane> {
    (0..3)
        .map(|_| Plane::from_fn(width, height, |_, _| sigma * rng.normal()))
        .collect()
}

pub fn add_noise(img: &RasterImage, s: f64, rng: &mut SeededRandom, cfg: &EngineConfig) -> Result<RasterImage, EngineError> {
    let step = Step::RandomNoise { s, seed: rng.seed() };
    step.validate()?;
    if step.is_neutral() {
        return Ok(img.clone());
    }
    let rgb = to_space(img, ColorSpace::SrgbUnit);
    let noise = gaussian_noise_planes(rgb.width(), rgb.height(), cfg.noise_sigma_max * s, rng);
    let planes = rgb
        .planes()
        .iter()
        .zip(&noise)
        .map(|(p, n)| p.zip_map(n, |v, e| (v + e).clamp(0.0, 1.0)))
        .collect();
    Ok(RasterImage::new(ColorSpace::SrgbUnit, planes)?)
}

/// Unsharp mask `I + gain (I - G(I))` without clamping.
pub fn unsharp_plane(p: &Plane, gain: f64, sigma: f64) -> Plane {
    let blurred = gaussian_blur_plane(p, sigma);
    p.zip_map(&blurred, |v, b| v + gain * (v - b))
}

/// Negative `t` blurs with sigma `blur_sigma_max * |t|`; positive `t`
/// sharpens with gain `sharpen_gain_max * t`.
pub fn blur_sharpen(img: &RasterImage, t: f64, cfg: &EngineConfig) -> Result<RasterImage, EngineError> {
    let step = Step::BlurSharpen { t };
    step.validate()?;
    if step.is_neutral() {
        return Ok(img.clone());
    }
    let rgb = to_space(img, ColorSpace::SrgbUnit);
    let planes: Vec<Plane> = if t < 0.0 {
        let sigma = cfg.blur_sigma_max * t.abs();
        rgb.planes()
            .iter()
            .map(|p| gaussian_blur_plane(p, sigma).map(|v| v.clamp(0.0, 1.0)))
            .collect()
    } else {
        let gain = cfg.sharpen_gain_max * t;
        rgb.planes()
            .iter()
            .map(|p| unsharp_plane(p, gain, cfg.sharpen_sigma).map(|v| v.clamp(0.0, 1.0)))
            .collect()
    };
    Ok(RasterImage::new(ColorSpace::SrgbUnit, planes)?)
}

/// Pixel rectangle selected by a fractional crop of a `width`×`height` frame.
pub fn crop_rect(width: usize, height: usize, x: f64, y: f64, w: f64, h: f64) -> (usize, usize, usize, usize) {
    let px = ((x * width as f64).round() as usize).min(width);
    let py = ((y * height as f64).round() as usize).min(height);
    let pw = ((w * width as f64).round() as usize).min(width - px);
    let ph = ((h * height as f64).round() as usize).min(height - py);
    (px, py, pw, ph)
}

pub fn crop_fraction(img: &RasterImage, x: f64, y: f64, w: f64, h: f64) -> Result<RasterImage, EngineError> {
    let step = Step::Crop { x, y, w, h };
    step.validate()?;
    if step.is_neutral() {
        return Ok(img.clone());
    }
    let (px, py, pw, ph) = crop_rect(img.width(), img.height(), x, y, w, h);
    Ok(crop(img, px, py, pw, ph)?)
}

/// Applies one validated step.
pub fn apply_step(img: &RasterImage, step: &Step, cfg: &EngineConfig) -> Result<RasterImage, EngineError> {
    match step {
        Step::Lightness { t } => adjust_lightness(img, *t, cfg),
        Step::Contrast { t } => adjust_contrast(img, *t, cfg),
        Step::ColorInvert { s } => invert_colors(img, *s),
        Step::PhaseNoise { s, seed } => phase_noise(img, *s, &mut SeededRandom::new(*seed)),
        Step::ChannelGain { gains } => channel_gain(img, *gains),
        Step::ChannelPermute { order } => channel_permute(img, *order),
        Step::Grayscale => Ok(grayscale(img)),
        Step::RandomNoise { s, seed } => add_noise(img, *s, &mut SeededRandom::new(*seed), cfg),
        Step::BlurSharpen { t } => blur_sharpen(img, *t, cfg),
        Step::PaletteExchange { preset } => Ok(palette_exchange(img, *preset)),
        Step::Crop { x, y, w, h } => crop_fraction(img, *x, *y, *w, *h),
    }
}

/// Presets available to [`Step::PaletteExchange`].
pub fn palette_presets() -> &'static [PalettePreset] {
    &PalettePreset::ALL
}
