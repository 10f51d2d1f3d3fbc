//! Color space conversions.
//!
//! CIELAB uses the sRGB primaries and the D65 white point derived from the
//! same matrix, so neutral sRGB values land exactly on a = b = 0.

use super::raster::{ColorSpace, Plane, RasterImage};
use super::ImagingError;

/// Luma weights used for every gray conversion.
pub const LUMA: [f64; 3] = [0.299, 0.587, 0.114];

const RGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
];

const LAB_EPSILON: f64 = 216.0 / 24389.0;
const LAB_KAPPA: f64 = 24389.0 / 27.0;

fn white_point() -> [f64; 3] {
    [
        RGB_TO_XYZ[0].iter().sum(),
        RGB_TO_XYZ[1].iter().sum(),
        RGB_TO_XYZ[2].iter().sum(),
    ]
}

fn invert3(m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let mut inv = [[0.0; 3]; 3];
    for (i, row) in inv.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let (a, b) = ((j + 1) % 3, (j + 2) % 3);
            let (c, d) = ((i + 1) % 3, (i + 2) % 3);
            *cell = (m[a][c] * m[b][d] - m[a][d] * m[b][c]) / det;
        }
    }
    inv
}

fn xyz_to_rgb() -> [[f64; 3]; 3] {
    invert3(&RGB_TO_XYZ)
}

#[inline]
pub fn srgb_to_linear(v: f64) -> f64 {
    if v <= 0.04045 {
        v / 12.92
    } else {
        ((v + 0.055) / 1.055).powf(2.4)
    }
}

#[inline]
pub fn linear_to_srgb(v: f64) -> f64 {
    if v <= 0.0031308 {
        v * 12.92
    } else {
        1.055 * v.powf(1.0 / 2.4) - 0.055
    }
}

#[inline]
fn lab_f(t: f64) -> f64 {
    if t > LAB_EPSILON {
        t.cbrt()
    } else {
        (LAB_KAPPA * t + 16.0) / 116.0
    }
}

#[inline]
fn lab_f_inv(f: f64) -> f64 {
    let t = f * f * f;
    if t > LAB_EPSILON {
        t
    } else {
        (116.0 * f - 16.0) / LAB_KAPPA
    }
}

fn mul(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

/// Linear RGB to CIELAB.
pub fn linear_rgb_to_lab(rgb: [f64; 3]) -> [f64; 3] {
    let ratios = if rgb[0] == rgb[1] && rgb[1] == rgb[2] {
        [rgb[0]; 3]
    } else {
        let xyz = mul(&RGB_TO_XYZ, rgb);
        let w = white_point();
        [xyz[0] / w[0], xyz[1] / w[1], xyz[2] / w[2]]
    };
    let fx = lab_f(ratios[0]);
    let fy = lab_f(ratios[1]);
    let fz = lab_f(ratios[2]);
    [116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

/// CIELAB to linear RGB, unclamped.
pub fn lab_to_linear_rgb(lab: [f64; 3]) -> [f64; 3] {
    let fy = (lab[0] + 16.0) / 116.0;
    let fx = fy + lab[1] / 500.0;
    let fz = fy - lab[2] / 200.0;
    let ratios = [lab_f_inv(fx), lab_f_inv(fy), lab_f_inv(fz)];
    if lab[1] == 0.0 && lab[2] == 0.0 {
        return ratios;
    }
    let w = white_point();
    mul(
        &xyz_to_rgb(),
        [ratios[0] * w[0], ratios[1] * w[1], ratios[2] * w[2]],
    )
}

pub fn srgb_to_lab(rgb: [f64; 3]) -> [f64; 3] {
    linear_rgb_to_lab([
        srgb_to_linear(rgb[0]),
        srgb_to_linear(rgb[1]),
        srgb_to_linear(rgb[2]),
    ])
}

pub fn lab_to_srgb(lab: [f64; 3]) -> [f64; 3] {
    let lin = lab_to_linear_rgb(lab);
    [
        linear_to_srgb(lin[0].clamp(0.0, 1.0)),
        linear_to_srgb(lin[1].clamp(0.0, 1.0)),
        linear_to_srgb(lin[2].clamp(0.0, 1.0)),
    ]
}

pub fn srgb_to_hsv(rgb: [f64; 3]) -> [f64; 3] {
    let [r, g, b] = rgb;
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    let s = if max > 0.0 { delta / max } else { 0.0 };
    let h = if delta == 0.0 {
        0.0
    } else if max == r {
        ((g - b) / delta).rem_euclid(6.0)
    } else if max == g {
        (b - r) / delta + 2.0
    } else {
        (r - g) / delta + 4.0
    };
    let h = (h / 6.0).rem_euclid(1.0);
    [h, s, max]
}

pub fn hsv_to_srgb(hsv: [f64; 3]) -> [f64; 3] {
    let [h, s, v] = hsv;
    if s == 0.0 {
        return [v, v, v];
    }
    let h6 = (h.rem_euclid(1.0)) * 6.0;
    let sector = h6.floor();
    let f = h6 - sector;
    let p = v * (1.0 - s);
    let q = v * (1.0 - s * f);
    let t = v * (1.0 - s * (1.0 - f));
    match sector as i64 {
        0 => [v, t, p],
        1 => [q, v, p],
        2 => [p, v, t],
        3 => [p, q, v],
        4 => [t, p, v],
        _ => [v, p, q],
    }
}

#[inline]
pub fn luma(rgb: [f64; 3]) -> f64 {
    LUMA[0] * rgb[0] + LUMA[1] * rgb[1] + LUMA[2] * rgb[2]
}

fn map_pixels(img: &RasterImage, space: ColorSpace, f: impl Fn([f64; 3]) -> [f64; 3]) -> RasterImage {
    let (w, h) = (img.width(), img.height());
    let n = img.pixel_count();
    let mut out = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for i in 0..n {
        let v = f(img.pixel(i));
        out[0][i] = v[0];
        out[1][i] = v[1];
        out[2][i] = v[2];
    }
    let planes = out
        .into_iter()
        .map(|d| Plane::new(w, h, d).expect("plane size"))
        .collect();
    RasterImage::from_valid_planes(space, planes)
}

fn to_srgb(img: &RasterImage) -> RasterImage {
    match img.space() {
        ColorSpace::SrgbUnit => img.clone(),
        ColorSpace::Gray => map_pixels(img, ColorSpace::SrgbUnit, |p| p),
        ColorSpace::LinearRgb => map_pixels(img, ColorSpace::SrgbUnit, |p| {
            [
                linear_to_srgb(p[0].clamp(0.0, 1.0)),
                linear_to_srgb(p[1].clamp(0.0, 1.0)),
                linear_to_srgb(p[2].clamp(0.0, 1.0)),
            ]
        }),
        ColorSpace::Cielab => map_pixels(img, ColorSpace::SrgbUnit, lab_to_srgb),
        ColorSpace::Hsv => map_pixels(img, ColorSpace::SrgbUnit, hsv_to_srgb),
    }
}

/// Converts `img` into `target`.
///
/// Every pair routes through gamma-encoded sRGB except linear RGB to and
/// from CIELAB, which goes direct so out-of-gamut linear values survive.
/// Gray targets use [`LUMA`] on the sRGB values.
pub fn convert(img: &RasterImage, target: ColorSpace) -> Result<RasterImage, ImagingError> {
    let source = img.space();
    if source == target {
        return Ok(img.clone());
    }
    let out = match (source, target) {
        (ColorSpace::LinearRgb, ColorSpace::Cielab) => {
            map_pixels(img, ColorSpace::Cielab, linear_rgb_to_lab)
        }
        (ColorSpace::Cielab, ColorSpace::LinearRgb) => {
            map_pixels(img, ColorSpace::LinearRgb, lab_to_linear_rgb)
        }
        (_, ColorSpace::SrgbUnit) => to_srgb(img),
        (_, ColorSpace::Gray) => {
            let rgb = to_srgb(img);
            let data = (0..rgb.pixel_count()).map(|i| luma(rgb.pixel(i))).collect();
            let plane = Plane::new(rgb.width(), rgb.height(), data)?;
            RasterImage::from_valid_planes(ColorSpace::Gray, vec![plane])
        }
        (_, ColorSpace::Cielab) => map_pixels(&to_srgb(img), ColorSpace::Cielab, srgb_to_lab),
        (_, ColorSpace::Hsv) => map_pixels(&to_srgb(img), ColorSpace::Hsv, srgb_to_hsv),
        (_, ColorSpace::LinearRgb) => map_pixels(&to_srgb(img), ColorSpace::LinearRgb, |p| {
            [srgb_to_linear(p[0]), srgb_to_linear(p[1]), srgb_to_linear(p[2])]
        }),
    };
    Ok(out)
}
