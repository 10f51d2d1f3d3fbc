//! Colorfulness, saturation and lightness statistics.

use crate::imaging::{convert, ColorSpace, RasterImage};

/// Weight of the mean chroma term in [`perceived_colorfulness`].
pub const COLORFULNESS_MEAN_WEIGHT: f64 = 0.37;

fn lab(img: &RasterImage) -> RasterImage {
    convert(img, ColorSpace::Cielab).expect("every space converts to CIELAB")
}

/// Mean distance of pixels to the neutral axis in the a-b plane.
pub fn gamut_colorfulness(img: &RasterImage) -> f64 {
    let lab = lab(img);
    let (a, b) = (lab.plane(1).data(), lab.plane(2).data());
    a.iter().zip(b).map(|(a, b)| (a * a + b * b).sqrt()).sum::<f64>() / a.len() as f64
}

/// `sigma_ab + 0.37 mu_ab` over the a and b planes.
pub fn perceived_colorfulness(img: &RasterImage) -> f64 {
    let lab = lab(img);
    let stats = |k: usize| {
        let p = lab.plane(k);
        let m = p.mean();
        let var = p.data().iter().map(|v| (v - m).powi(2)).sum::<f64>() / p.len() as f64;
        (m, var)
    };
    let (ma, va) = stats(1);
    let (mb, vb) = stats(2);
    (va + vb).sqrt() + COLORFULNESS_MEAN_WEIGHT * (ma * ma + mb * mb).sqrt()
}

pub fn hsv_saturation(img: &RasterImage) -> f64 {
    let hsv = convert(img, ColorSpace::Hsv).expect("every space converts to HSV");
    hsv.plane(1).mean()
}

pub fn mean_lightness(img: &RasterImage) -> f64 {
    lab(img).plane(0).mean()
}
