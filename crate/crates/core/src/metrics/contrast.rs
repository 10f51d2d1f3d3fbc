//! Chromatic and achromatic multiscale contrast from DoG responses of
//! the CIELAB planes.

use crate::imaging::{convert, gaussian_blur_plane, ColorSpace, Plane, RasterImage};

use super::MetricError;

/// Scales stop once sigma would fall below this many pixels.
pub const MIN_DOG_SIGMA: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiscaleContrast {
    pub c_lab: f64,
    pub c_l: f64,
    pub c_ab: f64,
}

/// Center sigmas: half the diagonal, halved while at least [`MIN_DOG_SIGMA`].
pub fn dog_scales(width: usize, height: usize) -> Vec<f64> {
    let mut sigma = ((width * width + height * height) as f64).sqrt() / 2.0;
    let mut scales = Vec::new();
    while sigma >= MIN_DOG_SIGMA {
        scales.push(sigma);
        sigma /= 2.0;
    }
    scales
}

/// DoG responses `G(s) - G(2s)` of one plane at every scale. Blurs are
/// shared between neighbouring scales since `2 s_{k+1} = s_k`.
pub fn dog_stack(plane: &Plane, scales: &[f64]) -> Vec<Plane> {
    if scales.is_empty() {
        return Vec::new();
    }
    let mut surround = gaussian_blur_plane(plane, 2.0 * scales[0]);
    let mut out = Vec::with_capacity(scales.len());
    for &sigma in scales {
        let center = gaussian_blur_plane(plane, sigma);
        out.push(center.zip_map(&surround, |c, s| c - s));
        surround = center;
    }
    out
}

pub fn multiscale_contrast(img: &RasterImage) -> Result<MultiscaleContrast, MetricError> {
    let scales = dog_scales(img.width(), img.height());
    if scales.is_empty() {
        return Err(MetricError::NoScales {
            width: img.width(),
            height: img.height(),
        });
    }
    let lab = convert(img, ColorSpace::Cielab)?;
    let stacks: Vec<Vec<Plane>> = lab.planes().iter().map(|p| dog_stack(p, &scales)).collect();
    let n = lab.pixel_count() as f64;
    let (mut sum_lab, mut sum_l, mut sum_ab) = (0.0, 0.0, 0.0);
    for k in 0..scales.len() {
        let (dl, da, db) = (stacks[0][k].data(), stacks[1][k].data(), stacks[2][k].data());
        let (mut s_lab, mut s_l, mut s_ab) = (0.0, 0.0, 0.0);
        for i in 0..dl.len() {
            let l2 = dl[i] * dl[i];
            let ab2 = da[i] * da[i] + db[i] * db[i];
            s_lab += (l2 + ab2).sqrt();
            s_l += dl[i].abs();
            s_ab += ab2.sqrt();
        }
        sum_lab += s_lab / n;
        sum_l += s_l / n;
        sum_ab += s_ab / n;
    }
    let m = scales.len() as f64;
    Ok(MultiscaleContrast {
        c_lab: sum_lab / m,
        c_l: sum_l / m,
        c_ab: sum_ab / m,
    })
}
