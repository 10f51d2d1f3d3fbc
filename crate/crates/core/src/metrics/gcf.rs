//! Global contrast factor: perceptual local contrast averaged over nine
//! resolution levels with fixed weights.

use crate::imaging::{convert, ColorSpace, Plane, RasterImage};

pub const GCF_LEVELS: usize = 9;

/// Weight of resolution level `i` (1-based).
pub fn gcf_weight(i: usize) -> f64 {
    let x = i as f64 / GCF_LEVELS as f64;
    (-0.406385 * x + 0.334573) * x + 0.0877526
}

/// Perceptual lightness `100 sqrt(k^2.2)` of a unit-scaled gamma value.
#[inline]
pub fn perceptual_lightness(k: f64) -> f64 {
    100.0 * k.powf(2.2).sqrt()
}

/// Mean over pixels of the average absolute difference to the existing
/// 4-neighbours, on perceptual lightness.
pub fn local_contrast(gray: &Plane) -> f64 {
    let (w, h) = (gray.width(), gray.height());
    let lum = gray.map(perceptual_lightness);
    let mut total = 0.0;
    for y in 0..h {
        for x in 0..w {
            let c = lum.get(x, y);
            let mut sum = 0.0;
            let mut count = 0usize;
            if x > 0 {
                sum += (c - lum.get(x - 1, y)).abs();
                count += 1;
            }
            if x + 1 < w {
                sum += (c - lum.get(x + 1, y)).abs();
                count += 1;
            }
            if y > 0 {
                sum += (c - lum.get(x, y - 1)).abs();
                count += 1;
            }
            if y + 1 < h {
                sum += (c - lum.get(x, y + 1)).abs();
                count += 1;
            }
            if count > 0 {
                total += sum / count as f64;
            }
        }
    }
    total / (w * h) as f64
}

/// Halves each side by averaging 2×2 blocks; an odd trailing row or
/// column is dropped. Sides never shrink below one pixel.
pub fn halve(p: &Plane) -> Plane {
    let (w, h) = (p.width(), p.height());
    let (nw, nh) = ((w / 2).max(1), (h / 2).max(1));
    Plane::from_fn(nw, nh, |x, y| {
        let xs = [2 * x, (2 * x + 1).min(w - 1)];
        let ys = [2 * y, (2 * y + 1).min(h - 1)];
        let mut s = 0.0;
        for &yy in &ys {
            for &xx in &xs {
                s += p.get(xx, yy);
            }
        }
        s / 4.0
    })
}

pub fn global_contrast_factor(img: &RasterImage) -> f64 {
    let gray = convert(img, ColorSpace::Gray).expect("every space converts to gray");
    let mut level = gray.plane(0).clone();
    let mut gcf = 0.0;
    for i in 1..=GCF_LEVELS {
        gcf += gcf_weight(i) * local_contrast(&level);
        level = halve(&level);
    }
    gcf
}
