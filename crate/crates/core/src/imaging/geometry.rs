use super::raster::{Plane, RasterImage, MIN_SIDE};
use super::ImagingError;

pub fn crop(img: &RasterImage, x: usize, y: usize, w: usize, h: usize) -> Result<RasterImage, ImagingError> {
    if w < MIN_SIDE || h < MIN_SIDE {
        return Err(ImagingError::TooSmall { width: w, height: h });
    }
    let fits = x.checked_add(w).is_some_and(|r| r <= img.width())
        && y.checked_add(h).is_some_and(|b| b <= img.height());
    if !fits {
        return Err(ImagingError::CropOutOfBounds {
            x,
            y,
            w,
            h,
            width: img.width(),
            height: img.height(),
        });
    }
    let planes = img.planes().iter().map(|p| p.sub_rect(x, y, w, h)).collect();
    Ok(RasterImage::from_valid_planes(img.space(), planes))
}

/// Output size when the longest side is scaled to `side`.
pub fn fitted_size(width: usize, height: usize, side: usize) -> (usize, usize) {
    let longest = width.max(height) as f64;
    let scale = side as f64 / longest;
    let w = ((width as f64 * scale).round() as usize).max(1);
    let h = ((height as f64 * scale).round() as usize).max(1);
    if width >= height {
        (side, h)
    } else {
        (w, side)
    }
}

/// Weights of a triangle (tent) filter resampling `src` samples to `dst`.
///
/// When shrinking, the tent is widened by the scale factor so each output
/// sample averages the inputs it covers. Weights are rows of `(start, w)`.
fn tent_weights(src: usize, dst: usize) -> Vec<(usize, Vec<f64>)> {
    let scale = src as f64 / dst as f64;
    let support = scale.max(1.0);
    (0..dst)
        .map(|i| {
            let center = (i as f64 + 0.5) * scale;
            let lo = ((center - support).floor().max(0.0)) as usize;
            let hi = ((center + support).ceil() as usize).min(src);
            let mut weights: Vec<f64> = (lo..hi)
                .map(|j| {
                    let d = ((j as f64 + 0.5) - center).abs() / support;
                    (1.0 - d).max(0.0)
                })
                .collect();
            let sum: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|w| *w /= sum);
            (lo, weights)
        })
        .collect()
}

fn resample_rows(plane: &Plane, dst_w: usize) -> Plane {
    let weights = tent_weights(plane.width(), dst_w);
    let mut out = Vec::with_capacity(dst_w * plane.height());
    for y in 0..plane.height() {
        let row = plane.row(y);
        for (start, w) in &weights {
            out.push(w.iter().enumerate().map(|(k, wk)| wk * row[start + k]).sum());
        }
    }
    Plane::new(dst_w, plane.height(), out).expect("resample size")
}

/// Rescales so the longest side equals `side`, using a separable tent
/// kernel evaluated in a fixed order.
pub fn resize_max_side(img: &RasterImage, side: usize) -> Result<RasterImage, ImagingError> {
    if side < MIN_SIDE {
        return Err(ImagingError::TooSmall {
            width: side,
            height: side,
        });
    }
    let (w, h) = fitted_size(img.width(), img.height(), side);
    if w < MIN_SIDE || h < MIN_SIDE {
        return Err(ImagingError::TooSmall { width: w, height: h });
    }
    let planes = img
        .planes()
        .iter()
        .map(|p| {
            let rows = resample_rows(p, w);
            resample_rows(&rows.transpose(), h).transpose()
        })
        .collect();
    Ok(RasterImage::from_valid_planes(img.space(), planes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::ColorSpace;

    fn gradient(w: usize, h: usize) -> RasterImage {
        let p = Plane::from_fn(w, h, |x, y| (x + y) as f64 / (w + h) as f64);
        RasterImage::new(ColorSpace::Gray, vec![p]).unwrap()
    }

    #[test]
    fn full_crop_is_identity() {
        let img = gradient(20, 15);
        assert_eq!(crop(&img, 0, 0, 20, 15).unwrap(), img);
    }

    #[test]
    fn crop_takes_leading_rows_and_columns() {
        let img = gradient(20, 15);
        let c = crop(&img, 0, 0, 10, 10).unwrap();
        for y in 0..10 {
            for x in 0..10 {
                assert_eq!(c.plane(0).get(x, y), img.plane(0).get(x, y));
            }
        }
        let off = crop(&img, 3, 2, 9, 8).unwrap();
        assert_eq!(off.plane(0).get(0, 0), img.plane(0).get(3, 2));
    }

    #[test]
    fn crop_errors() {
        let img = gradient(20, 15);
        assert!(matches!(crop(&img, 15, 0, 8, 8), Err(ImagingError::CropOutOfBounds { .. })));
        assert!(matches!(crop(&img, 0, 0, 7, 10), Err(ImagingError::TooSmall { .. })));
        assert!(crop(&img, usize::MAX, 0, 8, 8).is_err());
    }

    #[test]
    fn resize_keeps_aspect() {
        assert_eq!(fitted_size(1200, 800, 150), (150, 100));
        assert_eq!(fitted_size(800, 1200, 150), (100, 150));
        let img = gradient(120, 80);
        let r = resize_max_side(&img, 30).unwrap();
        assert_eq!((r.width(), r.height()), (30, 20));
        assert_eq!(r, resize_max_side(&img, 30).unwrap());
    }

    #[test]
    fn resize_preserves_constants_and_rejects_tiny() {
        let img = RasterImage::uniform(ColorSpace::SrgbUnit, 50, 40, &[0.2, 0.4, 0.6]).unwrap();
        let r = resize_max_side(&img, 17).unwrap();
        for v in r.plane(1).data() {
            assert!((v - 0.4).abs() < 1e-12);
        }
        assert!(resize_max_side(&img, 4).is_err());
        let wide = gradient(200, 10);
        assert!(resize_max_side(&wide, 20).is_err());
    }
}
