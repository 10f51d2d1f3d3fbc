use std::f64::consts::FRAC_1_SQRT_2;

use crate::imaging::{convert, filter3x3, ColorSpace, RasterImage};

const LAPLACE_X: [[f64; 3]; 3] = [[0.0, 0.0, 0.0], [-1.0, 2.0, -1.0], [0.0, 0.0, 0.0]];
const LAPLACE_Y: [[f64; 3]; 3] = [[0.0, -1.0, 0.0], [0.0, 2.0, 0.0], [0.0, -1.0, 0.0]];
const LAPLACE_D1: [[f64; 3]; 3] = [[0.0, 0.0, 1.0], [0.0, -2.0, 0.0], [1.0, 0.0, 0.0]];
const LAPLACE_D2: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, -2.0, 0.0], [0.0, 0.0, 1.0]];

/// Diagonal-Laplacian focus measure on the luma plane.
pub fn focus_measure(img: &RasterImage) -> f64 {
    let gray = convert(img, ColorSpace::Gray).expect("every space converts to gray");
    let p = gray.plane(0);
    let fx = filter3x3(p, &LAPLACE_X);
    let fy = filter3x3(p, &LAPLACE_Y);
    let d1 = filter3x3(p, &LAPLACE_D1);
    let d2 = filter3x3(p, &LAPLACE_D2);
    let n = p.len();
    let mut total = 0.0;
    for i in 0..n {
        total += fx.data()[i].abs()
            + fy.data()[i].abs()
            + FRAC_1_SQRT_2 * (d1.data()[i].abs() + d2.data()[i].abs());
    }
    total / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::{gaussian_filter, Plane};

    #[test]
    fn uniform_is_zero() {
        let img = RasterImage::uniform(ColorSpace::SrgbUnit, 12, 12, &[0.2, 0.4, 0.9]).unwrap();
        assert!(focus_measure(&img).abs() < 1e-12);
    }

    #[test]
    fn blur_lowers_focus() {
        let p = Plane::from_fn(32, 32, |x, y| (((x * 7 + y * 13) % 17) as f64) / 16.0);
        let img = RasterImage::new(ColorSpace::Gray, vec![p]).unwrap();
        let blurred = gaussian_filter(&img, 4.0).unwrap();
        assert!(focus_measure(&blurred) < focus_measure(&img));
    }
}
