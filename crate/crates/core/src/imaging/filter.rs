//! Gaussian and small-kernel filtering with mirror boundaries.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::raster::{Plane, RasterImage};
use super::ImagingError;

/// Above this sigma the separable passes run through the FFT.
pub const SPATIAL_SIGMA_LIMIT: f64 = 16.0;

/// Kernel half-width in units of sigma.
pub const KERNEL_RADIUS_SIGMAS: f64 = 4.0;

/// Half-sample symmetric reflection: `... c b a | a b c ... | z y x ...`,
/// applied repeatedly so any integer index maps into `0..n`.
#[inline]
pub fn reflect_index(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let j = i.rem_euclid(period);
    if j >= n as isize {
        (period - 1 - j) as usize
    } else {
        j as usize
    }
}

pub fn kernel_radius(sigma: f64) -> usize {
    (KERNEL_RADIUS_SIGMAS * sigma).ceil() as usize
}

/// Sampled 1-D Gaussian of length `2r + 1`, normalized to unit sum.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let r = kernel_radius(sigma) as isize;
    let denom = 2.0 * sigma * sigma;
    let mut k: Vec<f64> = (-r..=r).map(|i| (-(i * i) as f64 / denom).exp()).collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    k
}

fn convolve_rows_spatial(plane: &Plane, kernel: &[f64]) -> Plane {
    let (w, h) = (plane.width(), plane.height());
    let r = (kernel.len() / 2) as isize;
    let mut out = Vec::with_capacity(w * h);
    let mut padded = vec![0.0; w + 2 * r as usize];
    for y in 0..h {
        let row = plane.row(y);
        for (j, slot) in padded.iter_mut().enumerate() {
            *slot = row[reflect_index(j as isize - r, w)];
        }
        for x in 0..w {
            let window = &padded[x..x + kernel.len()];
            let acc: f64 = window.iter().zip(kernel).map(|(a, b)| a * b).sum();
            out.push(acc);
        }
    }
    Plane::new(w, h, out).expect("row convolution keeps size")
}

fn convolve_rows_fft(plane: &Plane, kernel: &[f64]) -> Plane {
    let (w, h) = (plane.width(), plane.height());
    let period = 2 * w;
    let r = (kernel.len() / 2) as isize;

    // The mirrored row is periodic with period 2w, so folding the kernel
    // onto that period turns the linear convolution into a cyclic one.
    let mut folded = vec![Complex64::new(0.0, 0.0); period];
    for (m, &k) in kernel.iter().enumerate() {
        let offset = (m as isize - r).rem_euclid(period as isize) as usize;
        folded[offset].re += k;
    }
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(period);
    let inv = planner.plan_fft_inverse(period);
    fwd.process(&mut folded);

    let scale = 1.0 / period as f64;
    let mut out = Vec::with_capacity(w * h);
    let mut buf = vec![Complex64::new(0.0, 0.0); period];
    for y in 0..h {
        let row = plane.row(y);
        for (j, slot) in buf.iter_mut().enumerate() {
            *slot = Complex64::new(row[reflect_index(j as isize, w)], 0.0);
        }
        fwd.process(&mut buf);
        for (b, k) in buf.iter_mut().zip(&folded) {
            *b *= k;
        }
        inv.process(&mut buf);
        out.extend(buf[..w].iter().map(|c| c.re * scale));
    }
    Plane::new(w, h, out).expect("row convolution keeps size")
}

/// Separable Gaussian blur of one plane. Spatial for small sigma, FFT for
/// sigma above [`SPATIAL_SIGMA_LIMIT`]; both produce the same result up to
/// rounding.
pub fn gaussian_blur_plane(plane: &Plane, sigma: f64) -> Plane {
    let kernel = gaussian_kernel(sigma);
    let pass: fn(&Plane, &[f64]) -> Plane = if sigma > SPATIAL_SIGMA_LIMIT {
        convolve_rows_fft
    } else {
        convolve_rows_spatial
    };
    let rows = pass(plane, &kernel);
    pass(&rows.transpose(), &kernel).transpose()
}

/// Gaussian blur through a specific route, exposed for cross-checking.
pub fn gaussian_blur_plane_via(plane: &Plane, sigma: f64, frequency_domain: bool) -> Plane {
    let kernel = gaussian_kernel(sigma);
    let pass: fn(&Plane, &[f64]) -> Plane = if frequency_domain {
        convolve_rows_fft
    } else {
        convolve_rows_spatial
    };
    let rows = pass(plane, &kernel);
    pass(&rows.transpose(), &kernel).transpose()
}

/// Circularly symmetric Gaussian filter applied to every plane.
pub fn gaussian_filter(img: &RasterImage, sigma: f64) -> Result<RasterImage, ImagingError> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(ImagingError::InvalidSigma(sigma));
    }
    let planes = img
        .planes()
        .iter()
        .map(|p| gaussian_blur_plane(p, sigma))
        .collect();
    Ok(RasterImage::from_valid_planes(img.space(), planes))
}

/// Difference of Gaussians `G(sigma) - G(2 sigma)` applied to one plane.
pub fn dog_plane(plane: &Plane, sigma: f64) -> Plane {
    let center = gaussian_blur_plane(plane, sigma);
    let surround = gaussian_blur_plane(plane, 2.0 * sigma);
    center.zip_map(&surround, |c, s| c - s)
}

/// 3×3 correlation with mirror boundaries.
pub fn filter3x3(plane: &Plane, kernel: &[[f64; 3]; 3]) -> Plane {
    let (w, h) = (plane.width(), plane.height());
    Plane::from_fn(w, h, |x, y| {
        let mut acc = 0.0;
        for (dy, krow) in kernel.iter().enumerate() {
            let yy = reflect_index(y as isize + dy as isize - 1, h);
            for (dx, &k) in krow.iter().enumerate() {
                if k != 0.0 {
                    let xx = reflect_index(x as isize + dx as isize - 1, w);
                    acc += k * plane.get(xx, yy);
                }
            }
        }
        acc
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::{ColorSpace, SeededRandom};

    fn random_plane(w: usize, h: usize, seed: u64) -> Plane {
        let mut rng = SeededRandom::new(seed);
        Plane::from_fn(w, h, |_, _| rng.next_f64())
    }

    /// Direct 2-D sum over the full square kernel window.
    fn brute_force(plane: &Plane, sigma: f64) -> Plane {
        let r = kernel_radius(sigma) as isize;
        let (w, h) = (plane.width(), plane.height());
        let mut norm = 0.0;
        for dy in -r..=r {
            for dx in -r..=r {
                norm += (-((dx * dx + dy * dy) as f64) / (2.0 * sigma * sigma)).exp();
            }
        }
        Plane::from_fn(w, h, |x, y| {
            let mut acc = 0.0;
            for dy in -r..=r {
                for dx in -r..=r {
                    let g = (-((dx * dx + dy * dy) as f64) / (2.0 * sigma * sigma)).exp();
                    let xx = reflect_index(x as isize + dx, w);
                    let yy = reflect_index(y as isize + dy, h);
                    acc += g * plane.get(xx, yy);
                }
            }
            acc / norm
        })
    }

    #[test]
    fn reflection_is_half_sample_symmetric() {
        let n = 4;
        let got: Vec<usize> = (-5..9).map(|i| reflect_index(i, n)).collect();
        assert_eq!(got, vec![3, 3, 2, 1, 0, 0, 1, 2, 3, 3, 2, 1, 0, 0]);
    }

    #[test]
    fn uniform_is_invariant() {
        let img = RasterImage::uniform(ColorSpace::SrgbUnit, 20, 12, &[0.3, 0.6, 0.9]).unwrap();
        for sigma in [0.5, 3.0, 20.0] {
            let out = gaussian_filter(&img, sigma).unwrap();
            for k in 0..3 {
                for (a, b) in out.plane(k).data().iter().zip(img.plane(k).data()) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn impulse_gives_normalized_gaussian() {
        let mut p = Plane::filled(33, 33, 0.0);
        p.set(16, 16, 1.0);
        let out = gaussian_blur_plane(&p, 2.0);
        let sum: f64 = out.data().iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        let g = |d: f64| (-d * d / 8.0).exp();
        let ratio = out.get(18, 16) / out.get(16, 16);
        assert!((ratio - g(2.0)).abs() < 1e-9);
        let diag = out.get(17, 17) / out.get(16, 16);
        assert!((diag - g(2f64.sqrt())).abs() < 1e-9);
    }

    #[test]
    fn step_edge_matches_brute_force() {
        let p = Plane::from_fn(40, 24, |x, _| if x < 20 { 0.0 } else { 1.0 });
        let fast = gaussian_blur_plane(&p, 4.0);
        let slow = brute_force(&p, 4.0);
        for (a, b) in fast.data().iter().zip(slow.data()) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn frequency_route_matches_spatial() {
        let p = random_plane(37, 21, 3);
        for sigma in [1.0, 5.0, 17.0, 40.0] {
            let a = gaussian_blur_plane_via(&p, sigma, false);
            let b = gaussian_blur_plane_via(&p, sigma, true);
            for (x, y) in a.data().iter().zip(b.data()) {
                assert!((x - y).abs() < 1e-10, "sigma {sigma}");
            }
        }
    }

    #[test]
    fn filtering_is_linear() {
        let x = random_plane(24, 30, 1);
        let y = random_plane(24, 30, 2);
        let (a, b) = (0.7, -1.3);
        let combo = x.zip_map(&y, |u, v| a * u + b * v);
        for sigma in [1.5, 18.0] {
            let lhs = gaussian_blur_plane(&combo, sigma);
            let fx = gaussian_blur_plane(&x, sigma);
            let fy = gaussian_blur_plane(&y, sigma);
            let rhs = fx.zip_map(&fy, |u, v| a * u + b * v);
            for (l, r) in lhs.data().iter().zip(rhs.data()) {
                assert!((l - r).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn mean_preserved() {
        let p = random_plane(64, 64, 9);
        let out = gaussian_blur_plane(&p, 2.0);
        assert!((out.mean() - p.mean()).abs() < 1e-10);
        let wide = gaussian_blur_plane(&p, 30.0);
        assert!((wide.mean() - p.mean()).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_sigma() {
        let img = RasterImage::uniform(ColorSpace::Gray, 8, 8, &[0.5]).unwrap();
        assert!(gaussian_filter(&img, 0.0).is_err());
        assert!(gaussian_filter(&img, -1.0).is_err());
        assert!(gaussian_filter(&img, f64::NAN).is_err());
    }
}
