//! Fourier amplitude slopes and the residual to an ideal 1/f spectrum.

use rustfft::num_complex::Complex64;

use crate::imaging::{convert, fft2_real, ifft2, ColorSpace, Plane, RasterImage, SeededRandom};

use super::MetricError;

/// Fewest octave bands the unbiased estimator fits a line through.
pub const MIN_OCTAVE_BANDS: usize = 4;

/// Slopes below this total spectral energy are undefined.
const ENERGY_FLOOR: f64 = 1e-20;

/// Radial amplitude samples of the mean-subtracted centred square crop.
struct RadialSpectrum {
    side: usize,
    /// `(radius, amplitude)` for every nonzero frequency.
    samples: Vec<(f64, f64)>,
}

fn gray_square(img: &RasterImage) -> Plane {
    let gray = convert(img, ColorSpace::Gray).expect("every space converts to gray");
    let p = gray.plane(0);
    let side = p.width().min(p.height());
    p.sub_rect((p.width() - side) / 2, (p.height() - side) / 2, side, side)
}

fn radial_spectrum(img: &RasterImage) -> Result<RadialSpectrum, MetricError> {
    let square = gray_square(img);
    let side = square.width();
    let mean = square.mean();
    let centred = square.map(|v| v - mean);
    let spectrum = fft2_real(&centred);
    let mut samples = Vec::with_capacity(side * side);
    let mut energy = 0.0;
    for ky in 0..side {
        let fy = signed(ky, side);
        for kx in 0..side {
            let fx = signed(kx, side);
            if fx == 0 && fy == 0 {
                continue;
            }
            let amp = spectrum[ky * side + kx].norm();
            energy += amp * amp;
            samples.push((((fx * fx + fy * fy) as f64).sqrt(), amp));
        }
    }
    if energy < ENERGY_FLOOR {
        return Err(MetricError::Undefined("image has no spectral energy"));
    }
    Ok(RadialSpectrum { side, samples })
}

#[inline]
fn signed(k: usize, n: usize) -> isize {
    if k <= n / 2 {
        k as isize
    } else {
        k as isize - n as isize
    }
}

/// Ordinary least-squares slope and intercept of `y` on `x`.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Mean amplitude per unit-width annulus `round(r) = f`, for `f = 1 ..= side/2`.
fn annulus_means(rs: &RadialSpectrum) -> (Vec<f64>, Vec<f64>) {
    let nyquist = rs.side / 2;
    let mut sum = vec![0.0; nyquist + 1];
    let mut count = vec![0usize; nyquist + 1];
    for &(r, a) in &rs.samples {
        let f = r.round() as usize;
        if (1..=nyquist).contains(&f) {
            sum[f] += a;
            count[f] += 1;
        }
    }
    let mut x = Vec::new();
    let mut y = Vec::new();
    for f in 1..=nyquist {
        if count[f] > 0 && sum[f] > 0.0 {
            x.push((f as f64).log10());
            y.push((sum[f] / count[f] as f64).log10());
        }
    }
    (x, y)
}

/// Octave bands `[2^k, 2^(k+1))` lying below Nyquist, each placed at the
/// geometric mean radius of the samples it holds. Returns log10 positions
/// and log10 mean amplitudes.
fn octave_bands(rs: &RadialSpectrum) -> Result<(Vec<f64>, Vec<f64>), MetricError> {
    let nyquist = (rs.side / 2) as f64;
    let mut bands = 0usize;
    while (1u64 << (bands + 1)) as f64 <= nyquist {
        bands += 1;
    }
    if bands < MIN_OCTAVE_BANDS {
        return Err(MetricError::TooFewBands { side: rs.side, bands });
    }
    let mut amp_sum = vec![0.0; bands];
    let mut log_r_sum = vec![0.0; bands];
    let mut count = vec![0usize; bands];
    for &(r, a) in &rs.samples {
        let k = r.log2().floor();
        if k >= 0.0 && (k as usize) < bands {
            let k = k as usize;
            amp_sum[k] += a;
            log_r_sum[k] += r.log10();
            count[k] += 1;
        }
    }
    let mut x = Vec::with_capacity(bands);
    let mut y = Vec::with_capacity(bands);
    for k in 0..bands {
        if amp_sum[k] > 0.0 {
            x.push(log_r_sum[k] / count[k] as f64);
            y.push((amp_sum[k] / count[k] as f64).log10());
        }
    }
    if x.len() < MIN_OCTAVE_BANDS {
        return Err(MetricError::Undefined("too few octave bands carry energy"));
    }
    Ok((x, y))
}

pub fn alpha_traditional(img: &RasterImage) -> Result<f64, MetricError> {
    let (x, y) = annulus_means(&radial_spectrum(img)?);
    if x.len() < 2 {
        return Err(MetricError::Undefined("too few frequency annuli"));
    }
    Ok(fit_line(&x, &y).0)
}

pub fn alpha_unbiased(img: &RasterImage) -> Result<f64, MetricError> {
    let (x, y) = octave_bands(&radial_spectrum(img)?)?;
    Ok(fit_line(&x, &y).0)
}

/// Sum of squared residuals of the octave-band spectrum about the best
/// line of slope −1.
pub fn oneoverf_residual(img: &RasterImage) -> Result<f64, MetricError> {
    let (x, y) = octave_bands(&radial_spectrum(img)?)?;
    let c = x.iter().zip(&y).map(|(x, y)| y + x).sum::<f64>() / x.len() as f64;
    Ok(x.iter().zip(&y).map(|(x, y)| (y + x - c).powi(2)).sum())
}

/// Square test plane whose amplitude spectrum is exactly `f^-beta` with
/// seeded uniform random phase. Values are zero-mean and unscaled.
pub fn power_law_plane(side: usize, beta: f64, seed: u64) -> Plane {
    let mut rng = SeededRandom::new(seed);
    let mut spec = vec![Complex64::new(0.0, 0.0); side * side];
    for ky in 0..side {
        for kx in 0..side {
            let (fx, fy) = (signed(kx, side), signed(ky, side));
            let (mx, my) = ((side - kx) % side, (side - ky) % side);
            let i = ky * side + kx;
            let mirror = my * side + mx;
            if (fx == 0 && fy == 0) || mirror < i {
                continue;
            }
            let amp = ((fx * fx + fy * fy) as f64).sqrt().powf(-beta);
            if mirror == i {
                spec[i] = Complex64::new(amp, 0.0);
            } else {
                let phi = rng.uniform(-std::f64::consts::PI, std::f64::consts::PI);
                spec[i] = Complex64::from_polar(amp, phi);
                spec[mirror] = spec[i].conj();
            }
        }
    }
    let values = ifft2(&spec, side, side).into_iter().map(|c| c.re).collect();
    Plane::new(side, side, values).expect("dimensions match")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gray(p: Plane) -> RasterImage {
        let (lo, hi) = p.data().iter().fold((f64::MAX, f64::MIN), |(l, h), &v| (l.min(v), h.max(v)));
        let scaled = p.map(|v| (v - lo) / (hi - lo));
        RasterImage::new(ColorSpace::Gray, vec![scaled]).unwrap()
    }

    fn white_noise(side: usize, seed: u64) -> RasterImage {
        let mut rng = SeededRandom::new(seed);
        gray(Plane::from_fn(side, side, |_, _| rng.next_f64()))
    }

    #[test]
    fn constant_is_undefined() {
        let img = RasterImage::uniform(ColorSpace::Gray, 64, 64, &[0.5]).unwrap();
        assert!(matches!(alpha_traditional(&img), Err(MetricError::Undefined(_))));
        assert!(matches!(alpha_unbiased(&img), Err(MetricError::Undefined(_))));
        assert!(oneoverf_residual(&img).is_err());
    }

    #[test]
    fn white_noise_is_flat() {
        let img = white_noise(256, 3);
        assert!(alpha_traditional(&img).unwrap().abs() < 0.1);
        assert!(alpha_unbiased(&img).unwrap().abs() < 0.1);
    }

    #[test]
    fn power_law_recovered() {
        for (i, beta) in [0.5, 1.0, 1.5].into_iter().enumerate() {
            let img = gray(power_law_plane(256, beta, 10 + i as u64));
            let t = alpha_traditional(&img).unwrap();
            let u = alpha_unbiased(&img).unwrap();
            assert!((t + beta).abs() < 0.05, "beta {beta}: traditional {t}");
            assert!((u + beta).abs() < 0.05, "beta {beta}: unbiased {u}");
            assert!((t - u).abs() < 0.05);
        }
    }

    #[test]
    fn residual_properties() {
        let pink = gray(power_law_plane(128, 1.0, 5));
        let r = oneoverf_residual(&pink).unwrap();
        assert!(r < 1e-3, "{r}");
        assert!(oneoverf_residual(&white_noise(128, 6)).unwrap() > r);
        let noise = white_noise(64, 8);
        let dim = RasterImage::new(ColorSpace::Gray, vec![noise.plane(0).map(|v| 0.25 * v)]).unwrap();
        let (a, b) = (oneoverf_residual(&noise).unwrap(), oneoverf_residual(&dim).unwrap());
        assert!((a - b).abs() < 1e-9 * a.max(1.0));
    }

    #[test]
    fn band_requirement() {
        let small = white_noise(31, 2);
        assert!(matches!(alpha_unbiased(&small), Err(MetricError::TooFewBands { bands: 3, .. })));
        assert!(alpha_unbiased(&white_noise(32, 2)).is_ok());
        assert!(alpha_traditional(&small).is_ok());
    }

    #[test]
    fn non_square_uses_centre_crop() {
        let p = power_law_plane(64, 1.0, 1);
        let wide = Plane::from_fn(96, 64, |x, y| if (16..80).contains(&x) { p.get(x - 16, y) } else { 0.3 });
        let a = alpha_traditional(&gray(p)).unwrap();
        let b = alpha_traditional(&gray(wide)).unwrap();
        assert!((a - b).abs() < 1e-9, "{a} {b}");
    }
}
