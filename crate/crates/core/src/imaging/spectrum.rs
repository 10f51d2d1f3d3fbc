//! Two-dimensional discrete Fourier transforms.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::raster::{ColorSpace, Plane, RasterImage};
use super::ImagingError;

const HERMITIAN_TOL: f64 = 1e-9;

/// Amplitude and phase of a 2-D DFT, DC at `(width / 2, height / 2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum2D {
    width: usize,
    height: usize,
    amplitude: Vec<f64>,
    phase: Vec<f64>,
}

impl Spectrum2D {
    pub fn from_parts(width: usize, height: usize, amplitude: Vec<f64>, phase: Vec<f64>) -> Result<Self, ImagingError> {
        if amplitude.len() != width * height || phase.len() != width * height {
            return Err(ImagingError::PlaneSize {
                expected: width * height,
                actual: amplitude.len().min(phase.len()),
            });
        }
        Ok(Spectrum2D {
            width,
            height,
            amplitude,
            phase,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn amplitude(&self) -> &[f64] {
        &self.amplitude
    }

    pub fn phase(&self) -> &[f64] {
        &self.phase
    }

    pub fn phase_mut(&mut self) -> &mut [f64] {
        &mut self.phase
    }

    /// Signed frequency `(fx, fy)` of the centered sample at `(x, y)`.
    pub fn frequency_at(&self, x: usize, y: usize) -> (isize, isize) {
        (
            x as isize - (self.width / 2) as isize,
            y as isize - (self.height / 2) as isize,
        )
    }

    /// Centered index of the sample holding frequency `(fx, fy)`, wrapping.
    pub fn index_of(&self, fx: isize, fy: isize) -> usize {
        let x = (fx + (self.width / 2) as isize).rem_euclid(self.width as isize) as usize;
        let y = (fy + (self.height / 2) as isize).rem_euclid(self.height as isize) as usize;
        y * self.width + x
    }

    fn to_complex_natural(&self) -> Vec<Complex64> {
        let (w, h) = (self.width, self.height);
        let mut out = vec![Complex64::new(0.0, 0.0); w * h];
        for y in 0..h {
            for x in 0..w {
                let (fx, fy) = self.frequency_at(x, y);
                let nx = fx.rem_euclid(w as isize) as usize;
                let ny = fy.rem_euclid(h as isize) as usize;
                let i = y * w + x;
                out[ny * w + nx] = Complex64::from_polar(self.amplitude[i], self.phase[i]);
            }
        }
        out
    }
}

/// Maps a phase angle into `(-pi, pi]`.
pub fn wrap_phase(phi: f64) -> f64 {
    let mut p = (phi + PI).rem_euclid(2.0 * PI) - PI;
    if p <= -PI {
        p += 2.0 * PI;
    }
    p
}

fn transform_rows(data: &mut [Complex64], w: usize, inverse: bool, planner: &mut FftPlanner<f64>) {
    let fft = if inverse {
        planner.plan_fft_inverse(w)
    } else {
        planner.plan_fft_forward(w)
    };
    for row in data.chunks_exact_mut(w) {
        fft.process(row);
    }
}

fn transpose(data: &[Complex64], w: usize, h: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); w * h];
    for y in 0..h {
        for x in 0..w {
            out[x * h + y] = data[y * w + x];
        }
    }
    out
}

/// Unnormalized forward 2-D DFT in natural (DC first) order.
pub fn fft2(data: &[Complex64], w: usize, h: usize) -> Vec<Complex64> {
    let mut planner = FftPlanner::new();
    let mut buf = data.to_vec();
    transform_rows(&mut buf, w, false, &mut planner);
    let mut t = transpose(&buf, w, h);
    transform_rows(&mut t, h, false, &mut planner);
    transpose(&t, h, w)
}

/// Inverse 2-D DFT including the `1 / (w h)` normalization.
pub fn ifft2(data: &[Complex64], w: usize, h: usize) -> Vec<Complex64> {
    let mut planner = FftPlanner::new();
    let mut buf = data.to_vec();
    transform_rows(&mut buf, w, true, &mut planner);
    let mut t = transpose(&buf, w, h);
    transform_rows(&mut t, h, true, &mut planner);
    let scale = 1.0 / (w * h) as f64;
    transpose(&t, h, w).into_iter().map(|c| c * scale).collect()
}

pub fn fft2_real(plane: &Plane) -> Vec<Complex64> {
    let data: Vec<Complex64> = plane.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft2(&data, plane.width(), plane.height())
}

/// Centered amplitude/phase spectrum of a single plane.
pub fn plane_spectrum(plane: &Plane) -> Spectrum2D {
    let (w, h) = (plane.width(), plane.height());
    let natural = fft2_real(plane);
    let mut amplitude = vec![0.0; w * h];
    let mut phase = vec![0.0; w * h];
    for ny in 0..h {
        for nx in 0..w {
            let c = natural[ny * w + nx];
            let x = (nx + w / 2) % w;
            let y = (ny + h / 2) % h;
            amplitude[y * w + x] = c.norm();
            phase[y * w + x] = wrap_phase(c.arg());
        }
    }
    Spectrum2D {
        width: w,
        height: h,
        amplitude,
        phase,
    }
}

/// Largest deviation from `X[k] = conj(X[-k])`, relative to the peak magnitude.
fn hermitian_defect(natural: &[Complex64], w: usize, h: usize) -> f64 {
    let peak = natural.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    let mut worst: f64 = 0.0;
    for y in 0..h {
        for x in 0..w {
            let mirror = ((h - y) % h) * w + (w - x) % w;
            let d = (natural[y * w + x] - natural[mirror].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst / peak
}

/// Inverse of [`plane_spectrum`]; fails when the spectrum is not Hermitian.
pub fn plane_from_spectrum(spec: &Spectrum2D) -> Result<Plane, ImagingError> {
    let (w, h) = (spec.width, spec.height);
    let natural = spec.to_complex_natural();
    let defect = hermitian_defect(&natural, w, h);
    if defect > HERMITIAN_TOL {
        return Err(ImagingError::NonHermitian(defect));
    }
    let out = ifft2(&natural, w, h);
    Plane::new(w, h, out.into_iter().map(|c| c.re).collect())
}

pub fn forward_spectrum(img: &RasterImage) -> Result<Spectrum2D, ImagingError> {
    if img.space() != ColorSpace::Gray {
        return Err(ImagingError::NotGray(img.space()));
    }
    Ok(plane_spectrum(img.plane(0)))
}

/// Reconstructs a gray image. Only the plane layout is validated, so values
/// may fall outside [0, 1] when the spectrum has been edited.
pub fn inverse_spectrum(spec: &Spectrum2D) -> Result<RasterImage, ImagingError> {
    let plane = plane_from_spectrum(spec)?;
    if plane.width() < super::raster::MIN_SIDE || plane.height() < super::raster::MIN_SIDE {
        return Err(ImagingError::TooSmall {
            width: plane.width(),
            height: plane.height(),
        });
    }
    Ok(RasterImage::from_valid_planes(ColorSpace::Gray, vec![plane]))
}
