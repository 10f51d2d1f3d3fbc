use serde::{Deserialize, Serialize};

use super::ImagingError;

/// Smallest width or height accepted for a [`RasterImage`].
pub const MIN_SIDE: usize = 8;

const RANGE_EPS: f64 = 1e-9;

/// Color space tag carried by every [`RasterImage`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ColorSpace {
    /// Gamma-encoded sRGB, each channel in [0, 1].
    SrgbUnit,
    /// Linear-light sRGB primaries. Not range constrained.
    LinearRgb,
    /// CIELAB relative to D65, L in [0, 100].
    Cielab,
    /// Hue, saturation, value, each in [0, 1].
    Hsv,
    /// Single luma plane in [0, 1].
    Gray,
}

impl ColorSpace {
    pub fn plane_count(self) -> usize {
        match self {
            ColorSpace::Gray => 1,
            _ => 3,
        }
    }
}

/// A single row-major floating point raster.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Plane {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self, ImagingError> {
        if data.len() != width * height {
            return Err(ImagingError::PlaneSize {
                expected: width * height,
                actual: data.len(),
            });
        }
        Ok(Plane {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Plane {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Plane {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.data[y * self.width + x] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Plane {
        Plane {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Element-wise combination of two planes of equal size.
    pub fn zip_map(&self, other: &Plane, f: impl Fn(f64, f64) -> f64) -> Plane {
        debug_assert_eq!(self.width, other.width);
        debug_assert_eq!(self.height, other.height);
        Plane {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Sequential mean, fixed reduction order.
    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn transpose(&self) -> Plane {
        let mut data = vec![0.0; self.data.len()];
        for y in 0..self.height {
            for x in 0..self.width {
                data[x * self.height + y] = self.data[y * self.width + x];
            }
        }
        Plane {
            width: self.height,
            height: self.width,
            data,
        }
    }

    pub fn sub_rect(&self, x0: usize, y0: usize, w: usize, h: usize) -> Plane {
        let mut data = Vec::with_capacity(w * h);
        for y in y0..y0 + h {
            data.extend_from_slice(&self.data[y * self.width + x0..y * self.width + x0 + w]);
        }
        Plane {
            width: w,
            height: h,
            data,
        }
    }
}

/// Planar floating point image with a color space tag.
///
/// All planes share the same dimensions, both sides are at least
/// [`MIN_SIDE`], and the per-space range invariants hold at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    planes: Vec<Plane>,
    space: ColorSpace,
}

impl RasterImage {
    pub fn new(space: ColorSpace, planes: Vec<Plane>) -> Result<Self, ImagingError> {
        if planes.len() != space.plane_count() {
            return Err(ImagingError::PlaneCount {
                space,
                expected: space.plane_count(),
                actual: planes.len(),
            });
        }
        let (width, height) = (planes[0].width, planes[0].height);
        if planes.iter().any(|p| p.width != width || p.height != height) {
            return Err(ImagingError::MismatchedPlanes);
        }
        if width < MIN_SIDE || height < MIN_SIDE {
            return Err(ImagingError::TooSmall { width, height });
        }
        check_ranges(space, &planes)?;
        Ok(RasterImage {
            width,
            height,
            planes,
            space,
        })
    }

    /// Builds an image from planes that already satisfy the invariants.
    /// Values within rounding distance of a range bound are clamped onto it.
    pub(crate) fn from_valid_planes(space: ColorSpace, mut planes: Vec<Plane>) -> Self {
        debug_assert_eq!(planes.len(), space.plane_count());
        clamp_ranges(space, &mut planes);
        let (width, height) = (planes[0].width, planes[0].height);
        RasterImage {
            width,
            height,
            planes,
            space,
        }
    }

    pub fn uniform(space: ColorSpace, width: usize, height: usize, values: &[f64]) -> Result<Self, ImagingError> {
        let planes = values
            .iter()
            .map(|&v| Plane::filled(width, height, v))
            .collect();
        RasterImage::new(space, planes)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn space(&self) -> ColorSpace {
        self.space
    }

    pub fn planes(&self) -> &[Plane] {
        &self.planes
    }

    pub fn plane(&self, index: usize) -> &Plane {
        &self.planes[index]
    }

    pub fn into_planes(self) -> Vec<Plane> {
        self.planes
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    /// All channel values of pixel `i` in row-major order.
    pub fn pixel(&self, i: usize) -> [f64; 3] {
        match self.planes.len() {
            1 => {
                let v = self.planes[0].data[i];
                [v, v, v]
            }
            _ => [
                self.planes[0].data[i],
                self.planes[1].data[i],
                self.planes[2].data[i],
            ],
        }
    }
}

fn space_bounds(space: ColorSpace, plane: usize) -> Option<(f64, f64)> {
    match (space, plane) {
        (ColorSpace::SrgbUnit | ColorSpace::Hsv | ColorSpace::Gray, _) => Some((0.0, 1.0)),
        (ColorSpace::Cielab, 0) => Some((0.0, 100.0)),
        _ => None,
    }
}

fn check_ranges(space: ColorSpace, planes: &[Plane]) -> Result<(), ImagingError> {
    for (k, plane) in planes.iter().enumerate() {
        if let Some(bad) = plane.data.iter().find(|v| !v.is_finite()) {
            return Err(ImagingError::OutOfRange {
                space,
                plane: k,
                value: *bad,
            });
        }
        if let Some((lo, hi)) = space_bounds(space, k) {
            if let Some(bad) = plane
                .data
                .iter()
                .find(|&&v| v < lo - RANGE_EPS || v > hi + RANGE_EPS)
            {
                return Err(ImagingError::OutOfRange {
                    space,
                    plane: k,
                    value: *bad,
                });
            }
        }
    }
    Ok(())
}

fn clamp_ranges(space: ColorSpace, planes: &mut [Plane]) {
    for (k, plane) in planes.iter_mut().enumerate() {
        if let Some((lo, hi)) = space_bounds(space, k) {
            for v in &mut plane.data {
                *v = v.clamp(lo, hi);
            }
        }
    }
}
