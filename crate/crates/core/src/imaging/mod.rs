//! Image representation, color conversion and shared signal processing.

mod color;
mod filter;
mod geometry;
mod io;
mod raster;
mod rng;
mod spectrum;

pub use color::{
    convert, hsv_to_srgb, lab_to_linear_rgb, lab_to_srgb, linear_rgb_to_lab, linear_to_srgb, luma,
    srgb_to_hsv, srgb_to_lab, srgb_to_linear, LUMA,
};
pub use filter::{
    dog_plane, filter3x3, gaussian_blur_plane, gaussian_blur_plane_via, gaussian_filter,
    gaussian_kernel, kernel_radius, reflect_index, KERNEL_RADIUS_SIGMAS, SPATIAL_SIGMA_LIMIT,
};
pub use geometry::{crop, fitted_size, resize_max_side};
pub use io::{decode_image, decode_planes, encode_png, load_image, save_png, to_rgb8};
pub use raster::{ColorSpace, Plane, RasterImage, MIN_SIDE};
pub use rng::{SeededRandom, RNG_ALGORITHM_VERSION};
pub use spectrum::{
    fft2, fft2_real, forward_spectrum, ifft2, inverse_spectrum, plane_from_spectrum,
    plane_spectrum, wrap_phase, Spectrum2D,
};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ImagingError {
    #[error("image {width}x{height} is smaller than the {MIN_SIDE}x{MIN_SIDE} minimum")]
    TooSmall { width: usize, height: usize },
    #[error("{space:?} expects {expected} planes, got {actual}")]
    PlaneCount {
        space: ColorSpace,
        expected: usize,
        actual: usize,
    },
    #[error("planes have different dimensions")]
    MismatchedPlanes,
    #[error("plane data has {actual} samples, expected {expected}")]
    PlaneSize { expected: usize, actual: usize },
    #[error("value {value} outside the range of {space:?} plane {plane}")]
    OutOfRange {
        space: ColorSpace,
        plane: usize,
        value: f64,
    },
    #[error("gaussian sigma must be positive, got {0}")]
    InvalidSigma(f64),
    #[error("spectrum input must be a gray image, got {0:?}")]
    NotGray(ColorSpace),
    #[error("spectrum is not Hermitian (relative defect {0:.3e}); inverse would be complex")]
    NonHermitian(f64),
    #[error("crop {w}x{h}+{x}+{y} exceeds {width}x{height} image")]
    CropOutOfBounds {
        x: usize,
        y: usize,
        w: usize,
        h: usize,
        width: usize,
        height: usize,
    },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("cannot decode image: {0}")]
    Decode(String),
    #[error("cannot encode image: {0}")]
    Encode(String),
}
