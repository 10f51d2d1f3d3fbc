//! Image metrics: contrast, colorfulness, focus, Fourier slopes and
//! complexity, gathered into a [`MetricRecord`].

mod color;
mod complexity;
mod contrast;
mod focus;
mod gcf;
mod record;
mod scramble;
mod spectral;

pub use color::{
    gamut_colorfulness, hsv_saturation, mean_lightness, perceived_colorfulness,
    COLORFULNESS_MEAN_WEIGHT,
};
pub use complexity::{
    complexity_ce_sc, max_dog_magnitude, pooling_window, Complexity, CE_SIGMAS,
    MIN_COMPLEXITY_SIDE, POOL_AREA_FRACTION, SC_SIGMAS,
};
pub use contrast::{dog_scales, dog_stack, multiscale_contrast, MultiscaleContrast, MIN_DOG_SIGMA};
pub use focus::focus_measure;
pub use gcf::{gcf_weight, global_contrast_factor, halve, local_contrast, perceptual_lightness, GCF_LEVELS};
pub use record::{
    compute_all, csv_header, external_columns, read_metrics_csv, write_metrics_csv, MetricRecord,
    EXTERNAL_PREFIX, METRIC_COLUMNS, NA,
};
pub use scramble::{block_scramble, scramble_rgb};
pub use spectral::{
    alpha_traditional, alpha_unbiased, fit_line, oneoverf_residual, power_law_plane,
    MIN_OCTAVE_BANDS,
};

use crate::imaging::ImagingError;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("image {width}x{height} admits no DoG scale of at least 4 px")]
    NoScales { width: usize, height: usize },
    #[error("image {width}x{height} is below the {min} px minimum side")]
    TooSmall { width: usize, height: usize, min: usize },
    #[error("square crop of side {side} gives {bands} octave bands, need 4")]
    TooFewBands { side: usize, bands: usize },
    #[error("undefined: {0}")]
    Undefined(&'static str),
    #[error("metric csv: {0}")]
    Csv(String),
    #[error(transparent)]
    Imaging(#[from] ImagingError),
}
