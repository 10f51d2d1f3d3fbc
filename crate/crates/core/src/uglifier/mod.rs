//! The Uglifier: deterministic manipulation modules, replayable scripts,
//! editing sessions and automatic uglification from recorded scripts.

mod ops;
mod palette;
mod script;
mod session;
mod step;

#[cfg(test)]
mod tests;

pub use ops::{
    add_noise, adjust_contrast, adjust_lightness, apply_step, blur_sharpen, channel_gain,
    channel_permute, crop_fraction, crop_rect, gaussian_noise_planes, grayscale, invert_colors,
    palette_presets, phase_noise, phase_noise_field, unsharp_plane, EngineConfig,
};
pub use palette::{
    lab_statistics, palette_exchange, reference_swatch, transfer_statistics, LabStats,
    PalettePreset,
};
pub use script::{
    apply_script, apply_script_with, apply_steps, auto_uglify, ManipulationScript, ScriptLabel,
    AUTO_AUTHOR, SCRIPT_FORMAT_VERSION,
};
pub use session::ManipulationSession;
pub use step::{param_ranges, ParamRange, Step, StepKind, StepRecord};

use crate::imaging::ImagingError;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("parameter {param} = {value} outside [{lo}, {hi}]")]
    ParamOutOfRange {
        param: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("{kind:?} step is missing parameter {param}")]
    MissingParam { kind: StepKind, param: &'static str },
    #[error("{0:?} step requires a seed")]
    MissingSeed(StepKind),
    #[error("invalid channel permutation {0:?}")]
    InvalidPermutation([usize; 3]),
    #[error("crop rectangle extends outside the frame")]
    CropOutsideFrame,
    #[error("unknown palette preset {0:?}")]
    UnknownPreset(String),
    #[error("step {index} failed: {source}")]
    StepFailed {
        index: usize,
        #[source]
        source: Box<EngineError>,
    },
    #[error("malformed script: {0}")]
    ScriptFormat(String),
    #[error("auto-uglified script lacks a provenance script id")]
    MissingProvenance,
    #[error("recorded script pool is empty")]
    EmptyPool,
    #[error("recorded script {0} is not labeled UGLIFIED")]
    NotUglified(usize),
    #[error("duplicate image id {0}")]
    IdCollision(String),
    #[error("cannot save an empty script")]
    EmptyScript,
    #[error(transparent)]
    Imaging(#[from] ImagingError),
}
