use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::imaging::{RasterImage, SeededRandom};

use super::ops::{apply_step, EngineConfig};
use super::step::Step;
use super::EngineError;

pub const SCRIPT_FORMAT_VERSION: u32 = 1;

pub const AUTO_AUTHOR: &str = "auto-uglifier";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ScriptLabel {
    Uglified,
    Beautified,
    AutoUglified,
}

/// Ordered, seeded list of steps recorded for one source image.
///
/// The JSON field order is part of the replay contract.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ManipulationScript {
    pub version: u32,
    pub source_image_id: String,
    pub label: ScriptLabel,
    pub author_id: String,
    pub steps: Vec<Step>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance_script_id: Option<String>,
}

impl ManipulationScript {
    pub fn new(source_image_id: impl Into<String>, label: ScriptLabel, author_id: impl Into<String>) -> Self {
        ManipulationScript {
            version: SCRIPT_FORMAT_VERSION,
            source_image_id: source_image_id.into(),
            label,
            author_id: author_id.into(),
            steps: Vec::new(),
            provenance_script_id: None,
        }
    }

    pub fn with_steps(mut self, steps: Vec<Step>) -> Self {
        self.steps = steps;
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("scripts always serialize")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("scripts always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, EngineError> {
        let script: ManipulationScript =
            serde_json::from_str(text).map_err(|e| EngineError::ScriptFormat(e.to_string()))?;
        script.check()?;
        Ok(script)
    }

    fn check(&self) -> Result<(), EngineError> {
        if self.version != SCRIPT_FORMAT_VERSION {
            return Err(EngineError::ScriptFormat(format!(
                "unsupported script version {}",
                self.version
            )));
        }
        if self.label == ScriptLabel::AutoUglified && self.provenance_script_id.is_none() {
            return Err(EngineError::MissingProvenance);
        }
        Ok(())
    }

    /// Content id: first 16 hex digits of the SHA-256 of the compact JSON.
    pub fn script_id(&self) -> String {
        let digest = Sha256::digest(self.to_json().as_bytes());
        hex::encode(&digest[..8])
    }
}

/// Applies the steps left to right with the given engine constants.
pub fn apply_script_with(img: &RasterImage, script: &ManipulationScript, cfg: &EngineConfig) -> Result<RasterImage, EngineError> {
    apply_steps(img, &script.steps, cfg)
}

pub fn apply_script(img: &RasterImage, script: &ManipulationScript) -> Result<RasterImage, EngineError> {
    apply_script_with(img, script, &EngineConfig::default())
}

pub fn apply_steps(img: &RasterImage, steps: &[Step], cfg: &EngineConfig) -> Result<RasterImage, EngineError> {
    let mut current = img.clone();
    for (index, step) in steps.iter().enumerate() {
        current = step
            .validate()
            .and_then(|_| apply_step(&current, step, cfg))
            .map_err(|e| EngineError::StepFailed {
                index,
                source: Box::new(e),
            })?;
    }
    Ok(current)
}

/// Pairs every original with a uniformly drawn recorded uglification.
///
/// Stochastic steps get fresh seeds from `rng`. Crop steps are stored as
/// frame fractions and therefore rescale to each new image unchanged.
pub fn auto_uglify(
    originals: &[String],
    recorded: &[ManipulationScript],
    rng: &mut SeededRandom,
) -> Result<Vec<ManipulationScript>, EngineError> {
    if recorded.is_empty() {
        return Err(EngineError::EmptyPool);
    }
    if let Some(bad) = recorded.iter().position(|s| s.label != ScriptLabel::Uglified) {
        return Err(EngineError::NotUglified(bad));
    }
    let mut seen = BTreeSet::new();
    for id in originals {
        if !seen.insert(id.as_str()) {
            return Err(EngineError::IdCollision(id.clone()));
        }
    }
    let pool_ids: Vec<String> = recorded.iter().map(ManipulationScript::script_id).collect();
    let mut out = Vec::with_capacity(originals.len());
    for original in originals {
        let pick = rng.below(recorded.len() as u64) as usize;
        let steps = recorded[pick]
            .steps
            .iter()
            .map(|step| {
                if step.is_stochastic() {
                    step.with_seed(rng.next_u64())
                } else {
                    step.clone()
                }
            })
            .collect();
        let mut script = ManipulationScript::new(original.clone(), ScriptLabel::AutoUglified, AUTO_AUTHOR)
            .with_steps(steps);
        script.provenance_script_id = Some(pool_ids[pick].clone());
        out.push(script);
    }
    Ok(out)
}
