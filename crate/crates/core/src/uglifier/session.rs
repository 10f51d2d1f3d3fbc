use crate::imaging::RasterImage;

use super::ops::EngineConfig;
use super::script::{apply_steps, ManipulationScript, ScriptLabel};
use super::step::Step;
use super::EngineError;

/// One user's editing state: the untouched original, the recorded steps,
/// and the preview replayed from them. Supports append, undo and reset.
#[derive(Debug, Clone)]
pub struct ManipulationSession {
    source_image_id: String,
    author_id: String,
    label: ScriptLabel,
    original: RasterImage,
    steps: Vec<Step>,
    preview: RasterImage,
    config: EngineConfig,
}

impl ManipulationSession {
    pub fn new(
        source_image_id: impl Into<String>,
        original: RasterImage,
        label: ScriptLabel,
        author_id: impl Into<String>,
        config: EngineConfig,
    ) -> Self {
        ManipulationSession {
            source_image_id: source_image_id.into(),
            author_id: author_id.into(),
            label,
            preview: original.clone(),
            original,
            steps: Vec::new(),
            config,
        }
    }

    pub fn original(&self) -> &RasterImage {
        &self.original
    }

    pub fn preview(&self) -> &RasterImage {
        &self.preview
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    pub fn label(&self) -> ScriptLabel {
        self.label
    }

    pub fn source_image_id(&self) -> &str {
        &self.source_image_id
    }

    /// Appends a step; the preview is replayed from the original so that it
    /// always equals what the saved script reproduces.
    pub fn apply(&mut self, step: Step) -> Result<&RasterImage, EngineError> {
        step.validate()?;
        let mut candidate = self.steps.clone();
        candidate.push(step);
        let preview = apply_steps(&self.original, &candidate, &self.config)?;
        self.steps = candidate;
        self.preview = preview;
        Ok(&self.preview)
    }

    /// Drops the last step. Returns false when there was nothing to undo.
    pub fn undo(&mut self) -> Result<bool, EngineError> {
        if self.steps.pop().is_none() {
            return Ok(false);
        }
        self.preview = apply_steps(&self.original, &self.steps, &self.config)?;
        Ok(true)
    }

    pub fn reset(&mut self) {
        self.steps.clear();
        self.preview = self.original.clone();
    }

    pub fn script(&self) -> ManipulationScript {
        ManipulationScript::new(self.source_image_id.clone(), self.label, self.author_id.clone())
            .with_steps(self.steps.clone())
    }

    /// Script to persist; refuses an empty history.
    pub fn save(&self) -> Result<ManipulationScript, EngineError> {
        if self.steps.is_empty() {
            return Err(EngineError::EmptyScript);
        }
        Ok(self.script())
    }
}
