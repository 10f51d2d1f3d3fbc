use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::palette::PalettePreset;
use super::EngineError;

/// Kind tag of a manipulation step as written in script files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StepKind {
    Lightness,
    Contrast,
    ColorInvert,
    PhaseNoise,
    ChannelGain,
    ChannelPermute,
    Grayscale,
    RandomNoise,
    BlurSharpen,
    PaletteExchange,
    Crop,
}

impl StepKind {
    pub const ALL: [StepKind; 11] = [
        StepKind::Lightness,
        StepKind::Contrast,
        StepKind::ColorInvert,
        StepKind::PhaseNoise,
        StepKind::ChannelGain,
        StepKind::ChannelPermute,
        StepKind::Grayscale,
        StepKind::RandomNoise,
        StepKind::BlurSharpen,
        StepKind::PaletteExchange,
        StepKind::Crop,
    ];
}

/// Declared range of one continuous step parameter, for slider UIs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamRange {
    pub kind: StepKind,
    pub param: &'static str,
    pub min: f64,
    pub max: f64,
    pub neutral: f64,
}

pub fn param_ranges() -> Vec<ParamRange> {
    let r = |kind, param, min, max, neutral| ParamRange {
        kind,
        param,
        min,
        max,
        neutral,
    };
    vec![
        r(StepKind::Lightness, "t", -1.0, 1.0, 0.0),
        r(StepKind::Contrast, "t", -1.0, 1.0, 0.0),
        r(StepKind::ColorInvert, "s", 0.0, 1.0, 0.0),
        r(StepKind::PhaseNoise, "s", 0.0, 1.0, 0.0),
        r(StepKind::ChannelGain, "gains", 0.0, 2.0, 1.0),
        r(StepKind::RandomNoise, "s", 0.0, 1.0, 0.0),
        r(StepKind::BlurSharpen, "t", -1.0, 1.0, 0.0),
        r(StepKind::Crop, "x", 0.0, 1.0, 0.0),
        r(StepKind::Crop, "y", 0.0, 1.0, 0.0),
        r(StepKind::Crop, "w", 0.0, 1.0, 1.0),
        r(StepKind::Crop, "h", 0.0, 1.0, 1.0),
    ]
}

/// One Uglifier manipulation with its parameters.
///
/// Slider parameters `t` span [-1, 1] and `s` spans [0, 1]. Crop
/// rectangles are fractions of the frame they are applied to.
#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    Lightness { t: f64 },
    Contrast { t: f64 },
    ColorInvert { s: f64 },
    PhaseNoise { s: f64, seed: u64 },
    ChannelGain { gains: [f64; 3] },
    /// Output channel `c` takes input channel `order[c]`.
    ChannelPermute { order: [usize; 3] },
    Grayscale,
    RandomNoise { s: f64, seed: u64 },
    BlurSharpen { t: f64 },
    PaletteExchange { preset: PalettePreset },
    Crop { x: f64, y: f64, w: f64, h: f64 },
}

fn check_range(name: &'static str, v: f64, lo: f64, hi: f64) -> Result<(), EngineError> {
    if v.is_finite() && (lo..=hi).contains(&v) {
        Ok(())
    } else {
        Err(EngineError::ParamOutOfRange {
            param: name,
            value: v,
            lo,
            hi,
        })
    }
}

impl Step {
    pub fn kind(&self) -> StepKind {
        match self {
            Step::Lightness { .. } => StepKind::Lightness,
            Step::Contrast { .. } => StepKind::Contrast,
            Step::ColorInvert { .. } => StepKind::ColorInvert,
            Step::PhaseNoise { .. } => StepKind::PhaseNoise,
            Step::ChannelGain { .. } => StepKind::ChannelGain,
            Step::ChannelPermute { .. } => StepKind::ChannelPermute,
            Step::Grayscale => StepKind::Grayscale,
            Step::RandomNoise { .. } => StepKind::RandomNoise,
            Step::BlurSharpen { .. } => StepKind::BlurSharpen,
            Step::PaletteExchange { .. } => StepKind::PaletteExchange,
            Step::Crop { .. } => StepKind::Crop,
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Step::PhaseNoise { seed, .. } | Step::RandomNoise { seed, .. } => Some(*seed),
            _ => None,
        }
    }

    pub fn is_stochastic(&self) -> bool {
        self.seed().is_some()
    }

    /// Replaces the seed of a stochastic step; no-op otherwise.
    pub fn with_seed(&self, new_seed: u64) -> Step {
        match self {
            Step::PhaseNoise { s, .. } => Step::PhaseNoise { s: *s, seed: new_seed },
            Step::RandomNoise { s, .. } => Step::RandomNoise { s: *s, seed: new_seed },
            other => other.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        match self {
            Step::Lightness { t } | Step::Contrast { t } | Step::BlurSharpen { t } => {
                check_range("t", *t, -1.0, 1.0)
            }
            Step::ColorInvert { s } | Step::PhaseNoise { s, .. } | Step::RandomNoise { s, .. } => {
                check_range("s", *s, 0.0, 1.0)
            }
            Step::ChannelGain { gains } => gains
                .iter()
                .try_for_each(|g| check_range("gain", *g, 0.0, 2.0)),
            Step::ChannelPermute { order } => {
                let mut seen = [false; 3];
                for &c in order {
                    if c > 2 || seen[c] {
                        return Err(EngineError::InvalidPermutation(*order));
                    }
                    seen[c] = true;
                }
                Ok(())
            }
            Step::Grayscale | Step::PaletteExchange { .. } => Ok(()),
            Step::Crop { x, y, w, h } => {
                check_range("x", *x, 0.0, 1.0)?;
                check_range("y", *y, 0.0, 1.0)?;
                check_range("w", *w, 0.0, 1.0)?;
                check_range("h", *h, 0.0, 1.0)?;
                if x + w > 1.0 + 1e-12 || y + h > 1.0 + 1e-12 {
                    return Err(EngineError::CropOutsideFrame);
                }
                Ok(())
            }
        }
    }

    /// True when the parameters make this step the identity map.
    pub fn is_neutral(&self) -> bool {
        match self {
            Step::Lightness { t } | Step::Contrast { t } | Step::BlurSharpen { t } => *t == 0.0,
            Step::ColorInvert { s } | Step::PhaseNoise { s, .. } | Step::RandomNoise { s, .. } => {
                *s == 0.0
            }
            Step::ChannelGain { gains } => gains.iter().all(|g| *g == 1.0),
            Step::ChannelPermute { order } => *order == [0, 1, 2],
            Step::Crop { x, y, w, h } => *x == 0.0 && *y == 0.0 && *w == 1.0 && *h == 1.0,
            Step::Grayscale | Step::PaletteExchange { .. } => false,
        }
    }
}

/// Wire form of a step: `{kind, params, seed}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub kind: StepKind,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

impl From<&Step> for StepRecord {
    fn from(step: &Step) -> Self {
        let mut params = BTreeMap::new();
        match step {
            Step::Lightness { t } | Step::Contrast { t } | Step::BlurSharpen { t } => {
                params.insert("t".into(), num(*t));
            }
            Step::ColorInvert { s } | Step::PhaseNoise { s, .. } | Step::RandomNoise { s, .. } => {
                params.insert("s".into(), num(*s));
            }
            Step::ChannelGain { gains } => {
                params.insert("r".into(), num(gains[0]));
                params.insert("g".into(), num(gains[1]));
                params.insert("b".into(), num(gains[2]));
            }
            Step::ChannelPermute { order } => {
                params.insert("order".into(), Value::from(order.to_vec()));
            }
            Step::Grayscale => {}
            Step::PaletteExchange { preset } => {
                params.insert("preset".into(), Value::from(preset.name()));
            }
            Step::Crop { x, y, w, h } => {
                params.insert("x".into(), num(*x));
                params.insert("y".into(), num(*y));
                params.insert("w".into(), num(*w));
                params.insert("h".into(), num(*h));
            }
        }
        StepRecord {
            kind: step.kind(),
            params,
            seed: step.seed(),
        }
    }
}

impl From<Step> for StepRecord {
    fn from(step: Step) -> Self {
        StepRecord::from(&step)
    }
}

fn get_f64(rec: &StepRecord, name: &'static str) -> Result<f64, EngineError> {
    rec.params
        .get(name)
        .and_then(Value::as_f64)
        .ok_or(EngineError::MissingParam {
            kind: rec.kind,
            param: name,
        })
}

fn get_seed(rec: &StepRecord) -> Result<u64, EngineError> {
    rec.seed.ok_or(EngineError::MissingSeed(rec.kind))
}

impl TryFrom<StepRecord> for Step {
    type Error = EngineError;

    fn try_from(rec: StepRecord) -> Result<Self, Self::Error> {
        let step = match rec.kind {
            StepKind::Lightness => Step::Lightness { t: get_f64(&rec, "t")? },
            StepKind::Contrast => Step::Contrast { t: get_f64(&rec, "t")? },
            StepKind::BlurSharpen => Step::BlurSharpen { t: get_f64(&rec, "t")? },
            StepKind::ColorInvert => Step::ColorInvert { s: get_f64(&rec, "s")? },
            StepKind::PhaseNoise => Step::PhaseNoise {
                s: get_f64(&rec, "s")?,
                seed: get_seed(&rec)?,
            },
            StepKind::RandomNoise => Step::RandomNoise {
                s: get_f64(&rec, "s")?,
                seed: get_seed(&rec)?,
            },
            StepKind::ChannelGain => Step::ChannelGain {
                gains: [get_f64(&rec, "r")?, get_f64(&rec, "g")?, get_f64(&rec, "b")?],
            },
            StepKind::ChannelPermute => {
                let missing = EngineError::MissingParam {
                    kind: rec.kind,
                    param: "order",
                };
                let list = rec
                    .params
                    .get("order")
                    .and_then(Value::as_array)
                    .ok_or(missing.clone())?;
                if list.len() != 3 {
                    return Err(missing);
                }
                let mut order = [0usize; 3];
                for (slot, v) in order.iter_mut().zip(list) {
                    *slot = v.as_u64().ok_or(missing.clone())? as usize;
                }
                Step::ChannelPermute { order }
            }
            StepKind::Grayscale => Step::Grayscale,
            StepKind::PaletteExchange => {
                let name = rec
                    .params
                    .get("preset")
                    .and_then(Value::as_str)
                    .ok_or(EngineError::MissingParam {
                        kind: rec.kind,
                        param: "preset",
                    })?;
                Step::PaletteExchange {
                    preset: name.parse()?,
                }
            }
            StepKind::Crop => Step::Crop {
                x: get_f64(&rec, "x")?,
                y: get_f64(&rec, "y")?,
                w: get_f64(&rec, "w")?,
                h: get_f64(&rec, "h")?,
            },
        };
        step.validate()?;
        Ok(step)
    }
}

impl Serialize for Step {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        StepRecord::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Step {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rec = StepRecord::deserialize(deserializer)?;
        Step::try_from(rec).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wire_form() {
        let step = Step::PhaseNoise { s: 0.5, seed: 99 };
        let json = serde_json::to_string(&step).unwrap();
        assert_eq!(json, r#"{"kind":"PHASE_NOISE","params":{"s":0.5},"seed":99}"#);
        let gray = serde_json::to_string(&Step::Grayscale).unwrap();
        assert_eq!(gray, r#"{"kind":"GRAYSCALE","params":{},"seed":null}"#);
    }

    #[test]
    fn stochastic_steps_need_seeds() {
        let err = serde_json::from_str::<Step>(r#"{"kind":"RANDOM_NOISE","params":{"s":0.5}}"#);
        assert!(err.unwrap_err().to_string().contains("seed"));
    }

    #[test]
    fn validation() {
        assert!(Step::Lightness { t: 1.5 }.validate().is_err());
        assert!(Step::ColorInvert { s: -0.1 }.validate().is_err());
        assert!(Step::ChannelGain { gains: [1.0, 2.5, 1.0] }.validate().is_err());
        assert!(Step::ChannelPermute { order: [0, 0, 1] }.validate().is_err());
        assert!(Step::ChannelPermute { order: [0, 1, 3] }.validate().is_err());
        assert!(Step::Crop { x: 0.5, y: 0.0, w: 0.6, h: 1.0 }.validate().is_err());
        assert!(Step::Contrast { t: f64::NAN }.validate().is_err());
        assert!(Step::ChannelPermute { order: [2, 0, 1] }.validate().is_ok());
    }

    #[test]
    fn out_of_range_rejected_on_parse() {
        let bad = r#"{"kind":"LIGHTNESS","params":{"t":2.0},"seed":null}"#;
        assert!(serde_json::from_str::<Step>(bad).is_err());
        let unknown = r#"{"kind":"PALETTE_EXCHANGE","params":{"preset":"PURPLISH"},"seed":null}"#;
        assert!(serde_json::from_str::<Step>(unknown).is_err());
    }
}
