use proptest::prelude::*;

use super::*;
use crate::imaging::{convert, plane_spectrum, ColorSpace, Plane, RasterImage, SeededRandom};

fn textured(w: usize, h: usize, seed: u64) -> RasterImage {
    let mut rng = SeededRandom::new(seed);
    let planes = (0..3)
        .map(|c| {
            let phase = c as f64 * 0.9;
            Plane::from_fn(w, h, |x, y| {
                let base = 0.5
                    + 0.2 * ((x as f64 * 0.31 + phase).sin() * (y as f64 * 0.17).cos())
                    + 0.1 * (x as f64 * 0.05 + y as f64 * 0.07).sin();
                (base + 0.1 * (rng.next_f64() - 0.5)).clamp(0.0, 1.0)
            })
        })
        .collect();
    RasterImage::new(ColorSpace::SrgbUnit, planes).unwrap()
}

fn max_abs_diff(a: &Plane, b: &Plane) -> f64 {
    a.data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn lab(img: &RasterImage) -> RasterImage {
    convert(img, ColorSpace::Cielab).unwrap()
}

fn cfg() -> EngineConfig {
    EngineConfig::default()
}

#[test]
fn neutral_parameters_are_bit_exact_identity() {
    let img = textured(24, 20, 1);
    let neutral = [
        Step::Lightness { t: 0.0 },
        Step::Contrast { t: 0.0 },
        Step::ColorInvert { s: 0.0 },
        Step::PhaseNoise { s: 0.0, seed: 5 },
        Step::ChannelGain { gains: [1.0; 3] },
        Step::ChannelPermute { order: [0, 1, 2] },
        Step::RandomNoise { s: 0.0, seed: 5 },
        Step::BlurSharpen { t: 0.0 },
        Step::Crop { x: 0.0, y: 0.0, w: 1.0, h: 1.0 },
    ];
    for step in neutral {
        assert!(step.is_neutral());
        let out = apply_step(&img, &step, &cfg()).unwrap();
        assert_eq!(out, img, "{step:?}");
    }
}

#[test]
fn lightness_examples() {
    let img = RasterImage::uniform(ColorSpace::Cielab, 8, 8, &[40.0, 10.0, -5.0]).unwrap();
    let out = adjust_lightness(&img, 0.25, &cfg()).unwrap();
    assert!((out.plane(0).data()[0] - 65.0).abs() < 1e-12);
    assert_eq!(out.plane(1).data()[0], 10.0);
    let full = adjust_lightness(&textured(16, 16, 2), 1.0, &cfg()).unwrap();
    assert!(full.plane(0).data().iter().all(|&l| l == 100.0));
    assert!(adjust_lightness(&img, 1.01, &cfg()).is_err());
}

#[test]
fn contrast_scales_spread() {
    let img = textured(32, 32, 3);
    let before = lab(&img);
    let out = adjust_contrast(&img, -1.0, &cfg()).unwrap();
    let std = |p: &Plane| {
        let m = p.mean();
        (p.data().iter().map(|v| (v - m).powi(2)).sum::<f64>() / p.len() as f64).sqrt()
    };
    let ratio = std(out.plane(0)) / std(before.plane(0));
    assert!((ratio - 0.25).abs() < 1e-9, "{ratio}");
    assert!((out.plane(0).mean() - before.plane(0).mean()).abs() < 1e-9);

    let flat = RasterImage::uniform(ColorSpace::Cielab, 8, 8, &[30.0, 1.0, 2.0]).unwrap();
    for t in [-1.0, 0.3, 1.0] {
        let o = adjust_contrast(&flat, t, &cfg()).unwrap();
        assert!(max_abs_diff(o.plane(0), flat.plane(0)) < 1e-12);
    }
}

#[test]
fn inversion_properties() {
    let img = textured(16, 16, 4);
    let base = lab(&img);
    let twice = invert_colors(&invert_colors(&img, 1.0).unwrap(), 1.0).unwrap();
    for k in 0..3 {
        assert!(max_abs_diff(twice.plane(k), base.plane(k)) < 1e-9);
    }
    let half = invert_colors(&img, 0.5).unwrap();
    assert!(half.plane(0).data().iter().all(|&l| (l - 50.0).abs() < 1e-12));
    assert!(half.plane(1).data().iter().all(|&a| a == 0.0));
    assert!(half.plane(2).data().iter().all(|&b| b == 0.0));
}

#[test]
fn script_of_two_inversions_restores_original_up_to_quantization() {
    let img = textured(16, 16, 4);
    let script = ManipulationScript::new("src", ScriptLabel::Uglified, "me").with_steps(vec![
        Step::ColorInvert { s: 1.0 },
        Step::ColorInvert { s: 1.0 },
    ]);
    let out = apply_script(&img, &script).unwrap();
    let back = convert(&out, ColorSpace::SrgbUnit).unwrap();
    for k in 0..3 {
        assert!(max_abs_diff(back.plane(k), img.plane(k)) < 1e-6);
    }
    assert_eq!(apply_script(&img, &ManipulationScript::new("src", ScriptLabel::Uglified, "me")).unwrap(), img);
}

fn amplitude_defect(a: &Plane, b: &Plane) -> f64 {
    let sa = plane_spectrum(a);
    let sb = plane_spectrum(b);
    let peak = sa.amplitude().iter().cloned().fold(0.0, f64::max);
    sa.amplitude()
        .iter()
        .zip(sb.amplitude())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
        / peak
}

#[test]
fn phase_noise_keeps_amplitudes_and_is_deterministic() {
    let img = textured(33, 24, 5);
    let linear = convert(&img, ColorSpace::LinearRgb).unwrap();
    for s in [0.25, 0.5, 1.0] {
        let out = phase_noise(&img, s, &mut SeededRandom::new(9)).unwrap();
        assert_eq!(out.space(), ColorSpace::LinearRgb);
        for k in 0..3 {
            assert!(amplitude_defect(linear.plane(k), out.plane(k)) < 1e-6);
        }
        let again = phase_noise(&img, s, &mut SeededRandom::new(9)).unwrap();
        assert_eq!(out, again);
    }
    let scrambled = phase_noise(&img, 1.0, &mut SeededRandom::new(9)).unwrap();
    assert!(max_abs_diff(scrambled.plane(0), linear.plane(0)) > 0.05);
}

#[test]
fn phase_field_is_odd() {
    let (w, h) = (6, 5);
    let f = phase_noise_field(w, h, &mut SeededRandom::new(1));
    for y in 0..h {
        for x in 0..w {
            let m = ((h - y) % h) * w + (w - x) % w;
            assert_eq!(f[y * w + x], -f[m]);
        }
    }
    assert_eq!(f[0], 0.0);
}

#[test]
fn channel_examples() {
    let img = textured(16, 16, 6);
    let swap = [1, 0, 2];
    let twice = channel_permute(&channel_permute(&img, swap).unwrap(), swap).unwrap();
    assert_eq!(twice, img);
    let once = channel_permute(&img, swap).unwrap();
    assert_eq!(once.plane(0), img.plane(1));

    let gained = channel_gain(&img, [2.0, 0.0, 1.0]).unwrap();
    assert!(gained.plane(1).data().iter().all(|&v| v == 0.0));
    assert!(gained.plane(0).data().iter().all(|&v| v <= 1.0));
    assert!(channel_gain(&img, [2.1, 1.0, 1.0]).is_err());
    assert!(channel_permute(&img, [0, 2, 2]).is_err());

    let gray = grayscale(&img);
    let l = lab(&gray);
    assert!(l.plane(1).data().iter().all(|&a| a == 0.0));
    assert!(l.plane(2).data().iter().all(|&b| b == 0.0));
    let hsv = convert(&gray, ColorSpace::Hsv).unwrap();
    assert!(hsv.plane(1).data().iter().all(|&s| s == 0.0));
}

#[test]
fn noise_statistics_and_determinism() {
    let gray = RasterImage::uniform(ColorSpace::SrgbUnit, 128, 128, &[0.5; 3]).unwrap();
    let raw = gaussian_noise_planes(128, 128, 0.25, &mut SeededRandom::new(21));
    for p in &raw {
        let m = p.mean();
        let sd = (p.data().iter().map(|v| (v - m).powi(2)).sum::<f64>() / p.len() as f64).sqrt();
        assert!((sd - 0.25).abs() < 0.25 * 0.02, "{sd}");
    }
    let out = add_noise(&gray, 1.0, &mut SeededRandom::new(21), &cfg()).unwrap();
    let again = add_noise(&gray, 1.0, &mut SeededRandom::new(21), &cfg()).unwrap();
    assert_eq!(out, again);
    // Clamping to [0, 1] clips the normal at +-2 sigma around mid-gray.
    let clipped_sd = 0.25 * 0.959_4;
    for p in out.planes() {
        assert!(p.data().iter().all(|v| (0.0..=1.0).contains(v)));
        let m = p.mean();
        let sd = (p.data().iter().map(|v| (v - m).powi(2)).sum::<f64>() / p.len() as f64).sqrt();
        assert!((sd - clipped_sd).abs() < clipped_sd * 0.02, "{sd}");
    }
    let other = add_noise(&gray, 1.0, &mut SeededRandom::new(22), &cfg()).unwrap();
    assert_ne!(out, other);
}

#[test]
fn sharpen_overshoots_step_edges() {
    let p = Plane::from_fn(32, 16, |x, _| if x < 16 { 0.25 } else { 0.75 });
    let img = RasterImage::new(ColorSpace::SrgbUnit, vec![p.clone(), p.clone(), p.clone()]).unwrap();
    let raw = unsharp_plane(&p, 3.0, 2.0);
    let max = raw.data().iter().cloned().fold(f64::MIN, f64::max);
    let min = raw.data().iter().cloned().fold(f64::MAX, f64::min);
    assert!(max > 0.75 && min < 0.25);
    let out = blur_sharpen(&img, 1.0, &cfg()).unwrap();
    assert!(out.plane(0).data().iter().any(|&v| v > 0.75));
    let blurred = blur_sharpen(&img, -1.0, &cfg()).unwrap();
    let edge = blurred.plane(0).get(16, 8);
    assert!(edge > 0.25 && edge < 0.75);
}

#[test]
fn palette_presets_match_swatches() {
    for preset in PalettePreset::ALL {
        let measured = lab_statistics(&reference_swatch(preset));
        let shipped = preset.stats();
        for k in 0..3 {
            assert!((measured.mean[k] - shipped.mean[k]).abs() < 1e-9, "{preset} mean {k}");
            assert!((measured.std[k] - shipped.std[k]).abs() < 1e-9, "{preset} std {k}");
        }
    }
    assert!(PalettePreset::Reddish.stats().mean[1] > 15.0);
}

#[test]
fn palette_transfer_properties() {
    let img = textured(40, 32, 7);
    let own = lab_statistics(&img);
    let same = transfer_statistics(&img, &own);
    let base = lab(&img);
    for k in 0..3 {
        assert!(max_abs_diff(same.plane(k), base.plane(k)) < 1e-6);
    }
    for preset in PalettePreset::ALL {
        let out = palette_exchange(&img, preset);
        let got = lab_statistics(&out);
        let want = preset.stats();
        for k in 0..3 {
            assert!((got.mean[k] - want.mean[k]).abs() <= 0.02 * want.mean[k].abs().max(1.0), "{preset}");
            assert!((got.std[k] - want.std[k]).abs() <= 0.02 * want.std[k], "{preset}");
        }
        let twice = palette_exchange(&out, preset);
        for k in 0..3 {
            assert!(max_abs_diff(twice.plane(k), out.plane(k)) < 1e-6, "{preset}");
        }
    }
    assert!(palette_exchange(&img, PalettePreset::Reddish).plane(1).mean() > 15.0);
    assert!("PURPLISH".parse::<PalettePreset>().is_err());
}

#[test]
fn crop_step_uses_fractions() {
    let img = textured(40, 20, 8);
    let out = crop_fraction(&img, 0.25, 0.0, 0.5, 0.5).unwrap();
    assert_eq!((out.width(), out.height()), (20, 10));
    assert_eq!(out.plane(0).get(0, 0), img.plane(0).get(10, 0));
    assert!(crop_fraction(&img, 0.0, 0.0, 0.1, 0.1).is_err());
}

#[test]
fn script_failure_reports_index() {
    let img = textured(16, 16, 9);
    let script = ManipulationScript::new("src", ScriptLabel::Uglified, "me").with_steps(vec![
        Step::Lightness { t: 0.1 },
        Step::Crop { x: 0.0, y: 0.0, w: 0.3, h: 0.3 },
        Step::Grayscale,
    ]);
    match apply_script(&img, &script) {
        Err(EngineError::StepFailed { index, .. }) => assert_eq!(index, 1),
        other => panic!("unexpected {other:?}"),
    }
}

fn sample_script(label: ScriptLabel) -> ManipulationScript {
    ManipulationScript::new("orig-1", label, "alice").with_steps(vec![
        Step::Contrast { t: -0.4 },
        Step::PhaseNoise { s: 0.3, seed: 11 },
        Step::PaletteExchange { preset: PalettePreset::Greenish },
        Step::Crop { x: 0.1, y: 0.1, w: 0.8, h: 0.8 },
    ])
}

#[test]
fn script_json_layout() {
    let script = sample_script(ScriptLabel::Uglified);
    let json = script.to_json();
    assert!(json.starts_with(r#"{"version":1,"sourceImageId":"orig-1","label":"UGLIFIED","authorId":"alice","steps":[{"kind":"CONTRAST""#));
    assert!(!json.contains("provenance"));
    let back = ManipulationScript::from_json(&json).unwrap();
    assert_eq!(back, script);
    assert_eq!(back.script_id(), script.script_id());
    assert_eq!(script.script_id().len(), 16);

    let mut auto = script.clone();
    auto.label = ScriptLabel::AutoUglified;
    assert!(matches!(
        ManipulationScript::from_json(&auto.to_json()),
        Err(EngineError::MissingProvenance)
    ));
}

#[test]
fn auto_uglify_examples() {
    let pool = vec![sample_script(ScriptLabel::Uglified)];
    let originals: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
    let out = auto_uglify(&originals, &pool, &mut SeededRandom::new(7)).unwrap();
    assert_eq!(out.len(), 3);
    let pid = pool[0].script_id();
    for (script, original) in out.iter().zip(&originals) {
        assert_eq!(script.label, ScriptLabel::AutoUglified);
        assert_eq!(script.provenance_script_id.as_deref(), Some(pid.as_str()));
        assert_eq!(&script.source_image_id, original);
        assert_ne!(script.steps[1].seed(), Some(11));
        assert_eq!(script.steps[0], pool[0].steps[0]);
    }
    let rerun = auto_uglify(&originals, &pool, &mut SeededRandom::new(7)).unwrap();
    assert_eq!(out, rerun);

    assert!(matches!(auto_uglify(&originals, &[], &mut SeededRandom::new(1)), Err(EngineError::EmptyPool)));
    let beautified = vec![sample_script(ScriptLabel::Beautified)];
    assert!(matches!(
        auto_uglify(&originals, &beautified, &mut SeededRandom::new(1)),
        Err(EngineError::NotUglified(0))
    ));
    let dup = vec!["a".to_string(), "a".to_string()];
    assert!(matches!(auto_uglify(&dup, &pool, &mut SeededRandom::new(1)), Err(EngineError::IdCollision(_))));
}

#[test]
fn auto_uglify_draws_with_replacement_at_corpus_scale() {
    let pool: Vec<ManipulationScript> = (0..872)
        .map(|i| {
            let mut s = sample_script(ScriptLabel::Uglified);
            s.source_image_id = format!("recorded-{i}");
            s
        })
        .collect();
    let originals: Vec<String> = (0..2951).map(|i| format!("orig-{i}")).collect();
    let out = auto_uglify(&originals, &pool, &mut SeededRandom::new(2024)).unwrap();
    assert_eq!(out.len(), 2951);
    let ids: std::collections::BTreeSet<String> = pool.iter().map(|s| s.script_id()).collect();
    let mut counts = std::collections::BTreeMap::new();
    for s in &out {
        let p = s.provenance_script_id.clone().unwrap();
        assert!(ids.contains(&p));
        *counts.entry(p).or_insert(0usize) += 1;
    }
    assert!(counts.values().any(|&c| c > 1));
    // Expected coverage of 872 items after 2,951 draws is about 96.6%.
    assert!(counts.len() > 800, "{}", counts.len());
}

#[test]
fn session_undo_reset_save() {
    let img = textured(16, 16, 10);
    let mut session = ManipulationSession::new("src", img.clone(), ScriptLabel::Uglified, "bob", cfg());
    session.reset();
    assert_eq!(session.preview(), &img);
    assert!(matches!(session.save(), Err(EngineError::EmptyScript)));
    session.apply(Step::ColorInvert { s: 0.7 }).unwrap();
    assert_ne!(session.preview(), &img);
    assert!(session.undo().unwrap());
    assert_eq!(session.preview(), &img);
    assert!(!session.undo().unwrap());
    session.apply(Step::Lightness { t: -0.2 }).unwrap();
    session.apply(Step::RandomNoise { s: 0.4, seed: 3 }).unwrap();
    assert!(session.apply(Step::Contrast { t: 3.0 }).is_err());
    assert_eq!(session.depth(), 2);
    let script = session.save().unwrap();
    assert_eq!(&apply_script(&img, &script).unwrap(), session.preview());
    assert_eq!(session.original(), &img);
}

fn arb_step() -> impl Strategy<Value = Step> {
    prop_oneof![
        (-1.0f64..=1.0).prop_map(|t| Step::Lightness { t }),
        (-1.0f64..=1.0).prop_map(|t| Step::Contrast { t }),
        (0.0f64..=1.0).prop_map(|s| Step::ColorInvert { s }),
        (0.0f64..=1.0, any::<u64>()).prop_map(|(s, seed)| Step::PhaseNoise { s, seed }),
        prop::array::uniform3(0.0f64..=2.0).prop_map(|gains| Step::ChannelGain { gains }),
        Just(Step::ChannelPermute { order: [2, 0, 1] }),
        Just(Step::Grayscale),
        (0.0f64..=1.0, any::<u64>()).prop_map(|(s, seed)| Step::RandomNoise { s, seed }),
        (-1.0f64..=1.0).prop_map(|t| Step::BlurSharpen { t }),
        prop::sample::select(PalettePreset::ALL.to_vec()).prop_map(|preset| Step::PaletteExchange { preset }),
        (0.0f64..0.3, 0.0f64..0.3, 0.5f64..0.7, 0.5f64..0.7).prop_map(|(x, y, w, h)| Step::Crop { x, y, w, h }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn script_json_round_trips(steps in prop::collection::vec(arb_step(), 0..8)) {
        let script = ManipulationScript::new("x", ScriptLabel::Beautified, "y").with_steps(steps);
        let back = ManipulationScript::from_json(&script.to_json()).unwrap();
        prop_assert_eq!(&back, &script);
        prop_assert_eq!(back.to_json(), script.to_json());
    }

    #[test]
    fn outputs_remain_valid(step in arb_step()) {
        let img = textured(24, 24, 12);
        let out = apply_step(&img, &step, &cfg()).unwrap();
        // Re-validating through the public constructor checks every range invariant.
        prop_assert!(RasterImage::new(out.space(), out.planes().to_vec()).is_ok());
    }
}
