//! Contrast energy (CE) and spatial coherence (SC) from small- and
//! large-scale DoG magnitude maps of the CIELAB planes.

use crate::imaging::{convert, dog_plane, ColorSpace, Plane, RasterImage};

use super::MetricError;

pub const CE_SIGMAS: [f64; 3] = [1.0, 2.0, 4.0];
pub const SC_SIGMAS: [f64; 3] = [4.0, 8.0, 16.0];
/// Fraction of the image area pooled, centred.
pub const POOL_AREA_FRACTION: f64 = 0.8;
pub const MIN_COMPLEXITY_SIDE: usize = 32;
/// Pooled SC means below this are treated as a constant plane.
const SC_MEAN_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Complexity {
    pub ce: f64,
    /// `None` when no plane carries large-scale contrast.
    pub sc: Option<f64>,
}

/// Per-pixel maximum of `|DoG_sigma|` over `sigmas`.
pub fn max_dog_magnitude(plane: &Plane, sigmas: &[f64]) -> Plane {
    let mut out = Plane::filled(plane.width(), plane.height(), 0.0);
    for &s in sigmas {
        let d = dog_plane(plane, s);
        for (o, v) in out.data_mut().iter_mut().zip(d.data()) {
            *o = o.max(v.abs());
        }
    }
    out
}

/// Centred window covering [`POOL_AREA_FRACTION`] of the area.
pub fn pooling_window(width: usize, height: usize) -> (usize, usize, usize, usize) {
    let f = POOL_AREA_FRACTION.sqrt();
    let w = ((width as f64 * f).round() as usize).clamp(1, width);
    let h = ((height as f64 * f).round() as usize).clamp(1, height);
    ((width - w) / 2, (height - h) / 2, w, h)
}

pub fn complexity_ce_sc(img: &RasterImage) -> Result<Complexity, MetricError> {
    let (w, h) = (img.width(), img.height());
    if w.min(h) < MIN_COMPLEXITY_SIDE {
        return Err(MetricError::TooSmall {
            width: w,
            height: h,
            min: MIN_COMPLEXITY_SIDE,
        });
    }
    let lab = convert(img, ColorSpace::Cielab)?;
    let (x0, y0, pw, ph) = pooling_window(w, h);
    let mut ce = 0.0;
    let mut sc_sum = 0.0;
    let mut sc_planes = 0usize;
    for plane in lab.planes() {
        let ce_map = max_dog_magnitude(plane, &CE_SIGMAS).sub_rect(x0, y0, pw, ph);
        ce += ce_map.mean();
        let sc_map = max_dog_magnitude(plane, &SC_SIGMAS).sub_rect(x0, y0, pw, ph);
        let m = sc_map.mean();
        if m >= SC_MEAN_FLOOR {
            let var = sc_map.data().iter().map(|v| (v - m).powi(2)).sum::<f64>() / sc_map.len() as f64;
            sc_sum += var.sqrt() / m;
            sc_planes += 1;
        }
    }
    Ok(Complexity {
        ce: ce / lab.planes().len() as f64,
        sc: (sc_planes > 0).then(|| sc_sum / sc_planes as f64),
    })
}
