//! Truncated-Gaussian fits of 5-point Likert vote histograms.

use serde::{Deserialize, Serialize};

use super::StatsError;

pub const MU_MIN: f64 = 0.5;
pub const MU_MAX: f64 = 5.5;
pub const SIGMA_MIN: f64 = 0.5;
/// Upper end of the coarse grid only; the refinement may go beyond it.
pub const SIGMA_GRID_MAX: f64 = 3.0;
pub const GRID_STEP: f64 = 0.05;

const REFINE_MIN_STEP: f64 = 1e-10;
const REFINE_MAX_ITER: usize = 5000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LikertHistogram {
    pub image_id: String,
    /// Votes for scores 1 through 5.
    pub counts: [u64; 5],
}

impl LikertHistogram {
    pub fn new(image_id: impl Into<String>, counts: [u64; 5]) -> Result<Self, StatsError> {
        let h = LikertHistogram {
            image_id: image_id.into(),
            counts,
        };
        if h.total() == 0 {
            return Err(StatsError::EmptyHistogram(h.image_id));
        }
        Ok(h)
    }

    /// Accepts signed counts so negative entries can be reported.
    pub fn from_signed(image_id: impl Into<String>, counts: [i64; 5]) -> Result<Self, StatsError> {
        let image_id = image_id.into();
        let mut out = [0u64; 5];
        for (o, &c) in out.iter_mut().zip(&counts) {
            if c < 0 {
                return Err(StatsError::NegativeCount(image_id));
            }
            *o = c as u64;
        }
        LikertHistogram::new(image_id, out)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn relative(&self) -> [f64; 5] {
        let t = self.total() as f64;
        self.counts.map(|c| c as f64 / t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitObjective {
    /// Squared error between relative frequencies and bin masses.
    #[default]
    LeastSquares,
    /// Negative log-likelihood of the votes.
    MaximumLikelihood,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValuationFit {
    pub image_id: String,
    pub mu: f64,
    pub sigma: f64,
    pub sse: f64,
    pub mean: f64,
    pub median: f64,
    pub peak: f64,
}

#[inline]
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Masses of bins `[k - 0.5, k + 0.5)`, `k = 1..5`, under a normal
/// truncated to `[0.5, 5.5]`.
pub fn truncated_bin_masses(mu: f64, sigma: f64) -> [f64; 5] {
    let cdf = |x: f64| normal_cdf((x - mu) / sigma);
    let edges: [f64; 6] = std::array::from_fn(|i| cdf(0.5 + i as f64));
    let norm = edges[5] - edges[0];
    std::array::from_fn(|k| (edges[k + 1] - edges[k]) / norm)
}

fn objective(h: &LikertHistogram, kind: FitObjective, mu: f64, sigma: f64) -> f64 {
    let p = truncated_bin_masses(mu, sigma);
    match kind {
        FitObjective::LeastSquares => {
            let f = h.relative();
            (0..5).map(|k| (f[k] - p[k]).powi(2)).sum()
        }
        FitObjective::MaximumLikelihood => -(0..5)
            .filter(|&k| h.counts[k] > 0)
            .map(|k| h.counts[k] as f64 * p[k].max(f64::MIN_POSITIVE).ln())
            .sum::<f64>(),
    }
}

pub fn fit_truncated_gaussian(h: &LikertHistogram) -> ValuationFit {
    fit_truncated_gaussian_with(h, FitObjective::LeastSquares)
}

/// Coarse grid followed by a bounded compass search. A move is taken
/// only on a strict improvement, so ties keep the grid point.
pub fn fit_truncated_gaussian_with(h: &LikertHistogram, kind: FitObjective) -> ValuationFit {
    let mu_steps = ((MU_MAX - MU_MIN) / GRID_STEP).round() as usize;
    let sigma_steps = ((SIGMA_GRID_MAX - SIGMA_MIN) / GRID_STEP).round() as usize;
    let (mut mu, mut sigma) = (MU_MIN, SIGMA_MIN);
    let mut best = f64::INFINITY;
    for i in 0..=mu_steps {
        let m = (10 + i) as f64 / 20.0;
        for j in 0..=sigma_steps {
            let s = (10 + j) as f64 / 20.0;
            let f = objective(h, kind, m, s);
            if f < best {
                best = f;
                mu = m;
                sigma = s;
            }
        }
    }
    let mut step = GRID_STEP / 2.0;
    let mut iter = 0;
    while step >= REFINE_MIN_STEP && iter < REFINE_MAX_ITER {
        iter += 1;
        let mut moved = false;
        for (dm, ds) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let m = (mu + dm).clamp(MU_MIN, MU_MAX);
            let s = (sigma + ds).max(SIGMA_MIN);
            if m == mu && s == sigma {
                continue;
            }
            let f = objective(h, kind, m, s);
            if f < best - 1e-15 * best.abs().max(1.0) {
                best = f;
                mu = m;
                sigma = s;
                moved = true;
                break;
            }
        }
        if !moved {
            step /= 2.0;
        }
    }
    let (mean, median, peak) = summary_stats(h);
    let sse = match kind {
        FitObjective::LeastSquares => best,
        FitObjective::MaximumLikelihood => objective(h, FitObjective::LeastSquares, mu, sigma),
    };
    ValuationFit {
        image_id: h.image_id.clone(),
        mu,
        sigma,
        sse,
        mean,
        median,
        peak,
    }
}

/// Mean score, median bin and peak bin. Tied peaks average their indices.
pub fn summary_stats(h: &LikertHistogram) -> (f64, f64, f64) {
    let total = h.total() as f64;
    let mean = (0..5).map(|k| (k + 1) as f64 * h.counts[k] as f64).sum::<f64>() / total;
    let mut cum = 0u64;
    let mut median = 5.0;
    for k in 0..5 {
        cum += h.counts[k];
        if 2 * cum >= h.total() {
            median = (k + 1) as f64;
            break;
        }
    }
    let max = *h.counts.iter().max().unwrap();
    let tied: Vec<usize> = (0..5).filter(|&k| h.counts[k] == max).collect();
    let peak = tied.iter().map(|&k| (k + 1) as f64).sum::<f64>() / tied.len() as f64;
    (mean, median, peak)
}
