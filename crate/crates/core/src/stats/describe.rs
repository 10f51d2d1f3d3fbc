//! Boxplot summaries, density grids and valuation distributions.

use serde::{Deserialize, Serialize};

use crate::dataset::Category;

use super::fit::{MU_MAX, MU_MIN};
use super::StatsError;

pub const WHISKER_IQR: f64 = 1.5;
pub const FINE_BIN_WIDTH: f64 = 0.25;

/// Linear-interpolation quantile (R type 7) of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxplotSummary {
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub n: usize,
}

pub fn boxplot_summary(values: &[f64]) -> Result<BoxplotSummary, StatsError> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    v.sort_by(f64::total_cmp);
    let q1 = quantile_sorted(&v, 0.25);
    let q3 = quantile_sorted(&v, 0.75);
    let reach = WHISKER_IQR * (q3 - q1);
    let whisker_low = v.iter().copied().find(|&x| x >= q1 - reach).unwrap_or(q1);
    let whisker_high = v.iter().rev().copied().find(|&x| x <= q3 + reach).unwrap_or(q3);
    Ok(BoxplotSummary {
        median: quantile_sorted(&v, 0.5),
        q1,
        q3,
        whisker_low,
        whisker_high,
        n: v.len(),
    })
}

/// Counts over a rectangular grid spanning the data ranges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub nx: usize,
    pub ny: usize,
    /// Row-major, `counts[iy * nx + ix]`.
    pub counts: Vec<u64>,
}

impl DensityGrid {
    pub fn get(&self, ix: usize, iy: usize) -> u64 {
        self.counts[iy * self.nx + ix]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

fn bin_of(v: f64, lo: f64, hi: f64, n: usize) -> usize {
    if hi <= lo {
        return 0;
    }
    (((v - lo) / (hi - lo) * n as f64).floor() as usize).min(n - 1)
}

pub fn density_scatter(x: &[f64], y: &[f64], nx: usize, ny: usize) -> Result<DensityGrid, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if nx < 2 || ny < 2 {
        return Err(StatsError::BadBins(nx.min(ny)));
    }
    if x.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    let range = |v: &[f64]| {
        v.iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &a| (lo.min(a), hi.max(a)))
    };
    let (xr, yr) = (range(x), range(y));
    let mut counts = vec![0u64; nx * ny];
    for (a, b) in x.iter().zip(y) {
        counts[bin_of(*b, yr.0, yr.1, ny) * nx + bin_of(*a, xr.0, xr.1, nx)] += 1;
    }
    Ok(DensityGrid {
        x_range: xr,
        y_range: yr,
        nx,
        ny,
        counts,
    })
}

/// Stacked counts of `mu` per bin, one stack per category.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub edges: Vec<f64>,
    pub categories: Vec<Category>,
    /// `counts[c][bin]` for `categories[c]`.
    pub counts: Vec<Vec<u64>>,
}

impl Distribution {
    pub fn bin_totals(&self) -> Vec<u64> {
        (0..self.edges.len() - 1)
            .map(|b| self.counts.iter().map(|c| c[b]).sum())
            .collect()
    }

    pub fn category(&self, c: Category) -> &[u64] {
        let i = self.categories.iter().position(|x| *x == c).expect("all categories present");
        &self.counts[i]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionReport {
    pub coarse: Distribution,
    pub fine: Distribution,
}

fn distribution(values: &[(Category, f64)], bins: usize) -> Distribution {
    let width = (MU_MAX - MU_MIN) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|i| MU_MIN + i as f64 * width).collect();
    let categories = Category::ALL.to_vec();
    let mut counts = vec![vec![0u64; bins]; categories.len()];
    for &(c, mu) in values {
        let ci = categories.iter().position(|x| *x == c).unwrap();
        counts[ci][bin_of(mu, MU_MIN, MU_MAX, bins)] += 1;
    }
    Distribution {
        edges,
        categories,
        counts,
    }
}

/// Histograms of `mu` at unit width (one bin per score) and at 0.25.
pub fn distribution_report(values: &[(Category, f64)]) -> Result<DistributionReport, StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    let fine_bins = ((MU_MAX - MU_MIN) / FINE_BIN_WIDTH).round() as usize;
    Ok(DistributionReport {
        coarse: distribution(values, 5),
        fine: distribution(values, fine_bins),
    })
}

/// Merges a 10-point histogram into five by summing bins pairwise
/// (1+2, 3+4, ..., 9+10).
pub fn rebin_ten_to_five(counts: [u64; 10]) -> [u64; 5] {
    std::array::from_fn(|i| counts[2 * i] + counts[2 * i + 1])
}
