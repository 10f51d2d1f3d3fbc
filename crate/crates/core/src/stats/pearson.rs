use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::metrics::{external_columns, MetricRecord, METRIC_COLUMNS};

use super::StatsError;

/// p-values below this are reported as 0.
pub const P_FLOOR: f64 = 1e-300;
pub const SIGNIFICANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub r: f64,
    pub p: f64,
    pub n: usize,
}

/// Two-sided p-value of `r` over `n` pairs from Student's t with `n - 2`
/// degrees of freedom.
pub fn pearson_p_value(r: f64, n: usize) -> f64 {
    let df = (n - 2) as f64;
    if r.abs() >= 1.0 {
        return 0.0;
    }
    let t2 = r * r * df / (1.0 - r * r);
    let p = statrs::function::beta::beta_reg(df / 2.0, 0.5, df / (df + t2));
    if p < P_FLOOR {
        0.0
    } else {
        p.min(1.0)
    }
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<Correlation, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 3 {
        return Err(StatsError::TooFewPairs(n));
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    Ok(Correlation {
        r,
        p: pearson_p_value(r, n),
        n,
    })
}

/// Pearson over the pairs where both values are defined and finite.
pub fn pearson_defined(x: &[Option<f64>], y: &[Option<f64>]) -> Result<Correlation, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    let (a, b): (Vec<f64>, Vec<f64>) = x
        .iter()
        .zip(y)
        .filter_map(|(a, b)| match (a, b) {
            (Some(a), Some(b)) if a.is_finite() && b.is_finite() => Some((*a, *b)),
            _ => None,
        })
        .unzip();
    pearson(&a, &b)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationPair {
    pub metric: String,
    pub r: f64,
    pub p: f64,
    pub n: usize,
    /// True when `p >= 0.05`.
    pub not_significant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub grouping: String,
    /// Every metric against the valuation `mu`.
    pub pairs: Vec<CorrelationPair>,
}

/// Square matrix over `names`; `None` where a pair is undefined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub names: Vec<String>,
    pub cells: Vec<Vec<Option<Correlation>>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<Correlation> {
        let i = self.names.iter().position(|n| n == a)?;
        let j = self.names.iter().position(|n| n == b)?;
        self.cells[i][j]
    }
}

pub const VALUATION_COLUMN: &str = "mu";

/// Joins records with valuations on image id and correlates every metric
/// column (and `mu`) with every other.
pub fn correlation_matrix(
    records: &[MetricRecord],
    valuations: &BTreeMap<String, f64>,
    grouping: &str,
) -> Result<(CorrelationReport, CorrelationMatrix), StatsError> {
    let joined: Vec<(&MetricRecord, f64)> = records
        .iter()
        .filter_map(|r| valuations.get(&r.image_id).map(|&mu| (r, mu)))
        .collect();
    if joined.is_empty() {
        return Err(StatsError::EmptyJoin);
    }
    let mut names: Vec<String> = METRIC_COLUMNS.iter().map(|c| c.to_string()).collect();
    let owned: Vec<MetricRecord> = joined.iter().map(|(r, _)| (*r).clone()).collect();
    names.extend(
        external_columns(&owned)
            .into_iter()
            .map(|n| format!("{}{n}", crate::metrics::EXTERNAL_PREFIX)),
    );
    names.push(VALUATION_COLUMN.to_string());
    let columns: Vec<Vec<Option<f64>>> = names
        .iter()
        .map(|name| {
            joined
                .iter()
                .map(|(r, mu)| if name == VALUATION_COLUMN { Some(*mu) } else { r.get(name) })
                .collect()
        })
        .collect();
    let k = names.len();
    let mut cells = vec![vec![None; k]; k];
    for i in 0..k {
        for j in i..k {
            let c = pearson_defined(&columns[i], &columns[j]).ok();
            cells[i][j] = c;
            cells[j][i] = c;
        }
    }
    let mu = k - 1;
    let pairs = (0..mu)
        .filter_map(|i| {
            cells[i][mu].map(|c| CorrelationPair {
                metric: names[i].clone(),
                r: c.r,
                p: c.p,
                n: c.n,
                not_significant: c.p >= SIGNIFICANCE,
            })
        })
        .collect();
    Ok((
        CorrelationReport {
            grouping: grouping.to_string(),
            pairs,
        },
        CorrelationMatrix { names, cells },
    ))
}
