use serde::{Deserialize, Serialize};

use super::tukey::ptukey;
use super::StatsError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TukeyPair {
    pub a: String,
    pub b: String,
    pub mean_difference: f64,
    pub q: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaResult {
    pub f: f64,
    pub p: f64,
    pub df_between: usize,
    pub df_within: usize,
    pub mse: f64,
    pub pairwise: Vec<TukeyPair>,
}

/// Upper tail of the F distribution.
pub fn f_sf(f: f64, d1: f64, d2: f64) -> f64 {
    if f <= 0.0 {
        return 1.0;
    }
    if f.is_infinite() {
        return 0.0;
    }
    statrs::function::beta::beta_reg(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f))
}

/// One-way ANOVA with Tukey–Kramer pairwise comparisons.
pub fn anova_tukey(groups: &[(String, Vec<f64>)]) -> Result<AnovaResult, StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::TooFewGroups(groups.len()));
    }
    if let Some((name, _)) = groups.iter().find(|(_, v)| v.len() < 2) {
        return Err(StatsError::GroupTooSmall(name.clone()));
    }
    let n: usize = groups.iter().map(|(_, v)| v.len()).sum();
    let k = groups.len();
    let grand = groups.iter().flat_map(|(_, v)| v).sum::<f64>() / n as f64;
    let means: Vec<f64> = groups.iter().map(|(_, v)| v.iter().sum::<f64>() / v.len() as f64).collect();
    let mut ssb = 0.0;
    let mut ssw = 0.0;
    for ((_, v), m) in groups.iter().zip(&means) {
        ssb += v.len() as f64 * (m - grand).powi(2);
        ssw += v.iter().map(|x| (x - m).powi(2)).sum::<f64>();
    }
    if ssb + ssw == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let (d1, d2) = (k - 1, n - k);
    let mse = ssw / d2 as f64;
    let f = if mse > 0.0 { (ssb / d1 as f64) / mse } else { f64::INFINITY };
    let p = f_sf(f, d1 as f64, d2 as f64);
    let mut pairwise = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let diff = means[i] - means[j];
            let se = (mse / 2.0 * (1.0 / groups[i].1.len() as f64 + 1.0 / groups[j].1.len() as f64)).sqrt();
            let q = if diff == 0.0 {
                0.0
            } else if se > 0.0 {
                diff.abs() / se
            } else {
                f64::INFINITY
            };
            let p = if q.is_infinite() { 0.0 } else { 1.0 - ptukey(q, k, d2 as f64) };
            pairwise.push(TukeyPair {
                a: groups[i].0.clone(),
                b: groups[j].0.clone(),
                mean_difference: diff,
                q,
                p: p.clamp(0.0, 1.0),
            });
        }
    }
    Ok(AnovaResult {
        f,
        p,
        df_between: d1,
        df_within: d2,
        mse,
        pairwise,
    })
}
