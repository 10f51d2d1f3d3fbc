//! Studentized range distribution by Gauss–Legendre quadrature.

use std::sync::OnceLock;

use super::fit::normal_cdf;

const GL_POINTS: usize = 16;

/// Nodes and weights on `[-1, 1]`, from Newton iteration on `P_n`.
fn gauss_legendre() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_POINTS;
        let mut rule = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            rule.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
        }
        rule
    })
}

/// Composite Gauss–Legendre over `panels` equal pieces of `[a, b]`.
fn integrate(a: f64, b: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
    let rule = gauss_legendre();
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for &(x, w) in rule {
            total += w * f(mid + 0.5 * h * x);
        }
    }
    0.5 * h * total
}

#[inline]
fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// CDF of the range of `k` iid standard normals.
pub fn normal_range_cdf(w: f64, k: usize) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    let kf = k as f64;
    let v = integrate(-8.5, 8.5, 34, |z| {
        let d = normal_cdf(z) - normal_cdf(z - w);
        normal_pdf(z) * d.max(0.0).powf(kf - 1.0)
    });
    (kf * v).clamp(0.0, 1.0)
}

/// `P(Q <= q)` for the studentized range with `k` means and `df` error
/// degrees of freedom.
pub fn ptukey(q: f64, k: usize, df: f64) -> f64 {
    if q <= 0.0 {
        return 0.0;
    }
    if !df.is_finite() {
        return normal_range_cdf(q, k);
    }
    // density of s = sqrt(chi2_df / df)
    let half = df / 2.0;
    let log_c = half * df.ln() - libm::lgamma(half) - (half - 1.0) * std::f64::consts::LN_2;
    let log_f = |s: f64| log_c + (df - 1.0) * s.ln() - 0.5 * df * s * s;
    let mode = ((df - 1.0) / df).max(0.0).sqrt();
    let peak = if mode > 0.0 { log_f(mode) } else { log_c };
    let spread = 1.0 / (2.0 * df).sqrt();
    let mut hi = mode.max(1.0) + spread;
    while log_f(hi) > peak - 45.0 {
        hi += spread;
    }
    let mut lo = mode;
    while lo > 0.0 && log_f(lo) > peak - 45.0 {
        lo = (lo - spread).max(0.0);
    }
    let v = integrate(lo, hi, 96, |s| {
        if s <= 0.0 {
            return 0.0;
        }
        log_f(s).exp() * normal_range_cdf(q * s, k)
    });
    v.clamp(0.0, 1.0)
}
