//! Estimation utilities for the experiment campaigns: empirical CDF
//! distances, log-log regression for power-law exponents, and survival
//! tail fits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two-sample Kolmogorov-Smirnov sup-distance between empirical CDFs.
pub fn ks_distance(sample1: &[f64], sample2: &[f64]) -> Result<f64> {
    if sample1.is_empty() || sample2.is_empty() {
        return Err(Error::InvalidParameter("empty sample".into()));
    }
    let mut xs = sample1.to_vec();
    let mut ys = sample2.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut best = 0.0f64;
    while i < xs.len() && j < ys.len() {
        let x = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= x {
            i += 1;
        }
        while j < ys.len() && ys[j] <= x {
            j += 1;
        }
        best = best.max((i as f64 / n - j as f64 / m).abs());
    }
    Ok(best)
}

/// Ordinary least squares on `(log x, log y)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub r_squared: f64,
    pub points: Vec<(f64, f64)>,
}

fn ols(points: &[(f64, f64)]) -> ExponentFit {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx = points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let sxy = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>();
    let sst = points.iter().map(|p| (p.1 - my).powi(2)).sum::<f64>();
    let dof = (points.len().saturating_sub(2)) as f64;
    let stderr = if dof > 0.0 && sxx > 0.0 {
        (sse / dof / sxx).sqrt()
    } else {
        0.0
    };
    let r_squared = if sst > 0.0 { 1.0 - sse / sst } else { 1.0 };
    ExponentFit {
        slope,
        intercept,
        stderr,
        r_squared,
        points: points.to_vec(),
    }
}

/// Fit `y ~ c x^p` by least squares in log-log coordinates; the slope is
/// the exponent estimate.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<ExponentFit> {
    if points.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "power-law fit needs >= 3 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0) || !(y > 0.0)) {
        return Err(Error::InvalidParameter(
            "power-law fit requires strictly positive coordinates".into(),
        ));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    Ok(ols(&logs))
}

/// Estimated survival probabilities at a set of thresholds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TailEstimate {
    pub thresholds: Vec<f64>,
    pub survival_probs: Vec<f64>,
}

impl TailEstimate {
    /// Empirical `P(sample >= threshold)` for each threshold.
    pub fn from_samples(samples: &[f64], thresholds: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidParameter("empty sample".into()));
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len() as f64;
        let survival_probs = thresholds
            .iter()
            .map(|&thr| (sorted.len() - sorted.partition_point(|&x| x < thr)) as f64 / n)
            .collect();
        Ok(Self {
            thresholds: thresholds.to_vec(),
            survival_probs,
        })
    }

    /// Keep only thresholds whose estimated survival lies in `(p_min, p_max)`,
    /// the stable range for the outer-exponent regression.
    pub fn select(&self, p_min: f64, p_max: f64) -> TailEstimate {
        let mut thresholds = Vec::new();
        let mut survival_probs = Vec::new();
        for (&t, &p) in self.thresholds.iter().zip(&self.survival_probs) {
            if p > p_min && p < p_max {
                thresholds.push(t);
                survival_probs.push(p);
            }
        }
        TailEstimate {
            thresholds,
            survival_probs,
        }
    }
}

/// Outer tail exponent `beta` of `P(X >= s) ~ exp(-c s^beta)`: the OLS
/// slope of `log(-log P)` against `log s`. Thresholds with degenerate
/// estimates (`P` of 0 or 1) are dropped with a warning on stderr.
pub fn fit_tail_exponent(te: &TailEstimate) -> Result<ExponentFit> {
    let mut pts = Vec::new();
    for (&s, &p) in te.thresholds.iter().zip(&te.survival_probs) {
        if p <= 0.0 || p >= 1.0 {
            eprintln!("fit_tail_exponent: dropping threshold {s} with degenerate survival {p}");
            continue;
        }
        if !(s > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tail threshold {s} must be positive"
            )));
        }
        pts.push((s.ln(), (-p.ln()).ln()));
    }
    if pts.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "tail fit needs >= 3 usable thresholds, got {}",
            pts.len()
        )));
    }
    Ok(ols(&pts))
}

/// Median by sorting a copy; interpolates even-length samples.
pub fn median(samples: &[f64]) -> f64 {
    quantile(samples, 0.5)
}

/// Linearly interpolated order-statistic quantile, `q` in `[0, 1]`.
pub fn quantile(samples: &[f64], q: f64) -> f64 {
    assert!(!samples.is_empty(), "quantile of empty sample");
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (xs.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        xs[lo]
    } else {
        xs[lo] + (pos - lo as f64) * (xs[hi] - xs[lo])
    }
}

/// Sample mean.
pub fn mean(samples: &[f64]) -> f64 {
    samples.iter().sum::<f64>() / samples.len() as f64
}

/// Standard error of the sample mean.
pub fn stderr_of_mean(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    if n < 2.0 {
        return f64::NAN;
    }
    let m = mean(samples);
    let var = samples.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (var / n).sqrt()
}
