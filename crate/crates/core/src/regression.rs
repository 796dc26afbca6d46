//! Ordinary least squares on (x, y) pairs, used for log-log exponent fits.

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
}

pub fn fit(points: &[(f64, f64)]) -> LinearFit {
    let n = points.len() as f64;
    assert!(points.len() >= 2, "need two points for a fit");
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = if points.len() > 2 {
        let rss: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    LinearFit { slope, intercept, stderr }
}

/// Slope of ln(y) against ln(x).
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> LinearFit {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.ln())).collect();
    fit(&pts)
}
