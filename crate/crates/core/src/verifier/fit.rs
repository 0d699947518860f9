//! Log–log power-law fits.

use serde::Serialize;

use crate::error::{Result, StrobeError};

/// Residuals below this are treated as floating-point noise.
pub const NOISE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingFit {
    pub exponent: f64,
    pub intercept: f64,
    pub r2: f64,
    /// Standard error of the exponent.
    pub stderr: f64,
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_scaling(points: &[(f64, f64)]) -> Result<ScalingFit> {
    fit_scaling_min(points, 4)
}

pub fn fit_scaling_min(points: &[(f64, f64)], min_points: usize) -> Result<ScalingFit> {
    if points.len() < min_points {
        return Err(StrobeError::TooFewPoints {
            needed: min_points,
            got: points.len(),
        });
    }
    if points.iter().any(|&(x, y)| x <= 0.0 || !(y > NOISE_FLOOR * 10.0) || !y.is_finite()) {
        return Err(StrobeError::NoiseFloor);
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(StrobeError::Invalid("fit abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = lx.iter().zip(&ly).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    let stderr = if points.len() > 2 {
        (ss_res / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(ScalingFit {
        exponent: slope,
        intercept,
        r2,
        stderr,
    })
}

/// `n` log-spaced values between `lo` and `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pts: Vec<_> = log_space(1e-3, 1e-1, 6).into_iter().map(|x| (x, 3.0 * x.powi(4))).collect();
        let f = fit_scaling(&pts).unwrap();
        assert!((f.exponent - 4.0).abs() < 1e-2);
        assert!((f.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_noise_and_short_sweeps() {
        assert!(matches!(fit_scaling(&[(1.0, 1.0)]), Err(StrobeError::TooFewPoints { .. })));
        let pts = [(1e-3, 1e-17), (1e-2, 1e-3), (1e-1, 1.0), (1.0, 2.0)];
        assert_eq!(fit_scaling(&pts), Err(StrobeError::NoiseFloor));
    }
}
