use serde::Serialize;

use crate::error::{NskError, Result};

/// Least-squares line through `(log x, log y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// `x` range actually used.
    pub window: (f64, f64),
    pub points: usize,
}

/// Power-law fit `y ~ C x^slope` over the points with `x` in `window`.
pub fn power_fit(x: &[f64], y: &[f64], window: (f64, f64)) -> Result<FitResult> {
    if x.len() != y.len() {
        return Err(NskError::Fit(format!("{} abscissae for {} ordinates", x.len(), y.len())));
    }
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(xi, _)| **xi >= window.0 && **xi <= window.1)
        .map(|(a, b)| (*a, *b))
        .collect();
    if pts.len() < 3 {
        return Err(NskError::Fit(format!("{} points in window [{}, {}], need 3", pts.len(), window.0, window.1)));
    }
    if let Some((xi, yi)) = pts.iter().find(|(xi, yi)| !(*xi > 0.0) || !(*yi > 0.0)) {
        return Err(NskError::Fit(format!("nonpositive value at ({xi}, {yi})")));
    }
    let lx: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(NskError::Fit("all abscissae coincide".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ly.iter().map(|v| (v - my).powi(2)).sum();
    let ss_res: f64 = lx.iter().zip(&ly).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r2 = if ss_tot <= f64::EPSILON * n * my.abs().max(1.0) {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    let used = (
        pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min),
        pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max),
    );
    Ok(FitResult {
        slope,
        intercept,
        r2,
        window: used,
        points: pts.len(),
    })
}
