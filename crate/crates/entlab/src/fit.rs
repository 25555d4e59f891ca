//! Least-squares fits for decay profiles and variance scaling.
//!
//! Exponential profiles E{y(r)} ≈ C·e^{-γr} are fit log-linearly on the
//! window where the Monte Carlo mean stands above its noise floor
//! (mean > snr·stderr); the fit must report its R² honestly — a slow
//! power-law decay shows up as a poor log-linear R², never as a fake γ̂.
//! Power laws Var ≈ C·L^β are fit in log-log with per-point uncertainties
//! propagated into a weighted regression and a 95% CI on the slope.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitKind {
    Exponential,
    Power,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitResult {
    pub kind: FitKind,
    /// Decay rate γ̂ (exponential) or exponent β̂ (power).
    pub rate: f64,
    pub prefactor: f64,
    pub r_squared: f64,
    /// Inclusive x-window the fit used.
    pub window: (f64, f64),
    pub n_points: usize,
    pub rate_stderr: f64,
    /// 95% confidence interval on the rate/exponent.
    pub ci95: (f64, f64),
}

/// Minimum usable points for any fit.
pub const MIN_FIT_POINTS: usize = 4;

struct LineFit {
    slope: f64,
    intercept: f64,
    r_squared: f64,
    slope_stderr: f64,
}

/// Weighted least squares y = a + b·x with weights w = 1/σ².
fn wls(x: &[f64], y: &[f64], sigma: Option<&[f64]>) -> LineFit {
    let n = x.len();
    let w: Vec<f64> = match sigma {
        Some(s) => s.iter().map(|&si| 1.0 / (si * si).max(1e-300)).collect(),
        None => vec![1.0; n],
    };
    let sw: f64 = w.iter().sum();
    let xb = x.iter().zip(&w).map(|(xi, wi)| wi * xi).sum::<f64>() / sw;
    let yb = y.iter().zip(&w).map(|(yi, wi)| wi * yi).sum::<f64>() / sw;
    let sxx: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * (xi - xb) * (xi - xb)).sum();
    let sxy: f64 = x
        .iter()
        .zip(y)
        .zip(&w)
        .map(|((xi, yi), wi)| wi * (xi - xb) * (yi - yb))
        .sum();
    let slope = sxy / sxx;
    let intercept = yb - slope * xb;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .zip(&w)
        .map(|((xi, yi), wi)| {
            let e = yi - intercept - slope * xi;
            wi * e * e
        })
        .sum();
    let ss_tot: f64 = y
        .iter()
        .zip(&w)
        .map(|(yi, wi)| wi * (yi - yb) * (yi - yb))
        .sum();
    let r_squared = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else {
        1.0
    };
    // with known per-point σ the slope variance is 1/Sxx; for unit weights
    // fall back to the residual estimate
    let slope_stderr = match sigma {
        Some(_) => (1.0 / sxx).sqrt(),
        None => {
            if n > 2 {
                (ss_res / (n as f64 - 2.0) / sxx).sqrt()
            } else {
                f64::INFINITY
            }
        }
    };
    LineFit {
        slope,
        intercept,
        r_squared,
        slope_stderr,
    }
}

/// Exponential fit of a nonnegative Monte Carlo profile: keeps the points
/// with mean > snr·stderr (and mean > 0) and fits ln(mean) against x.
/// Returns γ̂ = -slope. The gate is a per-point filter, not a prefix: an
/// isolated noisy dip in the signal-to-noise ratio drops that point alone,
/// while the floor at large x excludes itself because its stderr stays
/// comparable to its mean.
pub fn fit_exponential(
    x: &[f64],
    mean: &[f64],
    stderr: &[f64],
    snr: f64,
) -> Result<FitResult> {
    assert_eq!(x.len(), mean.len());
    assert_eq!(x.len(), stderr.len());
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..x.len() {
        if mean[i] > snr * stderr[i] && mean[i] > 0.0 {
            xs.push(x[i]);
            ys.push(mean[i].ln());
        }
    }
    if xs.len() < MIN_FIT_POINTS {
        return Err(Error::FitUnderdetermined(format!(
            "only {} usable points above the noise floor (need {MIN_FIT_POINTS})",
            xs.len()
        )));
    }
    let fit = wls(&xs, &ys, None);
    let rate = -fit.slope;
    let half = 1.96 * fit.slope_stderr;
    Ok(FitResult {
        kind: FitKind::Exponential,
        rate,
        prefactor: fit.intercept.exp(),
        r_squared: fit.r_squared,
        window: (xs[0], xs[xs.len() - 1]),
        n_points: xs.len(),
        rate_stderr: fit.slope_stderr,
        ci95: (rate - half, rate + half),
    })
}

/// Exponential fit over every positive point, weighted by the propagated
/// log-uncertainty σ_ln = stderr/mean. Suits slowly-equilibrating profiles
/// (restriction proximity) whose bins never individually clear a hard SNR
/// gate yet trace a clean exponential jointly.
pub fn fit_exponential_weighted(x: &[f64], mean: &[f64], stderr: &[f64]) -> Result<FitResult> {
    assert_eq!(x.len(), mean.len());
    assert_eq!(x.len(), stderr.len());
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut sigma = Vec::new();
    for i in 0..x.len() {
        if mean[i] > 0.0 && stderr[i].is_finite() {
            xs.push(x[i]);
            ys.push(mean[i].ln());
            sigma.push((stderr[i] / mean[i]).max(1e-6));
        }
    }
    if xs.len() < MIN_FIT_POINTS {
        return Err(Error::FitUnderdetermined(format!(
            "only {} positive points (need {MIN_FIT_POINTS})",
            xs.len()
        )));
    }
    let fit = wls(&xs, &ys, Some(&sigma));
    let rate = -fit.slope;
    let half = 1.96 * fit.slope_stderr;
    Ok(FitResult {
        kind: FitKind::Exponential,
        rate,
        prefactor: fit.intercept.exp(),
        r_squared: fit.r_squared,
        window: (xs[0], xs[xs.len() - 1]),
        n_points: xs.len(),
        rate_stderr: fit.slope_stderr,
        ci95: (rate - half, rate + half),
    })
}

/// Power-law fit Var ≈ C·L^β in log-log with known per-point uncertainties:
/// σ_lnVar = stderr(Var)/Var. Returns β̂ with a normal-theory 95% CI.
pub fn fit_power(l: &[f64], var: &[f64], var_stderr: &[f64]) -> Result<FitResult> {
    assert_eq!(l.len(), var.len());
    assert_eq!(l.len(), var_stderr.len());
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut sigma = Vec::new();
    for i in 0..l.len() {
        if var[i] > 0.0 && var_stderr[i].is_finite() {
            xs.push(l[i].ln());
            ys.push(var[i].ln());
            sigma.push((var_stderr[i] / var[i]).max(1e-12));
        }
    }
    if xs.len() < MIN_FIT_POINTS {
        return Err(Error::FitUnderdetermined(format!(
            "only {} positive-variance points (need {MIN_FIT_POINTS})",
            xs.len()
        )));
    }
    let fit = wls(&xs, &ys, Some(&sigma));
    let half = 1.96 * fit.slope_stderr;
    Ok(FitResult {
        kind: FitKind::Power,
        rate: fit.slope,
        prefactor: fit.intercept.exp(),
        r_squared: fit.r_squared,
        window: (xs[0].exp(), xs[xs.len() - 1].exp()),
        n_points: xs.len(),
        rate_stderr: fit.slope_stderr,
        ci95: (fit.slope - half, fit.slope + half),
    })
}
