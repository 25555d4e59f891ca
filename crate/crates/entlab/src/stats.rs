//! Streaming and two-pass moments for disorder ensembles.
//!
//! Small variances are the whole point of the selfaveraging experiments, so
//! every ensemble keeps a Welford accumulator during the run and recomputes
//! mean/variance two-pass from the persisted raw records afterwards; the two
//! must agree to 1e-12 relative.

use serde::{Deserialize, Serialize};

/// Welford accumulator: numerically stable streaming mean and M2.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunningStats {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance (n-1 denominator).
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

/// Corrected two-pass mean and unbiased sample variance: the residual-sum
/// correction term removes the cancellation error of the naive formula.
pub fn two_pass(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let mut sum_sq = 0.0;
    let mut sum_res = 0.0;
    for &x in xs {
        let r = x - mean;
        sum_sq += r * r;
        sum_res += r;
    }
    let var = (sum_sq - sum_res * sum_res / n as f64) / (n - 1) as f64;
    (mean, var)
}

/// Moment-based standard error of the sample variance:
/// Var(s²) ≈ (m₄ - s⁴(n-3)/(n-1)) / n with m₄ the fourth central moment.
pub fn variance_stderr(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 4 {
        return f64::INFINITY;
    }
    let (mean, var) = two_pass(xs);
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n as f64;
    let nf = n as f64;
    let v = (m4 - var * var * (nf - 3.0) / (nf - 1.0)) / nf;
    v.max(0.0).sqrt()
}

/// One-sided Mann-Whitney rank statistic for "b is stochastically smaller
/// than a", as a normal-approximation z-score. Heavy-tailed nonnegative
/// observables (splitting discrepancies at strong disorder are dominated by
/// rare resonances) defeat z-tests on means: a single outlier caps the mean
/// z-score near 1 no matter how complete the separation. Ranks do not care.
pub fn mann_whitney_smaller_z(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let mut u = 0.0f64;
    for &x in a {
        for &y in b {
            if y < x {
                u += 1.0;
            } else if y == x {
                u += 0.5;
            }
        }
    }
    let mean = na * nb / 2.0;
    let sd = (na * nb * (na + nb + 1.0) / 12.0).sqrt();
    (u - mean) / sd.max(f64::MIN_POSITIVE)
}

/// Per-block-size ensemble summary: raw and surface-normalized moments.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleStats {
    #[serde(rename = "L")]
    pub l: i64,
    pub count: u64,
    pub mean: f64,
    pub variance: f64,
    pub stderr: f64,
    /// Moments of L^{-(d-1)}·S.
    pub normalized_mean: f64,
    pub normalized_variance: f64,
    pub normalized_stderr: f64,
}

impl EnsembleStats {
    /// Build from raw per-realization values, cross-checking the streaming
    /// accumulator against a two-pass recompute.
    pub fn from_raw(l: i64, d: usize, values: &[f64]) -> crate::error::Result<Self> {
        let mut run = RunningStats::new();
        for &v in values {
            run.push(v);
        }
        let (mean, var) = two_pass(values);
        let rel = |a: f64, b: f64| {
            let scale = a.abs().max(b.abs()).max(1e-300);
            (a - b).abs() / scale
        };
        if !values.is_empty() && (rel(mean, run.mean()) > 1e-12 || rel(var, run.variance()) > 1e-12)
        {
            return Err(crate::error::Error::Numeric(format!(
                "streamed and two-pass moments disagree: mean {} vs {}, var {} vs {}",
                run.mean(),
                mean,
                run.variance(),
                var
            )));
        }
        let norm = (l as f64).powi(d as i32 - 1);
        let scaled: Vec<f64> = values.iter().map(|v| v / norm).collect();
        let (nmean, nvar) = two_pass(&scaled);
        let n = values.len() as f64;
        Ok(EnsembleStats {
            l,
            count: values.len() as u64,
            mean,
            variance: var,
            stderr: if values.is_empty() { 0.0 } else { (var / n).sqrt() },
            normalized_mean: nmean,
            normalized_variance: nvar,
            normalized_stderr: if values.is_empty() {
                0.0
            } else {
                (nvar / n).sqrt()
            },
        })
    }
}
