//! Kernel decay: the Monte Carlo profile E|P(x₀, x₀ + r·e₁)| along a lattice
//! ray from the box center, with an exponential fit γ̂ on the window where
//! the mean stands above its noise floor. Exponential decay of this kernel
//! is the operational definition of localization here; disorder strengths
//! are trusted only after this profile certifies γ̂ > 0.

use super::*;
use std::time::Instant;

/// Snr gate for fit windows: keep points with mean > 10·stderr.
pub const FIT_SNR: f64 = 10.0;

pub fn kernel_decay_profile(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate(Experiment::Decay)?;
    let m_box = cfg.max_block_half_width() + cfg.padding;
    let spec = LatticeSpec::new(cfg.dimension, m_box)?;
    let r_max = cfg.decay_r_max.unwrap_or(m_box - 2);
    if r_max < 1 || r_max > m_box - 2 {
        return Err(Error::Config(format!(
            "decay_r_max must lie in 1..={} (M-2 keeps the ray off the boundary), got {r_max}",
            m_box - 2
        )));
    }
    let center = spec.center();
    let ray: Vec<usize> = (0..=r_max)
        .map(|r| {
            spec.flatten([r, 0, 0])
                .expect("ray stays inside the box by construction")
        })
        .collect();
    let l = 2 * cfg.max_block_half_width() + 1;

    let runs = par_realizations(cfg.realizations, |i| {
        let t0 = Instant::now();
        let real = realize_box(cfg, spec, i, false)?;
        let factor = ProjectionFactor::new(&real.eig, real.mu);
        let row = factor.row(center);
        let profile: Vec<f64> = ray.iter().map(|&idx| row[idx].abs()).collect();
        let mut rec = RunRecord::new(Experiment::Decay, cfg, l, cfg.padding, real.mu, i);
        rec.profile = Some(profile);
        Ok((rec, t0.elapsed().as_millis() as u64))
    });

    let kept = filter_degenerate(runs, cfg.realizations)?;
    let mut records = Vec::with_capacity(kept.len());
    let mut timings = Vec::with_capacity(kept.len());
    let mut rows = Vec::with_capacity(kept.len());
    for (i, (rec, ms)) in kept {
        rows.push(rec.profile.clone().unwrap());
        timings.push(TimingRecord {
            experiment: "decay".into(),
            l,
            realization: i,
            wall_ms: ms,
        });
        records.push(rec);
    }

    let xs: Vec<f64> = (0..=r_max).map(|r| r as f64).collect();
    let profile = Profile::from_rows(xs, &rows)?;
    let fit = crate::fit::fit_exponential(&profile.x, &profile.mean, &profile.stderr, FIT_SNR)?;

    Ok(ExperimentOutput {
        records,
        timings,
        summary: Summary::Profile(ProfileSummary {
            experiment: "decay".into(),
            l,
            profile,
            fit,
        }),
    })
}
