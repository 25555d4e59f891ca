//! Entropy scaling sweep: disorder-averaged S_Λ over a ladder of block
//! sizes, each block centered in its own padded box.

use super::*;
use serde::Serialize;
use std::time::Instant;

#[derive(Debug, Clone, Serialize)]
pub struct PaddingCheck {
    #[serde(rename = "L")]
    pub l: i64,
    pub mean: f64,
    pub mean_doubled_pad: f64,
    pub stderr: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub stats: Vec<EnsembleStats>,
    /// Present when the padding-doubling convergence gate ran.
    pub padding_checks: Option<Vec<PaddingCheck>>,
}

pub(crate) struct EntropyRows {
    pub records: Vec<RunRecord>,
    pub timings: Vec<TimingRecord>,
    /// (L, S) pairs in record order.
    pub values: Vec<(i64, f64)>,
}

/// Shared engine for sweep-shaped experiments: for every block half-width m,
/// diagonalize the padded box per realization and collect S_{Λ_m} (plus any
/// requested Rényi orders).
pub(crate) fn collect_block_entropies(
    cfg: &ExperimentConfig,
    experiment: Experiment,
    padding: i64,
) -> Result<EntropyRows> {
    let mut records = Vec::new();
    let mut timings = Vec::new();
    let mut values = Vec::new();
    for &m in &cfg.block_half_widths {
        let spec = LatticeSpec::new(cfg.dimension, m + padding)?;
        let block = centered_block(spec, m)?;
        let l = 2 * m + 1;
        let runs = par_realizations(cfg.realizations, |i| {
            let t0 = Instant::now();
            let real = realize_box(cfg, spec, i, false)?;
            let factor = ProjectionFactor::new(&real.eig, real.mu);
            let (s, renyi) = block_entropies(&factor, block.sites(), &cfg.renyi_alphas)?;
            let mut rec = RunRecord::new(experiment, cfg, l, padding, real.mu, i);
            rec.s_bits = Some(s.value);
            if !renyi.is_empty() {
                rec.renyi = Some(renyi);
            }
            Ok((rec, t0.elapsed().as_millis() as u64))
        });
        for (i, (rec, ms)) in filter_degenerate(runs, cfg.realizations)? {
            values.push((l, rec.s_bits.unwrap()));
            timings.push(TimingRecord {
                experiment: experiment.name().to_string(),
                l,
                realization: i,
                wall_ms: ms,
            });
            records.push(rec);
        }
    }
    Ok(EntropyRows {
        records,
        timings,
        values,
    })
}

/// The entropy sweep. With `padding_check` on, every block size is also
/// evaluated at doubled padding on the *same* disorder field (the realization
/// extended outward by fresh rim values), and the paired mean shift must stay
/// below the ensemble standard error — the box is only a surrogate for the
/// infinite volume, and this gate is what justifies it empirically. The
/// common-random pairing matters: two independent ensembles would drown the
/// boundary effect in sampling noise.
pub fn run_entropy_sweep(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate(Experiment::Sweep)?;
    let rows = collect_block_entropies(cfg, Experiment::Sweep, cfg.padding)?;
    let stats = stats_per_l(&group_by_l(&rows.values), cfg.dimension)?;

    let padding_checks = if cfg.padding_check {
        let mut checks = Vec::new();
        for &m in &cfg.block_half_widths {
            let inner_spec = LatticeSpec::new(cfg.dimension, m + cfg.padding)?;
            let outer_spec = LatticeSpec::new(cfg.dimension, m + 2 * cfg.padding)?;
            let outer_block = centered_block(outer_spec, m)?;
            let l = 2 * m + 1;
            let runs = par_realizations(cfg.realizations, |i| {
                let pot = crate::hamiltonian::sample_potential_extended(
                    &cfg.model,
                    inner_spec,
                    outer_spec,
                    cfg.master_seed,
                    i,
                )?;
                let h = crate::hamiltonian::assemble(outer_spec, &pot)?;
                let eig = crate::spectral::diagonalize(&h)?;
                let mu = cfg.resolve_mu(&eig)?;
                let factor = ProjectionFactor::new(&eig, mu);
                let (s, _) = block_entropies(&factor, outer_block.sites(), &[])?;
                Ok(s.value)
            });
            let doubled: Vec<(u64, f64)> = filter_degenerate(runs, cfg.realizations)?;
            // pair against the headline values by realization index
            let base: std::collections::BTreeMap<u64, f64> = rows
                .records
                .iter()
                .filter(|r| r.l == l)
                .map(|r| (r.realization, r.s_bits.unwrap()))
                .collect();
            let mut paired_diff = Vec::new();
            let mut base_vals = Vec::new();
            let mut doubled_vals = Vec::new();
            for (i, s2) in &doubled {
                if let Some(&s1) = base.get(i) {
                    paired_diff.push(s2 - s1);
                    base_vals.push(s1);
                    doubled_vals.push(*s2);
                }
            }
            let (mean, var) = crate::stats::two_pass(&base_vals);
            let (mean2, _) = crate::stats::two_pass(&doubled_vals);
            let (mean_diff, _) = crate::stats::two_pass(&paired_diff);
            let stderr = (var / base_vals.len() as f64).sqrt();
            checks.push(PaddingCheck {
                l,
                mean,
                mean_doubled_pad: mean2,
                stderr,
                converged: mean_diff.abs() < stderr.max(1e-12),
            });
        }
        if let Some(bad) = checks.iter().find(|c| !c.converged) {
            return Err(Error::Numeric(format!(
                "padding-doubling gate failed at L={}: |{} - {}| >= stderr {}; \
                 the box does not yet approximate the infinite volume",
                bad.l, bad.mean, bad.mean_doubled_pad, bad.stderr
            )));
        }
        Some(checks)
    } else {
        None
    };

    Ok(ExperimentOutput {
        records: rows.records,
        timings: rows.timings,
        summary: Summary::Sweep(SweepSummary {
            stats,
            padding_checks,
        }),
    })
}
