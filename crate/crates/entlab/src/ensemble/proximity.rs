//! Restriction proximity: how fast the Fermi projection of the Dirichlet
//! restriction H_Λ approaches the full-box projection away from ∂Λ. The
//! profile bins E|P(x,y) - P^Λ(x,y)| by dist(x,∂Λ) + dist(y,∂Λ); under
//! localization it decays exponentially, which is what licenses the padded
//! box as an infinite-volume surrogate everywhere else in this crate.

use super::*;
use crate::hamiltonian::restrict;
use crate::spectral::diagonalize;
use std::time::Instant;

pub fn restriction_proximity(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate(Experiment::Proximity)?;
    let m = cfg.max_block_half_width();
    let spec = LatticeSpec::new(cfg.dimension, m + cfg.padding)?;
    let inner = centered_block(spec, m)?;
    let l = 2 * m + 1;

    // dist(x, ∂Λ_m) = m - ||x||_inf for the centered cube
    let depth: Vec<i64> = inner
        .coords()
        .map(|x| {
            let norm = (0..cfg.dimension).map(|k| x[k].abs()).max().unwrap();
            m - norm
        })
        .collect();
    let n_bins = (2 * m + 1) as usize;

    let runs = par_realizations(cfg.realizations, |i| {
        let t0 = Instant::now();
        let real = realize_box(cfg, spec, i, true)?;
        let h = real.hamiltonian.as_ref().unwrap();
        let factor = ProjectionFactor::new(&real.eig, real.mu);
        let p_block = factor.principal_block(inner.sites());

        let restricted = restrict(h, &inner)?;
        let eig_r = diagonalize(&restricted)?;
        // same μ: the restricted spectrum may sit close to it; that counts
        // as a degenerate event for this realization
        let scale = eig_r.spectral_scale();
        let (gap, idx) = eig_r.gap_at(real.mu);
        if gap <= crate::spectral::DEGENERACY_TOL * scale {
            return Err(Error::DegenerateFermiLevel {
                eigenvalue: eig_r.eigenvalues[idx],
                index: idx,
                tol: crate::spectral::DEGENERACY_TOL * scale,
            });
        }
        let factor_r = ProjectionFactor::new(&eig_r, real.mu);
        let all: Vec<usize> = (0..inner.len()).collect();
        let p_restricted = factor_r.principal_block(&all);

        let mut sums = vec![0.0f64; n_bins];
        let mut counts = vec![0u64; n_bins];
        for a in 0..inner.len() {
            for b in 0..inner.len() {
                let bin = (depth[a] + depth[b]) as usize;
                sums[bin] += (p_block[[a, b]] - p_restricted[[a, b]]).abs();
                counts[bin] += 1;
            }
        }
        let profile: Vec<f64> = sums
            .iter()
            .zip(&counts)
            .map(|(s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
            .collect();
        let center_local = inner
            .sites()
            .iter()
            .position(|&idx| idx == spec.center())
            .expect("center lies in the inner block");
        let center_diff = (p_block[[center_local, center_local]]
            - p_restricted[[center_local, center_local]])
        .abs();

        let mut rec = RunRecord::new(Experiment::Proximity, cfg, l, cfg.padding, real.mu, i);
        rec.profile = Some(profile);
        rec.center_diff = Some(center_diff);
        Ok((rec, t0.elapsed().as_millis() as u64))
    });

    let kept = filter_degenerate(runs, cfg.realizations)?;
    let mut records = Vec::with_capacity(kept.len());
    let mut timings = Vec::with_capacity(kept.len());
    let mut rows = Vec::with_capacity(kept.len());
    for (i, (rec, ms)) in kept {
        rows.push(rec.profile.clone().unwrap());
        timings.push(TimingRecord {
            experiment: "proximity".into(),
            l,
            realization: i,
            wall_ms: ms,
        });
        records.push(rec);
    }

    let xs: Vec<f64> = (0..n_bins).map(|d| d as f64).collect();
    let profile = Profile::from_rows(xs, &rows)?;
    // every bin mixes many pairs, so bins rarely clear a hard SNR gate
    // individually; fit all of them, weighted by their log-uncertainty
    let fit = crate::fit::fit_exponential_weighted(&profile.x, &profile.mean, &profile.stderr)?;

    Ok(ExperimentOutput {
        records,
        timings,
        summary: Summary::Profile(ProfileSummary {
            experiment: "proximity".into(),
            l,
            profile,
            fit,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::PotentialModel;

    #[test]
    fn strong_disorder_proximity_decays_exponentially() {
        let cfg = ExperimentConfig {
            model: PotentialModel::IidUniform { amplitude: 5.0 },
            dimension: 1,
            block_half_widths: vec![12],
            padding: 8,
            chemical_potential: None,
            filling_fraction: Some(0.5),
            realizations: 60,
            master_seed: 11,
            renyi_alphas: vec![],
            padding_check: false,
            decay_r_max: None,
            split_box_factor: 4,
            halfspace_truncation: 1e-6,
            frac_s: 0.5,
            frac_epsilon: 0.1,
            frac_lambda: 0.0,
        };
        let out = restriction_proximity(&cfg).unwrap();
        let Summary::Profile(p) = &out.summary else {
            panic!("wrong summary kind")
        };
        assert!(p.fit.rate > 0.0, "γ̂ = {}", p.fit.rate);
        // boundary bins are larger than deep bins
        assert!(p.profile.mean[0] > *p.profile.mean.last().unwrap());
    }
}
