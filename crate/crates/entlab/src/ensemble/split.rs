//! d=1 edge splitting: per realization, compare the block entropy
//! S_Λ, Λ = [-M, M], against the sum of the two one-cut entropies
//! S₊ + S₋, where S₊ = Tr h₀(Π) across the single cut at +M (block =
//! everything left of the cut inside a much larger box, complement = the
//! rest) and S₋ symmetrically at -M. Under localization the discrepancy
//! vanishes as M grows; for the clean system the logarithmic entropy growth
//! breaks the splitting and the discrepancy persists.

use super::*;
use crate::entropy::entropy_of_pi;
use serde::Serialize;
use std::time::Instant;

#[derive(Debug, Clone, Serialize)]
pub struct SplitRow {
    #[serde(rename = "M")]
    pub m: i64,
    #[serde(rename = "N")]
    pub box_half_width: i64,
    pub mean_disc: f64,
    pub stderr_disc: f64,
    pub mean_s: f64,
    pub mean_s_plus: f64,
    pub mean_s_minus: f64,
    pub count: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitSummary {
    pub rows: Vec<SplitRow>,
}

pub fn split_check_1d(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate(Experiment::Split)?;
    let mut records = Vec::new();
    let mut timings = Vec::new();
    let mut rows = Vec::new();

    for &m in &cfg.block_half_widths {
        let n_half = cfg.split_box_factor * m;
        let spec = LatticeSpec::new(1, n_half)?;
        let block = centered_block(spec, m)?;
        let l = 2 * m + 1;
        // flat index of coordinate x on the 1d box is x + N
        let cut_plus_c1: Vec<usize> = (0..=(m + n_half) as usize).collect();
        let cut_plus_c2: Vec<usize> = ((m + n_half) as usize + 1..spec.site_count()).collect();
        let cut_minus_c1: Vec<usize> = ((n_half - m) as usize..spec.site_count()).collect();
        let cut_minus_c2: Vec<usize> = (0..(n_half - m) as usize).collect();

        let runs = par_realizations(cfg.realizations, |i| {
            let t0 = Instant::now();
            let real = realize_box(cfg, spec, i, false)?;
            let factor = ProjectionFactor::new(&real.eig, real.mu);
            let (s, renyi) = block_entropies(&factor, block.sites(), &cfg.renyi_alphas)?;
            let cut_entropy = |c1: &[usize], c2: &[usize]| -> Result<f64> {
                let a = factor.block(c1, c2);
                let pi = a.dot(&a.t());
                Ok(entropy_of_pi(&pi)?.value)
            };
            let s_plus = cut_entropy(&cut_plus_c1, &cut_plus_c2)?;
            let s_minus = cut_entropy(&cut_minus_c1, &cut_minus_c2)?;
            let mut rec = RunRecord::new(Experiment::Split, cfg, l, n_half - m, real.mu, i);
            rec.s_bits = Some(s.value);
            if !renyi.is_empty() {
                rec.renyi = Some(renyi);
            }
            rec.s_plus = Some(s_plus);
            rec.s_minus = Some(s_minus);
            rec.split_disc = Some((s.value - (s_plus + s_minus)).abs());
            Ok((rec, t0.elapsed().as_millis() as u64))
        });

        let kept = filter_degenerate(runs, cfg.realizations)?;
        let mut disc = Vec::with_capacity(kept.len());
        let mut s_all = Vec::new();
        let mut sp_all = Vec::new();
        let mut sm_all = Vec::new();
        for (i, (rec, ms)) in kept {
            disc.push(rec.split_disc.unwrap());
            s_all.push(rec.s_bits.unwrap());
            sp_all.push(rec.s_plus.unwrap());
            sm_all.push(rec.s_minus.unwrap());
            timings.push(TimingRecord {
                experiment: "split".into(),
                l,
                realization: i,
                wall_ms: ms,
            });
            records.push(rec);
        }
        let (mean_disc, var_disc) = crate::stats::two_pass(&disc);
        rows.push(SplitRow {
            m,
            box_half_width: n_half,
            mean_disc,
            stderr_disc: (var_disc / disc.len() as f64).sqrt(),
            mean_s: crate::stats::two_pass(&s_all).0,
            mean_s_plus: crate::stats::two_pass(&sp_all).0,
            mean_s_minus: crate::stats::two_pass(&sm_all).0,
            count: disc.len() as u64,
        });
    }

    Ok(ExperimentOutput {
        records,
        timings,
        summary: Summary::Split(SplitSummary { rows }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::PotentialModel;

    fn cfg(model: PotentialModel, ms: Vec<i64>, r: u64) -> ExperimentConfig {
        ExperimentConfig {
            model,
            dimension: 1,
            block_half_widths: ms,
            padding: 1,
            chemical_potential: None,
            filling_fraction: Some(0.5),
            realizations: r,
            master_seed: 3,
            renyi_alphas: vec![],
            padding_check: false,
            decay_r_max: None,
            split_box_factor: 4,
            halfspace_truncation: 1e-6,
            frac_s: 0.5,
            frac_epsilon: 0.1,
            frac_lambda: 0.0,
        }
    }

    #[test]
    fn splitting_improves_with_block_size_at_strong_disorder() {
        let out = split_check_1d(&cfg(
            PotentialModel::IidUniform { amplitude: 5.0 },
            vec![4, 12],
            30,
        ))
        .unwrap();
        let Summary::Split(s) = &out.summary else {
            panic!("wrong summary kind")
        };
        assert!(s.rows[1].mean_disc < s.rows[0].mean_disc);
        // per-realization edge entropies are positive for μ inside the spectrum
        for r in &out.records {
            assert!(r.s_plus.unwrap() > 0.0);
            assert!(r.s_minus.unwrap() > 0.0);
        }
    }

    #[test]
    fn clean_system_does_not_split() {
        // log growth breaks the splitting: the discrepancy must NOT shrink
        let out = split_check_1d(&cfg(PotentialModel::Zero, vec![4, 12], 2)).unwrap();
        let Summary::Split(s) = &out.summary else {
            panic!("wrong summary kind")
        };
        assert!(
            s.rows[1].mean_disc > 0.5 * s.rows[0].mean_disc,
            "clean splitting unexpectedly converged: {:?}",
            s.rows
        );
    }

    #[test]
    fn split_rejects_d2_and_small_boxes() {
        let mut c = cfg(PotentialModel::IidUniform { amplitude: 5.0 }, vec![4], 4);
        c.dimension = 2;
        assert!(split_check_1d(&c).is_err());
        let mut c = cfg(PotentialModel::IidUniform { amplitude: 5.0 }, vec![4], 4);
        c.split_box_factor = 3;
        assert!(split_check_1d(&c).is_err());
    }
}
