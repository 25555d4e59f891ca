//! Disorder Monte Carlo driver and the experiment families built on it:
//! entropy scaling sweeps, kernel-decay fits, restriction proximity, d=1
//! edge splitting, variance scaling, halfspace surface density, and
//! fractional-moment profiles.
//!
//! Reproducibility contract: realization i draws its potential from the
//! stream seed mix64(master_seed, i), independently of every other knob, so
//! growing `realizations` extends an ensemble without disturbing the
//! already-computed values, and the emitted records are identical for any
//! worker count (indexed parallel iteration, then a stable sort order).

pub mod decay;
pub mod fracmom;
pub mod halfspace;
pub mod proximity;
pub mod split;
pub mod sweep;
pub mod variance;

use crate::entropy::{entropy_of_block, EntropyResult, SpectralFunction};
use crate::error::{Error, Result};
use crate::fit::FitResult;
use crate::hamiltonian::{assemble, mix64, sample_potential, HamiltonianMatrix, PotentialModel};
use crate::lattice::LatticeSpec;
use crate::spectral::{diagonalize, EigenDecomposition, ProjectionFactor};
use crate::stats::EnsembleStats;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Hard cap on the dense matrix order; everything downstream assumes
/// desk-scale full eigensolves.
pub const MAX_SITE_COUNT: usize = 4096;

fn default_true() -> bool {
    true
}
fn default_split_factor() -> i64 {
    4
}
fn default_truncation() -> f64 {
    1e-6
}
fn default_frac_s() -> f64 {
    0.5
}
fn default_frac_epsilon() -> f64 {
    0.1
}

/// One config drives every experiment; unknown keys are rejected so a typo in
/// a disorder strength cannot silently produce a clean run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: PotentialModel,
    pub dimension: usize,
    /// Block half-widths m; the block side is 2m+1.
    pub block_half_widths: Vec<i64>,
    /// Box half-width is m + padding (the box is the infinite-volume
    /// surrogate; see `padding_check`).
    pub padding: i64,
    #[serde(default)]
    pub chemical_potential: Option<f64>,
    #[serde(default)]
    pub filling_fraction: Option<f64>,
    pub realizations: u64,
    pub master_seed: u64,
    #[serde(default)]
    pub renyi_alphas: Vec<f64>,
    /// Rerun each sweep point with doubled padding and require the mean shift
    /// to stay below the statistical error. On by default for sweeps.
    #[serde(default = "default_true")]
    pub padding_check: bool,
    /// Kernel-decay / fractional-moment ray length; defaults to M-2.
    #[serde(default)]
    pub decay_r_max: Option<i64>,
    /// Split experiment box factor: box half-width N = factor·M, factor ≥ 4.
    #[serde(default = "default_split_factor")]
    pub split_box_factor: i64,
    /// Halfspace depth sum truncation threshold on the mean summand.
    #[serde(default = "default_truncation")]
    pub halfspace_truncation: f64,
    /// Fractional moment order s ∈ (0,1).
    #[serde(default = "default_frac_s")]
    pub frac_s: f64,
    /// Imaginary offset ε > 0 of the resolvent energy.
    #[serde(default = "default_frac_epsilon")]
    pub frac_epsilon: f64,
    /// Real part λ of the resolvent energy.
    #[serde(default)]
    pub frac_lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Sweep,
    Decay,
    Proximity,
    Variance,
    Split,
    Halfspace,
    Fracmom,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Sweep => "sweep",
            Experiment::Decay => "decay",
            Experiment::Proximity => "proximity",
            Experiment::Variance => "variance",
            Experiment::Split => "split",
            Experiment::Halfspace => "halfspace",
            Experiment::Fracmom => "fracmom",
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self, experiment: Experiment) -> Result<()> {
        if !(1..=3).contains(&self.dimension) {
            return Err(Error::Config(format!(
                "dimension must be in 1..=3, got {}",
                self.dimension
            )));
        }
        self.model
            .validate(self.dimension)
            .map_err(|e| Error::Config(e.to_string()))?;
        if self.block_half_widths.is_empty() {
            return Err(Error::Config("block_half_widths must be nonempty".into()));
        }
        let mut sorted = self.block_half_widths.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.block_half_widths.len() || sorted != self.block_half_widths {
            return Err(Error::Config(
                "block_half_widths must be strictly increasing".into(),
            ));
        }
        if sorted[0] < 1 {
            return Err(Error::Config("block half-widths must be >= 1".into()));
        }
        if self.padding < 1 {
            return Err(Error::Config("padding must be >= 1".into()));
        }
        if self.realizations < 2 {
            return Err(Error::Config(
                "realizations must be >= 2 for any variance output".into(),
            ));
        }
        match (self.chemical_potential, self.filling_fraction) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "give chemical_potential or filling_fraction, not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::Config(
                    "one of chemical_potential or filling_fraction is required".into(),
                ))
            }
            (None, Some(f)) if !f.is_finite() || f <= 0.0 || f >= 1.0 => {
                return Err(Error::Config(format!(
                    "filling_fraction must be in (0,1), got {f}"
                )))
            }
            _ => {}
        }
        for &a in &self.renyi_alphas {
            if !a.is_finite() || a <= 0.0 || a == 1.0 {
                return Err(Error::Config(format!(
                    "renyi alpha must be positive and != 1, got {a}"
                )));
            }
        }
        let m_max = *sorted.last().unwrap();
        let box_half = match experiment {
            Experiment::Split => {
                if self.dimension != 1 {
                    return Err(Error::Config("split-check is d=1 only".into()));
                }
                if self.split_box_factor < 4 {
                    return Err(Error::Geometry(format!(
                        "split box factor must be >= 4 (N >= 4M), got {}",
                        self.split_box_factor
                    )));
                }
                self.split_box_factor * m_max
            }
            _ => m_max + self.padding,
        };
        let spec = LatticeSpec::new(self.dimension, box_half)?;
        if spec.site_count() > MAX_SITE_COUNT {
            return Err(Error::Config(format!(
                "largest box has {} sites, exceeding the {MAX_SITE_COUNT}-site cap",
                spec.site_count()
            )));
        }
        match experiment {
            Experiment::Variance if self.dimension >= 2 && self.realizations < 100 => {
                return Err(Error::StatisticalPower(format!(
                    "variance scaling at d={} needs >= 100 realizations, got {}",
                    self.dimension, self.realizations
                )));
            }
            Experiment::Proximity if self.padding < 4 => {
                return Err(Error::Config(
                    "restriction proximity needs padding >= 4".into(),
                ));
            }
            Experiment::Fracmom => {
                if !self.frac_s.is_finite() || self.frac_s <= 0.0 || self.frac_s >= 1.0 {
                    return Err(Error::Config(format!(
                        "frac_s must be in (0,1), got {}",
                        self.frac_s
                    )));
                }
                if !self.frac_epsilon.is_finite() || self.frac_epsilon <= 0.0 {
                    return Err(Error::Config(format!(
                        "frac_epsilon must be > 0, got {}",
                        self.frac_epsilon
                    )));
                }
            }
            Experiment::Halfspace
                if !self.halfspace_truncation.is_finite() || self.halfspace_truncation <= 0.0 =>
            {
                return Err(Error::Config(
                    "halfspace_truncation must be > 0".into(),
                ));
            }
            _ => {}
        }
        Ok(())
    }

    pub fn max_block_half_width(&self) -> i64 {
        *self.block_half_widths.iter().max().unwrap()
    }

    /// Fermi level for one realization: the fixed μ when configured, else the
    /// gap midpoint at k = round(filling·n) filled modes.
    pub fn resolve_mu(&self, eig: &EigenDecomposition) -> Result<f64> {
        if let Some(mu) = self.chemical_potential {
            let n = eig.order();
            let scale = eig.spectral_scale();
            let (gap, idx) = eig.gap_at(mu);
            // μ entirely outside the spectrum is always fine
            if gap <= crate::spectral::DEGENERACY_TOL * scale
                && mu >= eig.eigenvalues[0]
                && mu <= eig.eigenvalues[n - 1]
            {
                return Err(Error::DegenerateFermiLevel {
                    eigenvalue: eig.eigenvalues[idx],
                    index: idx,
                    tol: crate::spectral::DEGENERACY_TOL * scale,
                });
            }
            Ok(mu)
        } else {
            let nu = self.filling_fraction.expect("validated");
            let n = eig.order();
            let k = ((nu * n as f64 + 0.5).floor() as usize).clamp(1, n - 1);
            eig.mu_from_filling(k)
        }
    }
}

/// One JSONL record per (experiment, block size, realization). Entropy-type
/// experiments fill `S_bits` (and `renyi` when requested); profile-type
/// experiments carry their per-realization payload instead. Field order is
/// part of the wire format: records must be byte-stable across reruns.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub experiment: String,
    pub model: String,
    pub d: usize,
    #[serde(rename = "L")]
    pub l: i64,
    pub pad: i64,
    pub mu: f64,
    /// Per-realization stream seed mix64(master_seed, realization).
    pub seed: u64,
    pub realization: u64,
    #[serde(rename = "S_bits", skip_serializing_if = "Option::is_none")]
    pub s_bits: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub renyi: Option<BTreeMap<String, f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_plus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_minus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split_disc: Option<f64>,
    /// Proximity experiment: |P - P^Λ| at the box center.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center_diff: Option<f64>,
    /// Decay / fractional-moment / proximity profile values, indexed by the
    /// experiment's abscissa (r or boundary distance).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<Vec<f64>>,
    /// Halfspace h(P)-diagonal by depth j (largest block's records only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub halfcut_diag: Option<Vec<f64>>,
}

impl RunRecord {
    fn new(experiment: Experiment, cfg: &ExperimentConfig, l: i64, pad: i64, mu: f64, i: u64) -> Self {
        RunRecord {
            experiment: experiment.name().to_string(),
            model: cfg.model.tag(),
            d: cfg.dimension,
            l,
            pad,
            mu,
            seed: mix64(cfg.master_seed, i),
            realization: i,
            s_bits: None,
            renyi: None,
            s_plus: None,
            s_minus: None,
            split_disc: None,
            center_diff: None,
            profile: None,
            halfcut_diag: None,
        }
    }
}

/// Wall-clock sidecar record. Timing lives outside results.jsonl so the
/// results file stays bit-identical across reruns.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimingRecord {
    pub experiment: String,
    #[serde(rename = "L")]
    pub l: i64,
    pub realization: u64,
    pub wall_ms: u64,
}

/// Mean/stderr profile over an integer abscissa (decay radius, boundary
/// distance, halfspace depth).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Profile {
    pub x: Vec<f64>,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub count: u64,
}

impl Profile {
    /// Columnwise moments of per-realization profile rows.
    pub fn from_rows(x: Vec<f64>, rows: &[Vec<f64>]) -> Result<Profile> {
        if rows.is_empty() {
            return Err(Error::StatisticalPower("no realizations survived".into()));
        }
        let k = x.len();
        let n = rows.len() as f64;
        let mut mean = vec![0.0; k];
        let mut stderr = vec![0.0; k];
        for j in 0..k {
            let col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
            let (m, v) = crate::stats::two_pass(&col);
            mean[j] = m;
            stderr[j] = (v / n).sqrt();
        }
        Ok(Profile {
            x,
            mean,
            stderr,
            count: rows.len() as u64,
        })
    }
}

/// Everything an experiment emits: per-realization records (sorted by
/// (L, realization)), the timing sidecar, and a typed summary.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub records: Vec<RunRecord>,
    pub timings: Vec<TimingRecord>,
    pub summary: Summary,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Summary {
    Sweep(sweep::SweepSummary),
    Profile(ProfileSummary),
    Variance(variance::VarianceSummary),
    Split(split::SplitSummary),
    Halfspace(halfspace::HalfspaceSummary),
}

/// Shared summary shape for decay-type experiments. An underdetermined fit
/// aborts the experiment instead of landing here.
#[derive(Debug, Clone, Serialize)]
pub struct ProfileSummary {
    pub experiment: String,
    #[serde(rename = "L")]
    pub l: i64,
    pub profile: Profile,
    pub fit: FitResult,
}

/// Per-realization work product of the common "diagonalize one padded box"
/// step.
pub(crate) struct Realized {
    pub eig: EigenDecomposition,
    pub mu: f64,
    pub hamiltonian: Option<HamiltonianMatrix>,
}

pub(crate) fn realize_box(
    cfg: &ExperimentConfig,
    spec: LatticeSpec,
    index: u64,
    keep_h: bool,
) -> Result<Realized> {
    let pot = sample_potential(&cfg.model, spec, cfg.master_seed, index)?;
    let h = assemble(spec, &pot)?;
    let eig = diagonalize(&h)?;
    let mu = cfg.resolve_mu(&eig)?;
    Ok(Realized {
        eig,
        mu,
        hamiltonian: keep_h.then_some(h),
    })
}

/// Run the closure for every realization index in parallel, preserving index
/// order in the output.
pub(crate) fn par_realizations<T: Send>(
    realizations: u64,
    f: impl Fn(u64) -> Result<T> + Sync,
) -> Vec<(u64, Result<T>)> {
    (0..realizations)
        .into_par_iter()
        .map(|i| (i, f(i)))
        .collect()
}

/// Drop (and tally) realizations that hit a degenerate Fermi level; abort the
/// experiment when more than 1% do, which indicates μ sits at a gap edge.
pub(crate) fn filter_degenerate<T>(
    results: Vec<(u64, Result<T>)>,
    total: u64,
) -> Result<Vec<(u64, T)>> {
    let mut ok = Vec::with_capacity(results.len());
    let mut degenerate = 0u64;
    for (i, res) in results {
        match res {
            Ok(t) => ok.push((i, t)),
            Err(Error::DegenerateFermiLevel { .. }) | Err(Error::GaplessFilling { .. }) => {
                degenerate += 1;
            }
            Err(e) => return Err(e),
        }
    }
    if degenerate * 100 > total {
        return Err(Error::Numeric(format!(
            "{degenerate} of {total} realizations hit a degenerate Fermi level; \
             μ likely sits at a gap edge"
        )));
    }
    Ok(ok)
}

/// Centered cube block Λ_m inside a padded box, as flat indices.
pub(crate) fn centered_block(spec: LatticeSpec, m: i64) -> Result<crate::lattice::Region> {
    crate::lattice::cube_region(spec, m)
}

/// Block entropy and Rényi values from a projection factor.
pub(crate) fn block_entropies(
    factor: &ProjectionFactor,
    sites: &[usize],
    alphas: &[f64],
) -> Result<(EntropyResult, BTreeMap<String, f64>)> {
    let block = factor.principal_block(sites);
    let s = entropy_of_block(&block, SpectralFunction::BinaryEntropy)?;
    let mut renyi = BTreeMap::new();
    for &alpha in alphas {
        let r = entropy_of_block(&block, SpectralFunction::Renyi { alpha })?;
        renyi.insert(format!("{alpha}"), r.value);
    }
    Ok((s, renyi))
}

/// Per-L grouping of raw entropy values out of sorted records.
pub(crate) fn group_by_l(values: &[(i64, f64)]) -> BTreeMap<i64, Vec<f64>> {
    let mut map: BTreeMap<i64, Vec<f64>> = BTreeMap::new();
    for &(l, v) in values {
        map.entry(l).or_default().push(v);
    }
    map
}

/// EnsembleStats rows for each L in ascending order.
pub(crate) fn stats_per_l(
    groups: &BTreeMap<i64, Vec<f64>>,
    dimension: usize,
) -> Result<Vec<EnsembleStats>> {
    groups
        .iter()
        .map(|(&l, vals)| EnsembleStats::from_raw(l, dimension, vals))
        .collect()
}

