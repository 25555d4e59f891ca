//! Executable property suites: the exact identities behind the entropy
//! machinery, the many-body oracle equivalence, and the clean-case
//! logarithmic growth. The CLI `verify` command runs these and prints a
//! pass/fail table; the test suite calls them directly.
//!
//! A fault-injection hook deliberately breaks the h₀ square-root guard so CI
//! can confirm the suite actually catches a corrupted entropy route.

use crate::entropy::{
    self, entropy_of_block, entropy_of_pi, eval_h, eval_h0, pi_operator, schatten_quasinorm,
    SpectralFunction,
};
use crate::error::Result;
use crate::hamiltonian::{assemble, sample_potential, PotentialModel, GOLDEN_MEAN_CONJUGATE};
use crate::lattice::{LatticeSpec, Region};
use crate::oracle::{
    clean_entropy_1d, clean_log_lower_bound, manybody_entropy, FockOracleInput, SineKernel,
};
use crate::spectral::{diagonalize, eigh_symmetric, FermiProjection};
use ndarray::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Check {
            name,
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Drop the √(1-4t) guard and the clipping in h₀ along the Π route.
    H0SqrtGuard,
}

/// Deterministic catalogue of random cases: mixed models, dimensions and
/// block shapes, all with box eigensolves small enough to stay subsecond.
struct RandomCase {
    projection: FermiProjection,
    spec: LatticeSpec,
    block: Region,
}

fn random_cases(count: usize, seed: u64) -> Result<Vec<RandomCase>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::with_capacity(count);
    let mut attempt = 0u64;
    while cases.len() < count {
        attempt += 1;
        let d = 1 + (rng.random::<u32>() % 3) as usize;
        let m = match d {
            1 => 3 + (rng.random::<u32>() % 8) as i64, // L <= 21
            2 => 1 + (rng.random::<u32>() % 3) as i64, // side <= 7
            _ => 1,
        };
        let spec = LatticeSpec::new(d, m)?;
        let model = match rng.random::<u32>() % 4 {
            0 => PotentialModel::Zero,
            1 => PotentialModel::IidUniform {
                amplitude: 0.5 + 5.0 * rng.random::<f64>(),
            },
            2 => PotentialModel::IidGaussian {
                stddev: 0.5 + 2.0 * rng.random::<f64>(),
            },
            _ if d == 1 => PotentialModel::AlmostMathieu {
                coupling: 0.5 + 2.0 * rng.random::<f64>(),
                frequency: GOLDEN_MEAN_CONJUGATE,
                phase: rng.random::<f64>(),
            },
            _ => PotentialModel::IidUniform {
                amplitude: 0.5 + 5.0 * rng.random::<f64>(),
            },
        };
        let pot = sample_potential(&model, spec, 0xC0FFEE ^ seed, attempt)?;
        let eig = diagonalize(&assemble(spec, &pot)?)?;
        let n = spec.site_count();
        let k = 1 + (rng.random::<u32>() as usize) % (n - 1);
        let mu = match eig.mu_from_filling(k) {
            Ok(mu) => mu,
            Err(_) => continue, // gapless at this filling; redraw
        };
        let projection = eig.fermi_projection(mu, false)?;
        // random nonempty strict subset
        let mut sites: Vec<usize> = (0..n).filter(|_| rng.random::<f64>() < 0.5).collect();
        if sites.is_empty() {
            sites.push(rng.random::<u32>() as usize % n);
        }
        if sites.len() == n {
            sites.pop();
        }
        let block = Region::from_sites(spec, sites)?;
        cases.push(RandomCase {
            projection,
            spec,
            block,
        });
    }
    Ok(cases)
}

/// Exact-identity suite: route equality, complement symmetry, idempotency,
/// the Π-operator lemma properties, the h₀ grid bounds, the matrix Jensen
/// inequality, the Schatten quasi-norm triangle property, and the surface
/// lower bound. `fault` corrupts the Π route to prove the suite can fail.
pub fn properties_suite(fault: Option<Fault>) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let cases = random_cases(100, 2024)?;

    // --- route equality + complement symmetry + idempotency + bounds ---
    let mut worst_route = 0.0f64;
    let mut worst_sym = 0.0f64;
    let mut worst_idem = 0.0f64;
    let mut worst_lower = 0.0f64;
    let mut worst_range = 0.0f64;
    for case in &cases {
        let p = &case.projection;
        let s_block = entropy_of_block(
            &entropy::block_projection(p, &case.block)?,
            SpectralFunction::BinaryEntropy,
        )?;
        let s_pi = match fault {
            None => {
                entropy_of_pi(&pi_operator(p, &case.block, &case.block.complement())?.matrix)?
                    .value
            }
            Some(Fault::H0SqrtGuard) => {
                let pi = pi_operator(p, &case.block, &case.block.complement())?;
                let (vals, _) = eigh_symmetric(&pi.matrix)?;
                vals.iter().map(|&t| entropy::h0_unguarded(t)).sum()
            }
        };
        let per_site = (s_block.value - s_pi).abs() / case.block.len() as f64;
        // NaN from the injected fault must count as a failure
        worst_route = if per_site.is_nan() {
            f64::INFINITY
        } else {
            worst_route.max(per_site)
        };
        let sym = entropy::complement_symmetry_check(p, &case.block)?;
        worst_sym = worst_sym.max(sym / s_block.value.max(1.0));
        worst_idem = worst_idem.max(p.idempotency_defect());
        let lower = 4.0 * entropy::pi_trace(p, &case.block)?;
        worst_lower = worst_lower.max(lower - s_block.value);
        let cap = case.block.len() as f64;
        worst_range = worst_range.max((-s_block.value).max(s_block.value - cap));
    }
    checks.push(Check::new(
        "route equality |Tr h(P_L) - Tr h0(Pi_L)| <= 1e-8 per site",
        worst_route <= 1e-8,
        format!(
            "worst per-site gap {worst_route:.3e} over {} cases",
            cases.len()
        ),
    ));
    checks.push(Check::new(
        "complement symmetry |S_L - S_Lc| <= 1e-8*max(1,S)",
        worst_sym <= 1e-8,
        format!("worst relative gap {worst_sym:.3e}"),
    ));
    checks.push(Check::new(
        "projection idempotency ||P^2 - P||_max <= 1e-9",
        worst_idem <= 1e-9,
        format!("worst defect {worst_idem:.3e}"),
    ));
    checks.push(Check::new(
        "surface lower bound S >= 4*Tr Pi - 1e-8",
        worst_lower <= 1e-8,
        format!("worst excess {worst_lower:.3e}"),
    ));
    checks.push(Check::new(
        "entropy range 0 <= S <= |block|",
        worst_range <= 0.0,
        format!("worst range violation {worst_range:.3e}"),
    ));

    // --- h0 grid suite on 10^4 points of [0, 1/4] ---
    let grid: Vec<f64> = (0..=10_000).map(|i| 0.25 * i as f64 / 10_000.0).collect();
    let vals: Vec<f64> = grid.iter().map(|&t| eval_h0(t)).collect::<Result<_>>()?;
    let monotone = vals.windows(2).all(|w| w[1] >= w[0]);
    let bounds = grid
        .iter()
        .zip(&vals)
        .all(|(&t, &v)| v >= 4.0 * t - 1e-12 && v <= 1.0 + 1e-12);
    let mut concave = true;
    for i in 0..grid.len() - 2 {
        let mid = 0.5 * (vals[i] + vals[i + 2]);
        if vals[i + 1] < mid - 1e-12 {
            concave = false;
            break;
        }
    }
    checks.push(Check::new(
        "h0 grid: nondecreasing on [0,1/4]",
        monotone,
        format!("{} grid points", grid.len()),
    ));
    checks.push(Check::new(
        "h0 grid: 4t <= h0(t) <= 1",
        bounds,
        "pointwise bound".into(),
    ));
    checks.push(Check::new(
        "h0 grid: midpoint concavity within 1e-12",
        concave,
        "three-point test".into(),
    ));

    // --- Pi-operator lemma suite on random projections ---
    let mut psd_ok = true;
    let mut quarter_ok = true;
    let mut restrict_ok = true;
    let mut additive_ok = true;
    let mut rng = ChaCha8Rng::seed_from_u64(97);
    for case in cases.iter().take(25) {
        let p = &case.projection;
        let spec = case.spec;
        let c1 = &case.block;
        let c2 = c1.complement();
        let pi = pi_operator(p, c1, &c2)?;
        let (vals, _) = eigh_symmetric(&pi.matrix)?;
        if vals[0] < -1e-10 {
            psd_ok = false;
        }
        if vals[vals.len() - 1] > 0.25 + 1e-10 {
            quarter_ok = false;
        }
        // restriction: Pi over a sub-block is the principal submatrix
        if c1.len() >= 2 {
            let keep: Vec<usize> = c1.sites().iter().copied().take(c1.len() / 2 + 1).collect();
            let sub_region = Region::from_sites(spec, keep.clone())?;
            let pi_sub = pi_operator(p, &sub_region, &c2)?;
            for a in 0..keep.len() {
                for b in 0..keep.len() {
                    if (pi_sub.matrix[[a, b]] - pi.matrix[[a, b]]).abs() > 1e-12 {
                        restrict_ok = false;
                    }
                }
            }
        }
        // additivity over a random partition of C2
        let mut c2a = Vec::new();
        let mut c2b = Vec::new();
        for &s in c2.sites() {
            if rng.random::<f64>() < 0.5 {
                c2a.push(s)
            } else {
                c2b.push(s)
            }
        }
        let ra = Region::from_sites(spec, c2a)?;
        let rb = Region::from_sites(spec, c2b)?;
        let pa = pi_operator(p, c1, &ra)?;
        let pb = pi_operator(p, c1, &rb)?;
        let sum = &pa.matrix + &pb.matrix;
        let delta = (&sum - &pi.matrix)
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        if delta > 1e-12 {
            additive_ok = false;
        }
    }
    checks.push(Check::new(
        "Pi PSD: min eigenvalue >= -1e-10",
        psd_ok,
        "25 random projections".into(),
    ));
    checks.push(Check::new(
        "Pi norm: ||Pi_{C,C^c}|| <= 1/4 + 1e-10",
        quarter_ok,
        "25 random projections".into(),
    ));
    checks.push(Check::new(
        "Pi restriction: principal submatrix to 1e-12",
        restrict_ok,
        "sub-block gather".into(),
    ));
    checks.push(Check::new(
        "Pi additivity over disjoint C2 partitions to 1e-12",
        additive_ok,
        "entrywise".into(),
    ));

    // --- matrix Jensen inequality for concave h ---
    let mut jensen_ok = true;
    let mut rng = ChaCha8Rng::seed_from_u64(555);
    for _ in 0..20 {
        let n = 6 + (rng.random::<u32>() as usize) % 10;
        // random symmetric with spectrum in [0,1]: reuse a random matrix's
        // eigenbasis with uniform eigenvalues
        let raw = Array2::from_shape_fn((n, n), |_| rng.random::<f64>() - 0.5);
        let sym = (&raw + &raw.t()).mapv(|v| 0.5 * v);
        let (_, u) = eigh_symmetric(&sym)?;
        let diag: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let mut m = Array2::<f64>::zeros((n, n));
        for (k, &d) in diag.iter().enumerate() {
            let col = u.column(k);
            for i in 0..n {
                for j in 0..n {
                    m[[i, j]] += d * col[i] * col[j];
                }
            }
        }
        let (vals, vecs) = eigh_symmetric(&m)?;
        let h_vals: Vec<f64> = vals.iter().map(|&t| eval_h(t)).collect::<Result<_>>()?;
        for j in 0..n {
            let mut lhs = 0.0;
            for (k, &hv) in h_vals.iter().enumerate() {
                lhs += hv * vecs[[j, k]] * vecs[[j, k]];
            }
            if lhs > eval_h(m[[j, j]])? + 1e-10 {
                jensen_ok = false;
            }
        }
    }
    checks.push(Check::new(
        "matrix Jensen: diag h(M) <= h(diag M) + 1e-10",
        jensen_ok,
        "20 random symmetric matrices".into(),
    ));

    // --- Schatten quasi-norm triangle property ---
    let mut schatten_ok = true;
    let mut rng = ChaCha8Rng::seed_from_u64(777);
    for _ in 0..20 {
        let n = 4 + (rng.random::<u32>() as usize) % 8;
        let mk = |rng: &mut ChaCha8Rng| {
            let g = Array2::from_shape_fn((n, n), |_| rng.random::<f64>() - 0.5);
            g.dot(&g.t())
        };
        let a = mk(&mut rng);
        let b = mk(&mut rng);
        for &alpha in &[0.3, 0.5, 0.9] {
            let lhs = schatten_quasinorm(&(&a + &b), alpha)?.powf(alpha);
            let rhs = schatten_quasinorm(&a, alpha)?.powf(alpha)
                + schatten_quasinorm(&b, alpha)?.powf(alpha);
            if lhs > rhs + 1e-9 {
                schatten_ok = false;
            }
        }
    }
    checks.push(Check::new(
        "Schatten quasi-norm: ||A+B||_a^a <= ||A||_a^a + ||B||_a^a",
        schatten_ok,
        "20 random PSD pairs, alpha in {0.3, 0.5, 0.9}".into(),
    ));

    Ok(checks)
}

/// Many-body oracle equivalence: 50 random (n ≤ 8, potential, filling)
/// triples with prefix blocks must match Tr h(P_Λ) to 1e-9.
pub fn oracle_suite() -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < 50 {
        let n = 2 + (rng.random::<u32>() as usize) % 7; // 2..=8
        let mut h = Array2::<f64>::zeros((n, n));
        for i in 0..n - 1 {
            h[[i, i + 1]] = -1.0;
            h[[i + 1, i]] = -1.0;
        }
        let g = 0.5 + 4.5 * rng.random::<f64>();
        for i in 0..n {
            h[[i, i]] = g * (2.0 * rng.random::<f64>() - 1.0);
        }
        let (vals, vecs) = eigh_symmetric(&h)?;
        let k = 1 + (rng.random::<u32>() as usize) % (n - 1);
        if vals[k] - vals[k - 1] < 1e-8 {
            continue;
        }
        let mu = 0.5 * (vals[k - 1] + vals[k]);
        let block_len = 1 + (rng.random::<u32>() as usize) % n;
        let s_many = manybody_entropy(
            &FockOracleInput {
                one_body: h.clone(),
                block_len,
            },
            mu,
        )?;
        let filled = vecs.slice(s![.., ..k]);
        let p = filled.dot(&filled.t());
        let sub = p.slice(s![..block_len, ..block_len]).to_owned();
        let s_one = entropy_of_block(&sub, SpectralFunction::BinaryEntropy)?.value;
        worst = worst.max((s_many - s_one).abs());
        done += 1;
    }
    Ok(vec![Check::new(
        "Fock-space partial trace equals Tr h(P_L) to 1e-9",
        worst <= 1e-9,
        format!("worst |difference| {worst:.3e} over 50 chains"),
    )])
}

/// Clean-case suite: the sine-kernel closed form at L=1, the logarithmic
/// doubling increment, unbounded entropy growth, and kernel spectra staying
/// inside [0,1].
pub fn clean_suite() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let p = std::f64::consts::FRAC_PI_2;

    let l1 = clean_log_lower_bound(p, 1)?;
    checks.push(Check::new(
        "boundary sum closed form at L=1 equals 1 (odd 1/y^2 series)",
        (l1 - 1.0).abs() <= 1e-9,
        format!("got {l1:.12}"),
    ));

    let target = 4.0 / (std::f64::consts::PI * std::f64::consts::PI);
    let mut increments_ok = true;
    let mut detail = String::new();
    for l in [64usize, 128, 256] {
        let inc = (clean_log_lower_bound(p, 2 * l)? - clean_log_lower_bound(p, l)?)
            / std::f64::consts::LN_2;
        if (inc - target).abs() > 0.05 * target {
            increments_ok = false;
        }
        detail.push_str(&format!("L={l}: {inc:.5} "));
    }
    checks.push(Check::new(
        "doubling increment within 5% of 4/pi^2",
        increments_ok,
        detail,
    ));

    let mut prev = 0.0;
    let mut growth_ok = true;
    let mut bound_ok = true;
    for l in [17usize, 33, 65, 129] {
        let s = clean_entropy_1d(p, l)?.value;
        let b = clean_log_lower_bound(p, l)?;
        if s <= prev {
            growth_ok = false;
        }
        if s < b - 1e-6 {
            bound_ok = false;
        }
        prev = s;
    }
    checks.push(Check::new(
        "sine-kernel entropy strictly increasing over L in {17,33,65,129}",
        growth_ok,
        format!("S(129) = {prev:.4}"),
    ));
    checks.push(Check::new(
        "sine-kernel entropy dominates the boundary sum",
        bound_ok,
        "S(L) >= bound(L) - 1e-6".into(),
    ));

    let mut spectra_ok = true;
    for l in [65usize, 257, 513] {
        let k = SineKernel::new(p)?.matrix(l)?;
        let (vals, _) = eigh_symmetric(&k)?;
        if vals[0] < -1e-9 || vals[l - 1] > 1.0 + 1e-9 {
            spectra_ok = false;
        }
    }
    checks.push(Check::new(
        "sine-kernel spectra inside [-1e-9, 1+1e-9] up to L=513",
        spectra_ok,
        "L in {65, 257, 513}".into(),
    ));

    Ok(checks)
}

/// Render a table and return true iff everything passed.
pub fn report(checks: &[Check]) -> bool {
    let mut all = true;
    for c in checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        println!("[{status}] {} — {}", c.name, c.detail);
        all &= c.passed;
    }
    all
}
