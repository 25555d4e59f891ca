//! Acceptance suite: one test per headline criterion, each printing a
//! PASS/FAIL line with its measured numbers. Exact identities run at machine
//! precision; ensemble claims run at their stated statistical gates with
//! pinned parameters (g=5/d=1, g=8/d=2, half filling, R=200).
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use entlab::ensemble::{
    decay, fracmom, halfspace, proximity, split, sweep, variance, ExperimentConfig, Summary,
};
use entlab::hamiltonian::PotentialModel;
use entlab::verify;
use std::time::Instant;

fn check(criterion: &str, passed: bool, detail: &str) {
    let status = if passed { "PASS" } else { "FAIL" };
    println!("[{status}] {criterion} — {detail}");
    assert!(passed, "{criterion}: {detail}");
}

fn base_config() -> ExperimentConfig {
    ExperimentConfig {
        model: PotentialModel::IidUniform { amplitude: 5.0 },
        dimension: 1,
        block_half_widths: vec![32, 64],
        padding: 16,
        chemical_potential: None,
        filling_fraction: Some(0.5),
        realizations: 200,
        master_seed: 0xE1457,
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
fn criterion_01_exact_identities() {
    let t0 = Instant::now();
    let checks = verify::properties_suite(None).unwrap();
    let all = checks.iter().all(|c| c.passed);
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name)
        .collect();
    check(
        "criterion 1: exact identities (route equality, complement symmetry, \
         idempotency, Pi and h0 lemma suites)",
        all,
        &format!(
            "{} checks in {:.2}s{}",
            checks.len(),
            t0.elapsed().as_secs_f64(),
            if failed.is_empty() {
                String::new()
            } else {
                format!("; failed: {failed:?}")
            }
        ),
    );
}

#[test]
fn criterion_02_manybody_oracle_equivalence() {
    let t0 = Instant::now();
    let checks = verify::oracle_suite().unwrap();
    let elapsed = t0.elapsed().as_secs_f64();
    check(
        "criterion 2: many-body Fock oracle equals Tr h(P_L) to 1e-9 on 50 chains",
        checks.iter().all(|c| c.passed) && elapsed < 30.0,
        &format!("{} in {elapsed:.2}s (budget 30s)", checks[0].detail),
    );
}

#[test]
fn criterion_03_clean_case_logarithm() {
    let t0 = Instant::now();
    let checks = verify::clean_suite().unwrap();
    let elapsed = t0.elapsed().as_secs_f64();
    let all = checks.iter().all(|c| c.passed);
    check(
        "criterion 3: clean-case log growth (doubling increment ~ 4/pi^2, \
         no entropy plateau)",
        all && elapsed < 60.0,
        &format!("{} checks in {elapsed:.2}s (budget 60s)", checks.len()),
    );
}

#[test]
fn criterion_04_d1_area_law_in_the_mean() {
    let t0 = Instant::now();
    let mut cfg = base_config();
    cfg.padding_check = true; // the gate rides along on headline sweeps
    let out = sweep::run_entropy_sweep(&cfg).unwrap();
    let Summary::Sweep(s) = &out.summary else {
        panic!("wrong summary kind")
    };
    let s65 = s.stats.iter().find(|r| r.l == 65).unwrap();
    let s129 = s.stats.iter().find(|r| r.l == 129).unwrap();
    let combined = (s65.stderr.powi(2) + s129.stderr.powi(2)).sqrt();
    let plateau = (s65.mean - s129.mean).abs() <= 3.0 * combined;

    let decay_out = decay::kernel_decay_profile(&cfg).unwrap();
    let Summary::Profile(p) = &decay_out.summary else {
        panic!("wrong summary kind")
    };
    let fit = &p.fit;
    let localized = fit.rate > 0.0 && fit.r_squared > 0.9;

    check(
        "criterion 4: d=1 area law in the mean (S plateau at g=5) with \
         certified kernel decay",
        plateau && localized,
        &format!(
            "S(65)={:.4}±{:.4}, S(129)={:.4}±{:.4}, |diff|={:.4} vs 3σ={:.4}; \
             γ̂={:.3}, R²={:.3}; {:.0}s",
            s65.mean,
            s65.stderr,
            s129.mean,
            s129.stderr,
            (s65.mean - s129.mean).abs(),
            3.0 * combined,
            fit.rate,
            fit.r_squared,
            t0.elapsed().as_secs_f64()
        ),
    );
}

#[test]
fn criterion_05_d1_edge_splitting() {
    let t0 = Instant::now();
    let mut cfg = base_config();
    cfg.block_half_widths = vec![8, 32];
    let out = split::split_check_1d(&cfg).unwrap();
    let Summary::Split(s) = &out.summary else {
        panic!("wrong summary kind")
    };
    let small = &s.rows[0];
    let large = &s.rows[1];
    // one-sided rank test at 95%: discrepancies at M=32 sit below those at
    // M=8 (rank-based because rare resonances make the M=8 mean
    // outlier-dominated, which caps any z-test on means near 1)
    let disc_of = |l: i64| -> Vec<f64> {
        out.records
            .iter()
            .filter(|r| r.l == l)
            .map(|r| r.split_disc.unwrap())
            .collect()
    };
    let z = entlab::stats::mann_whitney_smaller_z(&disc_of(17), &disc_of(65));
    let mean_shrinks = large.mean_disc < small.mean_disc;
    check(
        "criterion 5: d=1 splitting discrepancy shrinks from M=8 to M=32 \
         (one-sided 95%)",
        z > 1.645 && mean_shrinks,
        &format!(
            "disc(M=8)={:.3e}±{:.1e}, disc(M=32)={:.3e}±{:.1e}, rank z={z:.1}; {:.0}s",
            small.mean_disc,
            small.stderr_disc,
            large.mean_disc,
            large.stderr_disc,
            t0.elapsed().as_secs_f64()
        ),
    );
}

#[test]
fn criterion_06_d2_selfaveraging() {
    let t0 = Instant::now();
    let mut cfg = base_config();
    cfg.model = PotentialModel::IidUniform { amplitude: 8.0 };
    cfg.dimension = 2;
    cfg.block_half_widths = vec![4, 6, 8, 10]; // L in {9, 13, 17, 21}
    cfg.padding = 6;
    cfg.master_seed = 777;
    let out = variance::variance_scaling(&cfg).unwrap();
    let Summary::Variance(v) = &out.summary else {
        panic!("wrong summary kind")
    };
    let vars: Vec<f64> = v.rows.iter().map(|r| r.normalized_variance).collect();
    let decreasing = vars.windows(2).all(|w| w[1] < w[0]);
    let fit = v.fit.as_ref().expect("power fit at d=2");
    let slope_negative = fit.rate < 0.0 && fit.ci95.1 < 0.0;
    check(
        "criterion 6: d=2 selfaveraging — Var{S/L} strictly decreasing with \
         negative fitted slope (95% CI excludes 0)",
        decreasing && slope_negative,
        &format!(
            "Var/L: {:?}, β̂={:.3} CI ({:.3}, {:.3}), bound exponent {:.3}; {:.0}s",
            vars.iter().map(|x| (x * 1e4).round() / 1e4).collect::<Vec<_>>(),
            fit.rate,
            fit.ci95.0,
            fit.ci95.1,
            v.bound_exponent,
            t0.elapsed().as_secs_f64()
        ),
    );
}

#[test]
fn criterion_07_d1_non_selfaveraging() {
    let t0 = Instant::now();
    let mut cfg = base_config();
    cfg.block_half_widths = vec![16, 32, 64]; // L in {33, 65, 129}
    let out = variance::variance_scaling(&cfg).unwrap();
    let Summary::Variance(v) = &out.summary else {
        panic!("wrong summary kind")
    };
    let v65 = v.rows.iter().find(|r| r.l == 65).unwrap().variance;
    let v129 = v.rows.iter().find(|r| r.l == 129).unwrap().variance;
    check(
        "criterion 7: d=1 non-selfaveraging — Var{S}(129) >= 0.5·Var{S}(65)",
        v129 >= 0.5 * v65,
        &format!(
            "Var(65)={v65:.4}, Var(129)={v129:.4}, ratio {:.2}; {:.0}s",
            v129 / v65,
            t0.elapsed().as_secs_f64()
        ),
    );
}

#[test]
fn criterion_08_halfspace_surface_density() {
    let t0 = Instant::now();
    let mut cfg = base_config();
    cfg.block_half_widths = vec![16, 32]; // comparison lands on L=65
    let out = halfspace::halfspace_surface_density(&cfg).unwrap();
    let Summary::Halfspace(h) = &out.summary else {
        panic!("wrong summary kind")
    };
    let summand_decreasing = h.depth_profile.mean[6] < h.depth_profile.mean[1];
    check(
        "criterion 8: halfspace surface density — block mean matches \
         2d·Σ_j h-diagonal within 3σ at L=65, depth summand decreasing",
        h.consistent && summand_decreasing,
        &format!(
            "lhs={:.4}±{:.4}, rhs={:.4}±{:.4} (j_max={}), |diff|={:.4} vs 3σ={:.4}; {:.0}s",
            h.lhs,
            h.lhs_stderr,
            h.rhs,
            h.rhs_stderr,
            h.j_max,
            (h.lhs - h.rhs).abs(),
            3.0 * h.combined_stderr,
            t0.elapsed().as_secs_f64()
        ),
    );
}

#[test]
fn criterion_09_restriction_proximity_and_fractional_moments() {
    let t0 = Instant::now();
    let mut cfg = base_config();
    cfg.block_half_widths = vec![16];
    let prox = proximity::restriction_proximity(&cfg).unwrap();
    let Summary::Profile(p) = &prox.summary else {
        panic!("wrong summary kind")
    };
    let prox_fit = &p.fit;
    // regression baseline: |P - P_restricted| at the box center stays tiny
    // at pad 16
    let center_mean = prox
        .records
        .iter()
        .map(|r| r.center_diff.unwrap())
        .sum::<f64>()
        / prox.records.len() as f64;
    assert!(center_mean <= 1e-3, "center diff {center_mean:.3e}");

    let mut fcfg = base_config();
    fcfg.block_half_widths = vec![64];
    let frac = fracmom::fractional_moment_profile(&fcfg).unwrap();
    let Summary::Profile(q) = &frac.summary else {
        panic!("wrong summary kind")
    };
    let frac_fit = &q.fit;
    // the resolvent bound |G|^s <= ε^{-s} is hard-asserted inside the run;
    // re-check the persisted samples here
    let bound = (1.0f64 / fcfg.frac_epsilon).powf(fcfg.frac_s);
    let bound_ok = frac
        .records
        .iter()
        .all(|r| r.profile.as_ref().unwrap().iter().all(|&v| v <= bound));

    check(
        "criterion 9: restriction proximity and fractional moments decay \
         exponentially (R² > 0.85), resolvent bound holds sample-by-sample",
        prox_fit.rate > 0.0
            && prox_fit.r_squared > 0.85
            && frac_fit.rate > 0.0
            && frac_fit.r_squared > 0.85
            && bound_ok,
        &format!(
            "proximity γ̂={:.3} R²={:.3}; fracmom γ̂={:.3} R²={:.3}; bound {}; {:.0}s",
            prox_fit.rate,
            prox_fit.r_squared,
            frac_fit.rate,
            frac_fit.r_squared,
            if bound_ok { "held" } else { "VIOLATED" },
            t0.elapsed().as_secs_f64()
        ),
    );
}

#[test]
fn criterion_10_determinism_across_reruns_and_threads() {
    let t0 = Instant::now();
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("config.json");
    std::fs::write(
        &cfg_path,
        r#"{
          "model": {"type": "iid_uniform", "amplitude": 5.0},
          "dimension": 1,
          "block_half_widths": [8, 16],
          "padding": 8,
          "filling_fraction": 0.5,
          "realizations": 80,
          "master_seed": 31337,
          "renyi_alphas": [0.5, 2.0],
          "padding_check": false,
          "frac_s": 0.4,
          "frac_epsilon": 0.5
        }"#,
    )
    .unwrap();
    let mut payloads = Vec::new();
    for (dir, threads, experiment) in [
        ("a", "1", "sweep"),
        ("b", "4", "sweep"),
        ("c", "2", "sweep"),
        ("fa", "1", "fracmom"),
        ("fb", "3", "fracmom"),
    ] {
        let out = tmp.path().join(dir);
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_entlab"))
            .arg(experiment)
            .arg("--config")
            .arg(&cfg_path)
            .arg("--out")
            .arg(&out)
            .args(["--threads", threads])
            .status()
            .unwrap();
        assert!(status.success());
        payloads.push(std::fs::read(out.join("results.jsonl")).unwrap());
    }
    let sweep_same = payloads[0] == payloads[1] && payloads[0] == payloads[2];
    let frac_same = payloads[3] == payloads[4];
    check(
        "criterion 10: bit-identical results.jsonl across reruns and thread counts",
        sweep_same && frac_same,
        &format!(
            "sweep 3-way byte equality: {sweep_same}; fracmom 2-way: {frac_same}; {:.0}s",
            t0.elapsed().as_secs_f64()
        ),
    );
}
