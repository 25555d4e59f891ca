//! Configuration-driven command-line entry point.
//!
//! Every experiment run leaves three artifacts in the output directory:
//!   * `results.jsonl` — one record per (block size, realization), sorted by
//!     (L, realization); byte-identical across reruns and worker counts;
//!   * `timings.jsonl` — wall-clock sidecar (deliberately outside the
//!     deterministic results file);
//!   * `summary.csv` — per-experiment aggregate table (fixed column order,
//!     UTF-8, LF, '.' decimal separator);
//!
//! plus `manifest.json` tying them to the canonical config hash.
//!
//! Exit codes: 0 success, 1 verification failure, 2 config/validation
//! error, 3 numeric-health error.

use crate::ensemble::{
    decay, fracmom, halfspace, proximity, split, sweep, variance, Experiment, ExperimentConfig,
    ExperimentOutput, Summary,
};
use crate::error::{Error, Result};
use crate::hamiltonian::sample_potential;
use crate::lattice::LatticeSpec;
use crate::spectral::diagonalize;
use crate::verify::{self, Fault};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "entlab",
    version,
    about = "Entanglement entropy of disordered free lattice fermions: \
             ensemble experiments and verification suites"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Disorder-averaged block entropy over a ladder of block sizes
    Sweep(RunArgs),
    /// Kernel decay profile E|P(x0, x0+r)| with an exponential fit
    Decay(RunArgs),
    /// Restriction proximity |P - P_restricted| binned by boundary distance
    Proximity(RunArgs),
    /// Variance scaling of the surface-normalized entropy
    Variance(RunArgs),
    /// d=1 splitting of S into two single-cut entropies
    Split(RunArgs),
    /// Halfspace surface density: block means vs the depth-summed h-diagonal
    Halfspace(RunArgs),
    /// Fractional moments of the resolvent along a lattice ray
    Fracmom(RunArgs),
    /// Many-body oracle equivalence suite, emitting a JSON report
    OracleCheck {
        /// Directory for oracle_report.json (stdout only when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named property suite and print a pass/fail table
    Verify {
        #[arg(value_enum)]
        suite: SuiteName,
        /// Deliberately corrupt a code path to prove the suite catches it
        #[arg(long, hide = true)]
        inject_fault: Option<FaultName>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteName {
    Properties,
    Oracle,
    Clean,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultName {
    H0SqrtGuard,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (strict JSON schema)
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing)
    #[arg(long)]
    out: PathBuf,
    /// Override master_seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override realizations
    #[arg(long)]
    realizations: Option<u64>,
    /// Worker threads (0 = one per core); results are identical for any value
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Dump realization 0's potential per box as CSV
    #[arg(long)]
    dump_potential: bool,
    /// Dump realization 0's spectrum per box as CSV
    #[arg(long)]
    dump_spectrum: bool,
}

/// Entry point; returns the process exit code.
pub fn main() -> i32 {
    // keep the LAPACK backend single-threaded: realization-level parallelism
    // owns the cores, and results must not depend on BLAS thread count
    if std::env::var_os("OPENBLAS_NUM_THREADS").is_none() {
        std::env::set_var("OPENBLAS_NUM_THREADS", "1");
    }
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Sweep(a) => run_experiment(Experiment::Sweep, a),
        Command::Decay(a) => run_experiment(Experiment::Decay, a),
        Command::Proximity(a) => run_experiment(Experiment::Proximity, a),
        Command::Variance(a) => run_experiment(Experiment::Variance, a),
        Command::Split(a) => run_experiment(Experiment::Split, a),
        Command::Halfspace(a) => run_experiment(Experiment::Halfspace, a),
        Command::Fracmom(a) => run_experiment(Experiment::Fracmom, a),
        Command::OracleCheck { out } => cmd_oracle_check(out),
        Command::Verify {
            suite,
            inject_fault,
        } => cmd_verify(suite, inject_fault),
    }
}

fn cmd_verify(suite: SuiteName, inject: Option<FaultName>) -> Result<i32> {
    let fault = inject.map(|FaultName::H0SqrtGuard| Fault::H0SqrtGuard);
    let checks = match suite {
        SuiteName::Properties => verify::properties_suite(fault)?,
        SuiteName::Oracle => verify::oracle_suite()?,
        SuiteName::Clean => verify::clean_suite()?,
    };
    Ok(if verify::report(&checks) { 0 } else { 1 })
}

fn cmd_oracle_check(out: Option<PathBuf>) -> Result<i32> {
    let checks = verify::oracle_suite()?;
    let all_passed = checks.iter().all(|c| c.passed);
    let report = serde_json::json!({
        "suite": "oracle",
        "all_passed": all_passed,
        "checks": checks.iter().map(|c| serde_json::json!({
            "name": c.name,
            "passed": c.passed,
            "detail": c.detail,
        })).collect::<Vec<_>>(),
    });
    let rendered = serde_json::to_string_pretty(&report).expect("report serializes");
    if let Some(dir) = out {
        std::fs::create_dir_all(&dir)?;
        std::fs::write(dir.join("oracle_report.json"), &rendered)?;
    }
    println!("{rendered}");
    Ok(if all_passed { 0 } else { 1 })
}

fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Canonical serialization (sorted keys) and its SHA-256, the run identity.
pub fn config_hash(cfg: &ExperimentConfig) -> (String, String) {
    let value = serde_json::to_value(cfg).expect("config serializes");
    let canonical = serde_json::to_string(&value).expect("value serializes");
    let digest = Sha256::digest(canonical.as_bytes());
    let mut hex = String::with_capacity(64);
    for b in digest {
        hex.push_str(&format!("{b:02x}"));
    }
    (canonical, hex)
}

fn unix_ms() -> u128 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

fn run_experiment(experiment: Experiment, args: RunArgs) -> Result<i32> {
    let mut cfg = load_config(&args.config)?;
    let mut overrides = serde_json::Map::new();
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
        overrides.insert("seed".into(), seed.into());
    }
    if let Some(r) = args.realizations {
        cfg.realizations = r;
        overrides.insert("realizations".into(), r.into());
    }
    cfg.validate(experiment)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;

    let started = unix_ms();
    let output = pool.install(|| match experiment {
        Experiment::Sweep => sweep::run_entropy_sweep(&cfg),
        Experiment::Decay => decay::kernel_decay_profile(&cfg),
        Experiment::Proximity => proximity::restriction_proximity(&cfg),
        Experiment::Variance => variance::variance_scaling(&cfg),
        Experiment::Split => split::split_check_1d(&cfg),
        Experiment::Halfspace => halfspace::halfspace_surface_density(&cfg),
        Experiment::Fracmom => fracmom::fractional_moment_profile(&cfg),
    })?;
    let finished = unix_ms();

    std::fs::create_dir_all(&args.out)?;
    write_results(&args.out, &output)?;
    write_timings(&args.out, &output)?;
    write_summary(&args.out, &output)?;
    if args.dump_potential || args.dump_spectrum {
        write_dumps(
            &args.out,
            experiment,
            &cfg,
            args.dump_potential,
            args.dump_spectrum,
        )?;
    }

    let (canonical, hash) = config_hash(&cfg);
    let manifest = serde_json::json!({
        "tool": "entlab",
        "version": env!("CARGO_PKG_VERSION"),
        "experiment": experiment.name(),
        "config": serde_json::from_str::<serde_json::Value>(&canonical).expect("round trip"),
        "config_hash": format!("sha256:{hash}"),
        "master_seed": cfg.master_seed,
        "realizations": cfg.realizations,
        "threads": args.threads,
        "overrides": overrides,
        "started_unix_ms": started as u64,
        "finished_unix_ms": finished as u64,
        "outputs": {
            "results": "results.jsonl",
            "timings": "timings.jsonl",
            "summary": "summary.csv",
        },
        "summary": serde_json::to_value(&output.summary).expect("summary serializes"),
    });
    std::fs::write(
        args.out.join("manifest.json"),
        serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
    )?;
    Ok(0)
}

fn write_results(dir: &Path, output: &ExperimentOutput) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(dir.join("results.jsonl"))?);
    for rec in &output.records {
        serde_json::to_writer(&mut f, rec).map_err(|e| Error::Io(e.into()))?;
        f.write_all(b"\n")?;
    }
    f.flush()?;
    Ok(())
}

fn write_timings(dir: &Path, output: &ExperimentOutput) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(dir.join("timings.jsonl"))?);
    for rec in &output.timings {
        serde_json::to_writer(&mut f, rec).map_err(|e| Error::Io(e.into()))?;
        f.write_all(b"\n")?;
    }
    f.flush()?;
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn write_summary(dir: &Path, output: &ExperimentOutput) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(dir.join("summary.csv"))?);
    match &output.summary {
        Summary::Sweep(s) => {
            writeln!(
                f,
                "L,count,mean,var,stderr,normalized_mean,normalized_var,normalized_stderr,pad_check_mean_doubled,pad_check_converged"
            )?;
            for row in &s.stats {
                let check = s
                    .padding_checks
                    .as_ref()
                    .and_then(|cs| cs.iter().find(|c| c.l == row.l));
                writeln!(
                    f,
                    "{},{},{},{},{},{},{},{},{},{}",
                    row.l,
                    row.count,
                    row.mean,
                    row.variance,
                    row.stderr,
                    row.normalized_mean,
                    row.normalized_variance,
                    row.normalized_stderr,
                    fmt_opt(check.map(|c| c.mean_doubled_pad)),
                    check.map(|c| c.converged.to_string()).unwrap_or_default(),
                )?;
            }
        }
        Summary::Profile(p) => {
            writeln!(
                f,
                "x,mean,stderr,count,fit_gamma,fit_prefactor,fit_r2,fit_window_lo,fit_window_hi"
            )?;
            for i in 0..p.profile.x.len() {
                writeln!(
                    f,
                    "{},{},{},{},{},{},{},{},{}",
                    p.profile.x[i],
                    p.profile.mean[i],
                    p.profile.stderr[i],
                    p.profile.count,
                    p.fit.rate,
                    p.fit.prefactor,
                    p.fit.r_squared,
                    p.fit.window.0,
                    p.fit.window.1,
                )?;
            }
        }
        Summary::Variance(v) => {
            writeln!(
                f,
                "L,count,mean,var,stderr,normalized_mean,normalized_var,normalized_var_stderr,fit_status,fit_beta,fit_stderr,fit_ci_lo,fit_ci_hi,fit_r2,bound_exponent"
            )?;
            for row in &v.rows {
                writeln!(
                    f,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    row.l,
                    row.count,
                    row.mean,
                    row.variance,
                    row.stderr,
                    row.normalized_mean,
                    row.normalized_variance,
                    row.normalized_variance_stderr,
                    v.fit_status,
                    fmt_opt(v.fit.as_ref().map(|ft| ft.rate)),
                    fmt_opt(v.fit.as_ref().map(|ft| ft.rate_stderr)),
                    fmt_opt(v.fit.as_ref().map(|ft| ft.ci95.0)),
                    fmt_opt(v.fit.as_ref().map(|ft| ft.ci95.1)),
                    fmt_opt(v.fit.as_ref().map(|ft| ft.r_squared)),
                    v.bound_exponent,
                )?;
            }
        }
        Summary::Split(s) => {
            writeln!(
                f,
                "M,N,count,mean_disc,stderr_disc,mean_S,mean_S_plus,mean_S_minus"
            )?;
            for row in &s.rows {
                writeln!(
                    f,
                    "{},{},{},{},{},{},{},{}",
                    row.m,
                    row.box_half_width,
                    row.count,
                    row.mean_disc,
                    row.stderr_disc,
                    row.mean_s,
                    row.mean_s_plus,
                    row.mean_s_minus,
                )?;
            }
        }
        Summary::Halfspace(h) => {
            writeln!(
                f,
                "L,count,mean,var,stderr,normalized_mean,normalized_var,normalized_stderr,rhs,rhs_stderr,combined_stderr,consistent,j_max"
            )?;
            let last_l = h.stats.last().map(|s| s.l);
            for row in &h.stats {
                let is_top = Some(row.l) == last_l;
                let opt = |s: String| if is_top { s } else { String::new() };
                writeln!(
                    f,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    row.l,
                    row.count,
                    row.mean,
                    row.variance,
                    row.stderr,
                    row.normalized_mean,
                    row.normalized_variance,
                    row.normalized_stderr,
                    opt(h.rhs.to_string()),
                    opt(h.rhs_stderr.to_string()),
                    opt(h.combined_stderr.to_string()),
                    opt(h.consistent.to_string()),
                    opt(h.j_max.to_string()),
                )?;
            }
            // depth profile sidecar
            let mut g =
                std::io::BufWriter::new(std::fs::File::create(dir.join("depth_profile.csv"))?);
            writeln!(g, "j,mean,stderr,count")?;
            for i in 0..h.depth_profile.x.len() {
                writeln!(
                    g,
                    "{},{},{},{}",
                    h.depth_profile.x[i],
                    h.depth_profile.mean[i],
                    h.depth_profile.stderr[i],
                    h.depth_profile.count,
                )?;
            }
            g.flush()?;
        }
    }
    f.flush()?;
    Ok(())
}

/// Box specs an experiment touches, for the optional CSV dumps.
fn experiment_boxes(experiment: Experiment, cfg: &ExperimentConfig) -> Result<Vec<LatticeSpec>> {
    let mut out = Vec::new();
    match experiment {
        Experiment::Sweep | Experiment::Variance => {
            for &m in &cfg.block_half_widths {
                out.push(LatticeSpec::new(cfg.dimension, m + cfg.padding)?);
            }
        }
        Experiment::Split => {
            for &m in &cfg.block_half_widths {
                out.push(LatticeSpec::new(1, cfg.split_box_factor * m)?);
            }
        }
        Experiment::Decay | Experiment::Proximity | Experiment::Halfspace | Experiment::Fracmom => {
            out.push(LatticeSpec::new(
                cfg.dimension,
                cfg.max_block_half_width() + cfg.padding,
            )?);
        }
    }
    Ok(out)
}

fn write_dumps(
    dir: &Path,
    experiment: Experiment,
    cfg: &ExperimentConfig,
    potential: bool,
    spectrum: bool,
) -> Result<()> {
    for spec in experiment_boxes(experiment, cfg)? {
        let l = spec.side();
        let pot = sample_potential(&cfg.model, spec, cfg.master_seed, 0)?;
        if potential {
            let mut f = std::io::BufWriter::new(std::fs::File::create(
                dir.join(format!("potential_L{l}.csv")),
            )?);
            writeln!(f, "flat_index,V")?;
            for (i, v) in pot.values.iter().enumerate() {
                writeln!(f, "{i},{v}")?;
            }
            f.flush()?;
        }
        if spectrum {
            let h = crate::hamiltonian::assemble(spec, &pot)?;
            let eig = diagonalize(&h)?;
            let mut f = std::io::BufWriter::new(std::fs::File::create(
                dir.join(format!("spectrum_L{l}.csv")),
            )?);
            writeln!(f, "index,eigenvalue")?;
            for (i, v) in eig.eigenvalues.iter().enumerate() {
                writeln!(f, "{i},{v}")?;
            }
            f.flush()?;
        }
    }
    Ok(())
}
