//! Independent ground truths.
//!
//! Two oracles live here, both deliberately decoupled from the projection /
//! entropy pipeline they validate:
//!   * the translation-invariant d=1 sine-kernel projection
//!     P(x,y) = sin(p(x-y))/(π(x-y)), whose block entropy grows like
//!     (1/π²)·4·ln L — the logarithmic violation of the area law that
//!     disorder suppresses;
//!   * a brute-force Fock-space computation of the many-body block entropy
//!     for tiny chains, verifying the one-body reduction S_Λ = Tr h(P_Λ)
//!     against a 2ⁿ-dimensional partial trace.

use crate::entropy::{entropy_of_block, EntropyResult, SpectralFunction};
use crate::error::{Error, Result};
use crate::spectral::eigh_symmetric;
use ndarray::prelude::*;
use ndarray_linalg::Determinant;
use std::f64::consts::PI;

/// Fermi momentum p ∈ (0, π); diagonal value p/π is the filling.
#[derive(Debug, Clone, Copy)]
pub struct SineKernel {
    pub fermi_momentum: f64,
}

impl SineKernel {
    pub fn new(fermi_momentum: f64) -> Result<Self> {
        if !(fermi_momentum > 0.0 && fermi_momentum < PI) {
            return Err(Error::Parameter(format!(
                "Fermi momentum must lie in (0, π), got {fermi_momentum}"
            )));
        }
        Ok(SineKernel { fermi_momentum })
    }

    pub fn entry(&self, x: i64, y: i64) -> f64 {
        let p = self.fermi_momentum;
        if x == y {
            p / PI
        } else {
            let u = (x - y) as f64;
            (p * u).sin() / (PI * u)
        }
    }

    /// The L×L kernel matrix on an interval block of length L.
    pub fn matrix(&self, l: usize) -> Result<Array2<f64>> {
        if l == 0 {
            return Err(Error::Parameter("block length must be positive".into()));
        }
        let mut k = Array2::<f64>::zeros((l, l));
        for x in 0..l {
            for y in 0..l {
                k[[x, y]] = self.entry(x as i64, y as i64);
            }
        }
        Ok(k)
    }
}

/// Default truncation window for the boundary double sum.
fn default_window(l: usize) -> usize {
    (8 * l).max(200_000)
}

/// Tail Σ_{u>w} sin²(pu)/(π²u²), returned with a rigorous error bound.
///
/// Splits sin² = 1/2 - cos(2pu)/2: the 1/u² piece is an Euler–Maclaurin
/// expansion of the trigamma tail (error O(w⁻⁷)); the oscillatory piece is
/// bounded by Abel summation, |Σ_{u>w} cos(2pu)/u²| ≤ 1/(|sin p|·(w+1)²).
fn kernel_tail(p: f64, w: usize) -> (f64, f64) {
    let wf = w as f64;
    let psi_tail = 1.0 / wf - 1.0 / (2.0 * wf * wf) + 1.0 / (6.0 * wf.powi(3))
        - 1.0 / (30.0 * wf.powi(5));
    let psi_err = 1.0 / (42.0 * wf.powi(7));
    let sin_p = p.sin().abs().max(f64::MIN_POSITIVE);
    let cos_bound = 1.0 / (sin_p * (wf + 1.0) * (wf + 1.0));
    let scale = 1.0 / (2.0 * PI * PI);
    (scale * psi_tail, scale * (cos_bound + psi_err))
}

/// The clean-case boundary sum 4·Σ_{x∈Λ, y∉Λ} |P(x,y)|² for an interval
/// block of length L, by direct summation over a window plus an analytic
/// remainder. Grows like (4/π²)·ln L; successive doublings gain
/// (4/π²)·ln 2 ≈ 0.28101.
///
/// Writing the block as {0..L-1}, the double sum telescopes into
/// 2·Σ_{m=1}^{L} g(m) with g(m) = Σ_{u≥m} sin²(pu)/(π²u²), so one suffix
/// scan over the window covers all of Λ at once.
pub fn clean_log_lower_bound(p: f64, l: usize) -> Result<f64> {
    clean_log_lower_bound_with_window(p, l, default_window(l))
}

pub fn clean_log_lower_bound_with_window(p: f64, l: usize, window: usize) -> Result<f64> {
    SineKernel::new(p)?;
    if l == 0 {
        return Err(Error::Parameter("block length must be positive".into()));
    }
    if window < 8 * l {
        return Err(Error::Truncation(format!(
            "window {window} below the required 8·L = {}",
            8 * l
        )));
    }
    let (tail, tail_err) = kernel_tail(p, window);
    // certified absolute error on the final 4×(double sum)
    let total_err = 8.0 * l as f64 * tail_err;
    if total_err > 1e-6 {
        return Err(Error::Truncation(format!(
            "tail estimate {total_err:.3e} exceeds 1e-6; enlarge the window"
        )));
    }
    // suffix sums g(m) for m = 1..=L over the window, then the tail
    let mut g = vec![0.0f64; l + 1];
    let mut acc = tail;
    let mut m = window;
    loop {
        let u = m as f64;
        let s = (p * u).sin();
        acc += s * s / (PI * PI * u * u);
        if m <= l {
            g[m - 1] = acc; // g(m) with 1-based m stored at m-1
        }
        if m == 1 {
            break;
        }
        m -= 1;
    }
    // g stored shifted: g[m-1] = Σ_{u≥m}; sum over m = 1..=L
    let double_sum: f64 = 2.0 * g.iter().take(l).sum::<f64>();
    Ok(4.0 * double_sum)
}

/// Block entropy of the clean d=1 Fermi sea: Tr h over the sine-kernel
/// eigenvalues. S(L) exceeds the boundary sum and keeps growing with L —
/// no plateau, unlike the localized case.
pub fn clean_entropy_1d(p: f64, l: usize) -> Result<EntropyResult> {
    let kernel = SineKernel::new(p)?.matrix(l)?;
    entropy_of_block(&kernel, SpectralFunction::BinaryEntropy)
}

/// Brute-force many-body oracle input: a one-body chain Hamiltonian of order
/// n ≤ 12 and a contiguous prefix block {0..block_len-1}. Prefix blocks keep
/// the Jordan-Wigner strings inside the traced-out factor, so the
/// occupation-basis partial trace equals the algebraic reduced state with no
/// sign bookkeeping; non-contiguous blocks are not representable here.
#[derive(Debug, Clone)]
pub struct FockOracleInput {
    pub one_body: Array2<f64>,
    pub block_len: usize,
}

pub const FOCK_SITE_CAP: usize = 12;

/// Many-body block entropy of the Slater-determinant ground state filling
/// all one-body modes with eigenvalue ≤ μ: builds the 2ⁿ occupation-basis
/// state, reduces onto the prefix block by partial trace, and returns
/// -Tr ρ_Λ log₂ ρ_Λ.
pub fn manybody_entropy(input: &FockOracleInput, mu: f64) -> Result<f64> {
    let n = input.one_body.nrows();
    if n == 0 || n != input.one_body.ncols() {
        return Err(Error::Parameter("one-body matrix must be square".into()));
    }
    if n > FOCK_SITE_CAP {
        return Err(Error::Parameter(format!(
            "chain length {n} exceeds the 2^n oracle cap {FOCK_SITE_CAP}"
        )));
    }
    let m = input.block_len;
    if m == 0 || m > n {
        return Err(Error::Parameter(format!(
            "block length {m} outside 1..={n}"
        )));
    }
    let (vals, vecs) = eigh_symmetric(&input.one_body)?;
    let scale = (vals[n - 1] - vals[0]).max(1.0);
    if vals.iter().any(|&l| (l - mu).abs() <= 1e-10 * scale) {
        return Err(Error::DegenerateFermiLevel {
            eigenvalue: vals.iter().fold(f64::INFINITY, |b, &l| {
                if (l - mu).abs() < (b - mu).abs() { l } else { b }
            }),
            index: 0,
            tol: 1e-10 * scale,
        });
    }
    let k = vals.iter().take_while(|&&l| l <= mu).count();
    let filled = vecs.slice(s![.., ..k]);

    // amplitudes ψ(b) = det Φ[occupied sites of b, filled modes]
    let dim_block = 1usize << m;
    let mut rho = Array2::<f64>::zeros((dim_block, dim_block));
    let mut groups: std::collections::BTreeMap<usize, Vec<(usize, f64)>> =
        std::collections::BTreeMap::new();
    let mut norm = 0.0f64;
    for b in 0usize..(1 << n) {
        if (b.count_ones() as usize) != k {
            continue;
        }
        let amp = if k == 0 {
            1.0
        } else {
            let rows: Vec<usize> = (0..n).filter(|&i| b & (1 << i) != 0).collect();
            let sub = filled.select(Axis(0), &rows);
            let sub = sub.as_standard_layout();
            sub.det().map_err(|e| Error::Linalg(e.to_string()))?
        };
        norm += amp * amp;
        let a = b & (dim_block - 1);
        let e = b >> m;
        groups.entry(e).or_default().push((a, amp));
    }
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::Numeric(format!(
            "Slater state norm {norm} drifted from 1"
        )));
    }
    for members in groups.values() {
        for &(a1, amp1) in members {
            for &(a2, amp2) in members {
                rho[[a1, a2]] += amp1 * amp2;
            }
        }
    }
    let (probs, _) = eigh_symmetric(&rho)?;
    let mut s = 0.0;
    for &p in probs.iter() {
        if p < -1e-10 {
            return Err(Error::Numeric(format!(
                "reduced density matrix eigenvalue {p} below zero"
            )));
        }
        if p > 1e-300 {
            s -= p * p.log2();
        }
    }
    Ok(s)
}
