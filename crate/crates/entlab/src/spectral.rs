//! Dense symmetric eigendecomposition, Fermi/interval spectral projections,
//! and resolvent entries for fractional-moment diagnostics.
//!
//! Eigenvector sign and degenerate-subspace basis are solver-dependent;
//! everything exported from here is basis-invariant (projections, traces,
//! resolvent entries). Tests must never compare raw eigenvectors.

use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianMatrix;
use ndarray::prelude::*;
use ndarray_linalg::{Eigh, Solve, UPLO};
use num_complex::Complex64;

/// Relative degeneracy tolerance: μ (or an interval endpoint) must stay this
/// far from every eigenvalue, scaled by max(1, spectral diameter). The
/// zero-potential test fixtures do hit exact degeneracies, so the error path
/// is mandatory rather than theoretical.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Eigenvalues ascending; eigenvector k in column k.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Array1<f64>,
    pub eigenvectors: Array2<f64>,
}

/// Dense symmetric eigensolve (LAPACK `dsyev` family).
pub fn diagonalize(h: &HamiltonianMatrix) -> Result<EigenDecomposition> {
    if h.matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite entry in Hamiltonian".into()));
    }
    let (eigenvalues, eigenvectors) = h.matrix.eigh(UPLO::Lower)?;
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Symmetric eigensolve of an arbitrary dense matrix (blocks, Π operators).
pub fn eigh_symmetric(m: &Array2<f64>) -> Result<(Array1<f64>, Array2<f64>)> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite entry in symmetric matrix".into()));
    }
    // slices of length-1 axes can carry zero strides, which LAPACK rejects
    // and as_standard_layout() does not normalize; copy unconditionally
    let a = Array2::from_shape_fn(m.raw_dim(), |(i, j)| m[[i, j]]);
    Ok(a.eigh(UPLO::Lower)?)
}

/// Spectral projection P = Σ_{λ_k ∈ S} ψ_k ψ_kᵀ materialized as a dense
/// matrix, with its Fermi level and diagnostics.
#[derive(Debug, Clone)]
pub struct FermiProjection {
    pub matrix: Array2<f64>,
    pub mu: f64,
    pub rank: usize,
    /// Distance from μ to the nearest eigenvalue.
    pub degeneracy_gap: f64,
}

impl EigenDecomposition {
    pub fn order(&self) -> usize {
        self.eigenvalues.len()
    }

    /// max(1, λ_max - λ_min), the scale for degeneracy tolerances.
    pub fn spectral_scale(&self) -> f64 {
        let n = self.order();
        if n == 0 {
            return 1.0;
        }
        (self.eigenvalues[n - 1] - self.eigenvalues[0]).max(1.0)
    }

    fn degeneracy_tol(&self) -> f64 {
        DEGENERACY_TOL * self.spectral_scale()
    }

    /// Number of eigenvalues ≤ μ.
    pub fn filled_count(&self, mu: f64) -> usize {
        self.eigenvalues.iter().take_while(|&&l| l <= mu).count()
    }

    /// Distance from μ to the nearest eigenvalue, with the index attaining it.
    pub fn gap_at(&self, mu: f64) -> (f64, usize) {
        let mut best = (f64::INFINITY, 0usize);
        for (i, &l) in self.eigenvalues.iter().enumerate() {
            let d = (l - mu).abs();
            if d < best.0 {
                best = (d, i);
            }
        }
        best
    }

    /// Columns of the eigenvector matrix with eigenvalue ≤ μ (ascending order
    /// makes this a contiguous prefix).
    pub fn filled_modes(&self, mu: f64) -> ArrayView2<'_, f64> {
        let k = self.filled_count(mu);
        self.eigenvectors.slice(s![.., ..k])
    }

    /// P = E_H((-∞, μ]). Errors with `DegenerateFermiLevel` when μ sits within
    /// the degeneracy tolerance of an eigenvalue, unless explicitly allowed.
    pub fn fermi_projection(&self, mu: f64, allow_degenerate: bool) -> Result<FermiProjection> {
        let (gap, idx) = self.gap_at(mu);
        if !allow_degenerate && gap <= self.degeneracy_tol() {
            return Err(Error::DegenerateFermiLevel {
                eigenvalue: self.eigenvalues[idx],
                index: idx,
                tol: self.degeneracy_tol(),
            });
        }
        let modes = self.filled_modes(mu);
        let rank = modes.ncols();
        let matrix = modes.dot(&modes.t());
        Ok(FermiProjection {
            matrix,
            mu,
            rank,
            degeneracy_gap: gap,
        })
    }

    /// Spectral projection onto a closed interval [a, b]. An interval missing
    /// the spectrum entirely yields the zero projection.
    pub fn interval_projection(
        &self,
        interval: [f64; 2],
        allow_degenerate: bool,
    ) -> Result<FermiProjection> {
        let [a, b] = interval;
        if a.is_nan() || b.is_nan() || a > b {
            return Err(Error::Parameter(format!("empty interval [{a}, {b}]")));
        }
        let tol = self.degeneracy_tol();
        if !allow_degenerate {
            for endpoint in [a, b] {
                let (gap, idx) = self.gap_at(endpoint);
                if gap <= tol {
                    return Err(Error::DegenerateFermiLevel {
                        eigenvalue: self.eigenvalues[idx],
                        index: idx,
                        tol,
                    });
                }
            }
        }
        let cols: Vec<usize> = self
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &l)| l >= a && l <= b)
            .map(|(i, _)| i)
            .collect();
        let rank = cols.len();
        let n = self.order();
        let matrix = if rank == 0 {
            Array2::zeros((n, n))
        } else {
            let modes = self.eigenvectors.select(Axis(1), &cols);
            modes.dot(&modes.t())
        };
        let gap = self.gap_at(b).0.min(self.gap_at(a).0);
        Ok(FermiProjection {
            matrix,
            mu: b,
            rank,
            degeneracy_gap: gap,
        })
    }

    /// Midpoint Fermi level filling exactly `filled` modes. Errors when the
    /// spectrum is (numerically) gapless at that filling.
    pub fn mu_from_filling(&self, filled: usize) -> Result<f64> {
        let n = self.order();
        if filled == 0 || filled >= n {
            return Err(Error::Parameter(format!(
                "filled mode count must be in 1..{n}, got {filled}"
            )));
        }
        let below = self.eigenvalues[filled - 1];
        let above = self.eigenvalues[filled];
        if above - below <= 2.0 * self.degeneracy_tol() {
            return Err(Error::GaplessFilling {
                filled,
                below,
                above,
            });
        }
        Ok(0.5 * (below + above))
    }

    /// Residuals for the decomposition contracts: (max |HΨ - ΨΛ|, max |ΨᵀΨ - I|).
    pub fn residuals(&self, h: &Array2<f64>) -> (f64, f64) {
        let hv = h.dot(&self.eigenvectors);
        let lv = &self.eigenvectors * &self.eigenvalues.view().insert_axis(Axis(0));
        let eig_res = (&hv - &lv).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let gram = self.eigenvectors.t().dot(&self.eigenvectors);
        let mut ortho_res = 0.0f64;
        for ((i, j), v) in gram.indexed_iter() {
            let target = if i == j { 1.0 } else { 0.0 };
            ortho_res = ortho_res.max((v - target).abs());
        }
        (eig_res, ortho_res)
    }
}

impl FermiProjection {
    pub fn order(&self) -> usize {
        self.matrix.nrows()
    }

    /// max |P² - P|, the idempotency defect.
    pub fn idempotency_defect(&self) -> f64 {
        let p2 = self.matrix.dot(&self.matrix);
        (&p2 - &self.matrix)
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diag().sum()
    }
}

/// Low-rank view P = F·Fᵀ over the filled modes; lets the ensemble driver
/// gather rows, entries and blocks of P without materializing the full n×n
/// matrix. Identical arithmetic to the materialized projection up to BLAS
/// accumulation order.
pub struct ProjectionFactor<'a> {
    modes: ArrayView2<'a, f64>,
}

impl<'a> ProjectionFactor<'a> {
    pub fn new(eig: &'a EigenDecomposition, mu: f64) -> Self {
        ProjectionFactor {
            modes: eig.filled_modes(mu),
        }
    }

    pub fn rank(&self) -> usize {
        self.modes.ncols()
    }

    pub fn entry(&self, x: usize, y: usize) -> f64 {
        self.modes.row(x).dot(&self.modes.row(y))
    }

    /// Row x of P as a vector over all sites.
    pub fn row(&self, x: usize) -> Array1<f64> {
        self.modes.dot(&self.modes.row(x))
    }

    /// Block P[rows, cols].
    pub fn block(&self, rows: &[usize], cols: &[usize]) -> Array2<f64> {
        let a = self.modes.select(Axis(0), rows);
        let b = self.modes.select(Axis(0), cols);
        a.dot(&b.t())
    }

    /// Principal block P[sites, sites].
    pub fn principal_block(&self, sites: &[usize]) -> Array2<f64> {
        let a = self.modes.select(Axis(0), sites);
        a.dot(&a.t())
    }
}

/// Entry (x, y) of the resolvent G(ζ) = (H - ζ)⁻¹, Im ζ ≠ 0, via a linear
/// solve against the unit vector at y. |G(ζ;x,y)| ≤ 1/|Im ζ| always.
pub fn resolvent_entry(
    h: &HamiltonianMatrix,
    zeta: Complex64,
    x: usize,
    y: usize,
) -> Result<Complex64> {
    let col = resolvent_column(h, zeta, y)?;
    Ok(col[x])
}

/// Column y of (H - ζ)⁻¹.
pub fn resolvent_column(
    h: &HamiltonianMatrix,
    zeta: Complex64,
    y: usize,
) -> Result<Array1<Complex64>> {
    if zeta.im == 0.0 {
        return Err(Error::Domain(
            "resolvent requires Im ζ ≠ 0 (real energies touch the spectrum)".into(),
        ));
    }
    let n = h.order();
    if y >= n {
        return Err(Error::Domain(format!("site {y} outside matrix of order {n}")));
    }
    let mut a = h.matrix.mapv(|v| Complex64::new(v, 0.0));
    for i in 0..n {
        a[[i, i]] -= zeta;
    }
    let mut b = Array1::<Complex64>::zeros(n);
    b[y] = Complex64::new(1.0, 0.0);
    Ok(a.solve(&b)?)
}
