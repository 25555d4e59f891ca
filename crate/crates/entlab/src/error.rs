use thiserror::Error;

/// Error taxonomy shared by every module. The CLI maps these onto its exit
/// codes: config/validation problems exit 2, numeric-health problems exit 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("model error: {0}")]
    Model(String),

    /// Eigenvalue clipping beyond the tolerated band, residual blowups and
    /// similar conditions where the numbers can no longer be trusted.
    #[error("numeric health: {0}")]
    Numeric(String),

    /// The Fermi level coincides with an eigenvalue; the spectral projection
    /// is ambiguous there.
    #[error("degenerate Fermi level: mu within {tol:e} of eigenvalue {eigenvalue} (index {index})")]
    DegenerateFermiLevel {
        eigenvalue: f64,
        index: usize,
        tol: f64,
    },

    #[error("gapless filling: eigenvalues {below} and {above} around k={filled} differ by less than 2*tol")]
    GaplessFilling { filled: usize, below: f64, above: f64 },

    #[error("truncation error: {0}")]
    Truncation(String),

    #[error("fit underdetermined: {0}")]
    FitUnderdetermined(String),

    #[error("statistical power: {0}")]
    StatisticalPower(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("linear algebra backend: {0}")]
    Linalg(String),
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Linalg(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// CLI exit code class: 2 for config/validation, 3 for numeric health.
    pub fn exit_code(&self) -> i32 {
        match self {
            // statistical-power failures are validation (the config asked
            // for an underpowered run); underdetermined fits are a runtime
            // data deficiency and land with the numeric-health class
            Error::Numeric(_)
            | Error::DegenerateFermiLevel { .. }
            | Error::Truncation(_)
            | Error::FitUnderdetermined(_)
            | Error::Linalg(_) => 3,
            _ => 2,
        }
    }
}
