use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        found: String,
    },

    #[error("invalid structure constants: {0}")]
    InvalidStructure(String),

    #[error("invalid representation: {0}")]
    InvalidRepresentation(String),

    #[error("pairwise products are not representable in the affine span of the variables (residual {residual:.3e} > {threshold:.1e})")]
    NotRepresentable { residual: f64, threshold: f64 },

    #[error("degenerate basis: {{I, X_1, .., X_n}} is linearly dependent (relative singular value {rel_singular_value:.3e})")]
    DegenerateBasis { rel_singular_value: f64 },

    #[error("invalid system parameters: {0}")]
    InvalidSystem(String),

    #[error("inadmissible initial mean: second-moment matrix has eigenvalue {min_eigenvalue:.3e} < 0")]
    InadmissibleMean { min_eigenvalue: f64 },

    #[error("invalid weighting: {0}")]
    InvalidWeighting(String),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("drift matrix is not Hurwitz (spectral abscissa {spectral_abscissa:.3e})")]
    NotHurwitz { spectral_abscissa: f64 },

    #[error("trivial weighting: F sqrt(P) = 0, the reference level |F sqrt(P)|^2 = {reference:.3e} vanishes")]
    TrivialWeighting { reference: f64 },

    #[error("no initial noise: <Sigma, Re Lambda(0)> = {delta_dot0:.3e} must be positive")]
    NoInitialNoise { delta_dot0: f64 },

    #[error("decoherence time inconclusive: no crossing of {threshold:.6e} up to t = {horizon:.3e} (sup of Delta marched = {sup_delta:.6e}) and no steady-state certificate")]
    Inconclusive {
        threshold: f64,
        horizon: f64,
        sup_delta: f64,
    },

    #[error("stationarity equation 2 R x + k = 0 has no solution: k is outside range(R) (residual {residual:.3e})")]
    InfeasibleStationarity { residual: f64 },

    #[error("internal consistency violated: {0}")]
    InternalConsistency(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn dims(context: &'static str, expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch {
            context,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
