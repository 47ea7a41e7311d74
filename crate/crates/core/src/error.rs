use thiserror::Error;

/// Errors raised by the verification toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("a spectrum needs at least {min} values, got {got}")]
    TooFewValues { min: usize, got: usize },

    #[error("non-finite value {0} in input")]
    NonFinite(f64),

    #[error("degenerate spectrum: min gap {min_gap:e} is below tolerance {tolerance:e}")]
    DegenerateSpectrum { min_gap: f64, tolerance: f64 },

    #[error("zero-last convention violated: last eigenvalue is {last}, other values must be nonzero")]
    ZeroConventionViolated { last: f64 },

    #[error("degenerate critical points: {0}")]
    DegenerateCriticalPoints(String),

    #[error("empty admissible interval: largest local min {m_upper} is not below smallest local max {m_lower}")]
    EmptyInterval { m_upper: f64, m_lower: f64 },

    #[error("complex roots at t = {t}: largest imaginary part {max_imag:e}")]
    ComplexRootsDetected { t: f64, max_imag: f64 },

    #[error("{endpoint} endpoint {value} is not a threshold; ratios stay bounded by {bound:e}")]
    NotAThresholdEndpoint {
        endpoint: &'static str,
        value: f64,
        bound: f64,
    },

    #[error("polynomial is not monic (leading coefficient {0})")]
    NotMonic(f64),

    #[error("polynomial must have zero constant term, got {0}")]
    NonzeroConstantTerm(f64),

    #[error("singular metric at {point:?}")]
    SingularMetric { point: Vec<f64> },

    #[error("derivative step too large: symmetry residual {residual:e} exceeds {limit:e}")]
    StepTooLarge { residual: f64, limit: f64 },

    #[error("tensor field is not Codazzi: residual {residual:e} exceeds {tolerance:e}")]
    NotCodazzi { residual: f64, tolerance: f64 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("immersion differential is rank deficient at {point:?}")]
    RankDeficient { point: Vec<f64> },

    #[error("bad parameters: {0}")]
    BadParameters(String),

    #[error("chart is not closed: axis {axis} is not periodic")]
    NotClosed { axis: usize },

    #[error("point {point:?} lies outside the chart domain")]
    OutOfDomain { point: Vec<f64> },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("expression error: {0}")]
    Expression(#[from] crate::expr::ExprError),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
