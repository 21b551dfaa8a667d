use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("height {0} is below sqrt(3)/2, where the tail bound does not apply")]
    HeightBelowDomain(f64),

    #[error("point {re} + {im}i is not in the upper half-plane")]
    NotInUpperHalfPlane { re: f64, im: f64 },

    #[error("truncation target {target:e} is not reachable with at most {cap} terms at height {height}")]
    UnattainableTolerance { target: f64, height: f64, cap: usize },

    #[error("{num} and {den} are not coprime")]
    NotCoprime { num: i64, den: i64 },

    #[error("denominator must be positive, got {0}")]
    NonPositiveDenominator(i64),

    #[error("matrix ({a} {b}; {c} {d}) has determinant {det}, expected 1")]
    NotUnimodular { a: i64, b: i64, c: i64, d: i64, det: i64 },

    #[error("label {num}/{den} is outside [-1/2, 1/2]")]
    LabelOutOfRange { num: i64, den: i64 },

    #[error("fundamental-domain reduction of {re} + {im}i did not terminate in {cap} steps")]
    ReductionStalled { re: f64, im: f64, cap: usize },

    #[error("discriminant underflows at {re} + {im}i")]
    DeltaUnderflow { re: f64, im: f64 },

    #[error("|E2| = {magnitude:e} at {re} + {im}i is below the pole threshold")]
    NearPole { re: f64, im: f64, magnitude: f64 },

    #[error("no sign change of {what} on [{lo}, {hi}]")]
    NoSignChange { what: &'static str, lo: f64, hi: f64 },

    #[error("Newton iteration for h(tau) = {target} did not converge (last residual {residual:e})")]
    NoConvergence { target: f64, residual: f64 },

    #[error("zero labelled {num}/{den} fails certification: scaled deviation {theta:e} >= {limit:e}")]
    CertificationFailed { num: i64, den: i64, theta: f64, limit: f64 },

    #[error("zero labelled {num}/{den} has residual {residual:e} above acceptance {limit:e}")]
    ResidualTooLarge { num: i64, den: i64, residual: f64, limit: f64 },

    #[error("invalid plot specification: {0}")]
    InvalidPlotSpec(String),

    #[error("empty catalog")]
    EmptyCatalog,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
