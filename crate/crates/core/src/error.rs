use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty domain: {0}")]
    Empty(String),
    #[error("intervals overlap or touch: ({0}, {1}) and ({2}, {3})")]
    Overlap(f64, f64, f64, f64),
    #[error("duplicate frequency {0}")]
    DuplicateFrequency(f64),
    #[error("[{a}, {b}] is not contained in the closure of a single interval of the domain")]
    Range { a: f64, b: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not unitary: ||B*B - I||_F = {residual:e} exceeds {tol:e}")]
    NonUnitary { residual: f64, tol: f64 },
    #[error("invalid window [{lo}, {hi}]")]
    Window { lo: f64, hi: f64 },
    #[error("scan step {step} must be positive and below {max} to resolve every root")]
    Step { step: f64, max: f64 },
    #[error("tolerance must be positive, got {0}")]
    Tolerance(f64),
    #[error("boundary exponentials do not span C^n: smallest singular value {smin:e} after greedy selection")]
    Span { smin: f64 },
    #[error("frequency set is not the spectrum of a single restriction: residual {residual:e} at lambda = {lambda}")]
    Consistency { lambda: f64, residual: f64 },
    #[error("need at least 2 spectrum points, got {0}")]
    TooFewPoints(usize),
    #[error("sampled function does not live on the evolver's domain")]
    DomainMismatch,
    #[error("boundary evolution needs intervals of equal length, interval {index} has length {length} instead of {expected}")]
    UnequalLength { index: usize, length: f64, expected: f64 },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("{got} samples per interval cannot resolve the retained frequencies, need at least {required}")]
    Resolution { required: usize, got: usize },
    #[error("frequencies are not orthogonal over the domain: defect {defect:e}")]
    NonOrthogonal { defect: f64 },
    #[error("exact tiling check needs rational endpoints")]
    IrrationalEndpoint,
    #[error("invalid translation set: {0}")]
    TranslationSet(String),
    #[error("u_{p} needs square index {needed} but only {n_max} squares are materialized")]
    Index { p: usize, needed: usize, n_max: usize },
    #[error("gradient vanishes, quotient undefined")]
    ZeroGradient,
    #[error("unsupported test function: {0}")]
    Spec(String),
    #[error("({0}, {1}) is not in the square's spectrum")]
    NotInSpectrum(f64, f64),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("truncation excludes every frequency")]
    EmptyExpansion,
    #[error("invalid input: {0}")]
    Input(String),
}
