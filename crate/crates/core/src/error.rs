use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("parameter domain violated: {0}")]
    ParameterDomain(String),

    #[error("grid of half-width {extent} cannot resolve oscillator level {level} (turning point {turning_point:.3} > 0.8 * extent)")]
    Resolution {
        level: usize,
        turning_point: f64,
        extent: f64,
    },

    #[error("basis too small: {required} states needed, {available} available")]
    BasisSize { required: usize, available: usize },

    #[error("degenerate normalization: {0}")]
    DegenerateNormalization(String),

    #[error("input is not normalized: squared norm {0}")]
    Normalization(f64),

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
}
