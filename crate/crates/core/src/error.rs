use thiserror::Error;

/// Errors produced by the transform, range and inversion routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported Bessel order {0} (supported range is [-0.5, {max}])", max = crate::specfun::Order::MAX)]
    UnsupportedOrder(f64),

    #[error("failed to bracket zero #{index} of J_{order} within [{lo}, {hi}]")]
    ZeroSearch {
        order: f64,
        index: usize,
        lo: f64,
        hi: f64,
    },

    #[error("harmonic index out of range: n={n}, m={m}, l={l}")]
    HarmonicIndex { n: usize, m: usize, l: usize },

    #[error("unsupported dimension {0} (expected 2 or 3)")]
    Dimension(usize),

    #[error("quadrature order insufficient for {what}: need at least {required}, got {got}")]
    QuadratureOrder {
        what: &'static str,
        required: usize,
        got: usize,
    },

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("invalid phantom: {0}")]
    InvalidPhantom(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("CFL condition violated: h_t = {h_t} exceeds {limit}")]
    Cfl { h_t: f64, limit: f64 },

    #[error("non-finite value in channel (m={m}, l={l}) at t = {t}")]
    NonFinite { m: usize, l: usize, t: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown header key `{0}`")]
    UnknownKey(String),

    #[error("missing header key `{0}`")]
    MissingKey(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
