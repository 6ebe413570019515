use thiserror::Error;

use crate::evolve::EvolutionTrace;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid dimension {0}: must be a power of two and at least 2")]
    InvalidDimension(usize),

    #[error("operator is not Hermitian: |a[{row},{col}] - conj(a[{col},{row}])| = {deviation:e}")]
    NotHermitian {
        row: usize,
        col: usize,
        deviation: f64,
    },

    #[error("quadratic form has imaginary part {imag:e} relative to real part {real:e}")]
    ComplexExpectation { real: f64, imag: f64 },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("time {t} outside schedule range [0, {run_time}]")]
    TimeOutOfRange { t: f64, run_time: f64 },

    #[error("invalid evolution config: {0}")]
    InvalidEvolution(String),

    #[error(
        "step size {dt} violates stability bound: dt * |H|_gershgorin = {product:.3} > {limit}"
    )]
    Unstable { dt: f64, product: f64, limit: f64 },

    #[error("non-finite amplitude at step {step} (f = {f_value})")]
    NonFinite { step: usize, f_value: f64 },

    #[error("amplitudes were not recorded for this trace")]
    AmplitudesNotRecorded,

    #[error("non-stationary state: overlap modulus fell to {overlap:.6} at t = {t}")]
    NonStationary { overlap: f64, t: f64 },

    #[error("non-adiabatic propagation: final energy variance {plus_variance:e} (+alpha) / {minus_variance:e} (-alpha) exceeds {tolerance:e}")]
    NonAdiabatic {
        plus_variance: f64,
        minus_variance: f64,
        tolerance: f64,
        plus: Box<EvolutionTrace>,
        minus: Box<EvolutionTrace>,
    },

    #[error("fidelity estimate {0} lies outside [0, 1] beyond tolerance")]
    FidelityOutOfRange(f64),

    #[error("invalid request: {0}")]
    InvalidRequest(String),

    #[error("eigensolver did not meet accuracy bounds: {0}")]
    Convergence(String),

    #[error("imaginary-time projection hit the iteration cap of {0} steps")]
    IterationCap(usize),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
