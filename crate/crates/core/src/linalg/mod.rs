//! Complex state vectors and Hermitian operators over a truncated basis of
//! `2^N` states. Basis state `|n>` lives at array index `n`.

mod operator;
mod state;

pub use num_complex::Complex64 as C64;
pub use operator::{HermitianOperator, Storage};
pub use state::{inner, QuantumState};

/// Elementwise tolerance used when checking Hermiticity of derived operators.
pub const HERMITIAN_TOL: f64 = 1e-14;

/// Relative bound on the imaginary part of a quadratic form before it is
/// rejected as non-Hermitian.
pub const EXPECTATION_IMAG_TOL: f64 = 1e-12;

/// Normalized states satisfy `|norm^2 - 1| <= NORM_TOL`.
pub const NORM_TOL: f64 = 1e-12;

pub(crate) fn check_dim(dim: usize) -> crate::Result<()> {
    if dim >= 2 && dim.is_power_of_two() {
        Ok(())
    } else {
        Err(crate::Error::InvalidDimension(dim))
    }
}
