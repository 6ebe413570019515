//! Emulated phase-estimation readout.
//!
//! An ideal phase-estimation device only reports the eigenphase frequency
//! modulo sign, `|E + E_c|`. The emulation evolves the final state under the
//! frozen Hamiltonian, unwraps the phase of `<psi_f|psi(t)>`, and fits its
//! slope. The signed slope is deliberately discarded.

use std::f64::consts::PI;

use crate::evolve::{check_stability, Integrator};
use crate::linalg::{QuantumState, C64};
use crate::models::{HamiltonianParts, ModelSpec};
use crate::schedule::OSCILLATOR_PERIOD;
use crate::{Error, Result};

/// Measurement window, twenty oscillator periods.
pub const DEFAULT_WINDOW: f64 = 20.0 * OSCILLATOR_PERIOD;

/// Overlap modulus below which the state is not treated as stationary.
pub const STATIONARY_OVERLAP: f64 = 0.99;

/// Frequencies below this are flagged as poorly resolved.
pub const LOW_FREQUENCY: f64 = 0.05;

const TARGET_SAMPLES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyEstimate {
    /// `|E + E_c|` as the phase readout sees it.
    pub magnitude: f64,
    pub e_c: f64,
    /// `magnitude - E_c` when a positive offset was supplied, else `magnitude`.
    pub inferred_energy: f64,
    /// The hidden signed frequency was negative, so the readout folded it.
    pub wrapped: bool,
    /// Standard error of the fitted slope.
    pub resolution: f64,
    pub low_resolution: bool,
}

/// Expectation of the full `H0 + H1 + alpha O` (no offset) in `state`.
pub fn rayleigh_energy(spec: &ModelSpec, state: &QuantumState) -> Result<f64> {
    let parts = HamiltonianParts::new(spec)?;
    if state.dim() != parts.dim() {
        return Err(Error::DimensionMismatch {
            expected: parts.dim(),
            found: state.dim(),
        });
    }
    let mut out = vec![C64::new(0.0, 0.0); state.dim()];
    Integrator::hamiltonian_times(&parts, 1.0, 0.0, state.amplitudes(), &mut out);
    let norm_sqr = state.norm_sqr();
    if norm_sqr == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let e: f64 = state
        .amplitudes()
        .iter()
        .zip(&out)
        .map(|(a, b)| (a.conj() * b).re)
        .sum();
    Ok(e / norm_sqr)
}

pub fn measure_energy(
    spec: &ModelSpec,
    final_state: &QuantumState,
    window: f64,
    dt: f64,
) -> Result<EnergyEstimate> {
    if !(window.is_finite() && window > 0.0 && dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidRequest(format!(
            "window and dt must be positive, got window={window}, dt={dt}"
        )));
    }
    let parts = HamiltonianParts::new(spec)?;
    if final_state.dim() != parts.dim() {
        return Err(Error::DimensionMismatch {
            expected: parts.dim(),
            found: final_state.dim(),
        });
    }
    check_stability(&parts, dt)?;
    let reference = final_state.normalized()?;
    let ref_amps = reference.amplitudes();

    let steps = ((window / dt).round() as usize).max(1);
    let dt = window / steps as f64;
    // Keep the phase advance between samples well below pi.
    let rough = (rayleigh_energy(spec, &reference)? + parts.e_c).abs() + 1.0;
    let max_stride = ((0.5 / (rough * dt)).floor() as usize).max(1);
    let stride = (steps / TARGET_SAMPLES).clamp(1, max_stride);

    let mut psi = ref_amps.to_vec();
    let mut integrator = Integrator::new(&parts);
    let mut times = Vec::with_capacity(steps / stride + 2);
    let mut phases = Vec::with_capacity(steps / stride + 2);
    let mut last_raw = 0.0;
    let mut offset = 0.0;

    times.push(0.0);
    phases.push(0.0);
    for k in 1..=steps {
        integrator.step(&mut psi, [1.0; 3], dt);
        if k % stride != 0 && k != steps {
            continue;
        }
        let t = k as f64 * dt;
        let overlap: C64 = ref_amps.iter().zip(&psi).map(|(a, b)| a.conj() * b).sum();
        let modulus = overlap.norm();
        if !modulus.is_finite() {
            return Err(Error::NonFinite {
                step: k,
                f_value: 1.0,
            });
        }
        if modulus < STATIONARY_OVERLAP {
            return Err(Error::NonStationary {
                overlap: modulus,
                t,
            });
        }
        let raw = overlap.arg();
        let mut delta = raw - last_raw;
        if delta > PI {
            delta -= 2.0 * PI;
        } else if delta < -PI {
            delta += 2.0 * PI;
        }
        offset += delta;
        last_raw = raw;
        times.push(t);
        phases.push(offset);
    }

    let (slope, stderr) = fit_slope(&times, &phases);
    // phase = -(E + E_c) t
    let signed_frequency = -slope;
    let magnitude = signed_frequency.abs();
    let e_c = parts.e_c;
    let inferred_energy = if e_c > 0.0 {
        magnitude - e_c
    } else {
        magnitude
    };
    Ok(EnergyEstimate {
        magnitude,
        e_c,
        inferred_energy,
        wrapped: signed_frequency < 0.0,
        resolution: stderr,
        low_resolution: magnitude < LOW_FREQUENCY,
    })
}

/// Least-squares slope of `y` against `x`, with its standard error.
fn fit_slope(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let stderr = if x.len() > 2 {
        (sse / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (slope, stderr)
}
