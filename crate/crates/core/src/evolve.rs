//! Fixed-step fourth-order Runge-Kutta integration of
//! `i d/dt psi = H(t) psi` (`hbar = 1`) along an adiabatic schedule.

use crate::linalg::{QuantumState, C64};
use crate::models::{HamiltonianParts, ModelKind, ModelSpec};
use crate::schedule::Schedule;
use crate::{Error, Result};

/// Upper bound on `dt * |H|_gershgorin`. RK4 is stable on the imaginary axis
/// up to `2 sqrt(2)`.
pub const STABILITY_LIMIT: f64 = 2.5;

/// Runs whose norm drifts further than this are flagged non-compliant.
pub const NORM_DRIFT_TOL: f64 = 1e-8;

/// Final-state energy variance above which a run is considered to have left
/// the instantaneous eigenstate.
pub const ADIABATIC_VARIANCE_TOL: f64 = 1e-8;

pub const DEFAULT_DT: f64 = 1e-4;
pub const AHO_DT: f64 = 5e-5;
pub const DEFAULT_SAMPLE_STRIDE: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionConfig {
    pub dt: f64,
    /// Record every `sample_stride`-th step (the final step is always kept).
    pub sample_stride: usize,
    pub record_amplitudes: bool,
}

impl EvolutionConfig {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            sample_stride: DEFAULT_SAMPLE_STRIDE,
            record_amplitudes: false,
        }
    }

    pub fn default_for(kind: ModelKind) -> Self {
        match kind {
            ModelKind::Aho => Self::new(AHO_DT),
            _ => Self::new(DEFAULT_DT),
        }
    }

    pub fn with_stride(mut self, sample_stride: usize) -> Self {
        self.sample_stride = sample_stride;
        self
    }

    pub fn recording(mut self) -> Self {
        self.record_amplitudes = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidEvolution(format!(
                "time step must be positive, got {}",
                self.dt
            )));
        }
        if self.sample_stride == 0 {
            return Err(Error::InvalidEvolution(
                "sample stride must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Time-sampled record of one adiabatic run.
#[derive(Debug, Clone)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    /// Instantaneous `<psi|H(t)|psi> - E_c`.
    pub energies: Vec<f64>,
    pub f_values: Vec<f64>,
    pub norms: Vec<f64>,
    pub amplitudes: Option<Vec<Vec<C64>>>,
    pub final_state: QuantumState,
    /// Step actually taken, `T_R / steps`.
    pub dt: f64,
    pub steps: usize,
    pub max_norm_drift: f64,
    /// `<H^2> - <H>^2` of the final state under the final Hamiltonian.
    pub final_energy_variance: f64,
}

impl EvolutionTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn norm_compliant(&self) -> bool {
        self.max_norm_drift <= NORM_DRIFT_TOL
    }

    pub fn is_adiabatic(&self) -> bool {
        self.final_energy_variance <= ADIABATIC_VARIANCE_TOL
    }

    pub fn final_energy(&self) -> f64 {
        *self.energies.last().expect("trace has at least one sample")
    }
}

/// Reusable RK4 workspace for one set of Hamiltonian pieces.
pub(crate) struct Integrator<'a> {
    parts: &'a HamiltonianParts,
    k: [Vec<C64>; 4],
    tmp: Vec<C64>,
}

impl<'a> Integrator<'a> {
    pub(crate) fn new(parts: &'a HamiltonianParts) -> Self {
        let zero = vec![C64::new(0.0, 0.0); parts.dim()];
        Self {
            parts,
            k: [zero.clone(), zero.clone(), zero.clone(), zero.clone()],
            tmp: zero,
        }
    }

    /// `out = H(f) psi`, with `H(f) = H0 + f (H1 + alpha O) + shift`.
    pub(crate) fn hamiltonian_times(
        parts: &HamiltonianParts,
        f_value: f64,
        shift: f64,
        psi: &[C64],
        out: &mut [C64],
    ) {
        for (o, p) in out.iter_mut().zip(psi) {
            *o = p * shift;
        }
        parts.h0.apply_accumulate(1.0, psi, out);
        if f_value != 0.0 {
            parts.switched.apply_accumulate(f_value, psi, out);
        }
    }

    fn derivative(parts: &HamiltonianParts, f_value: f64, psi: &[C64], out: &mut [C64]) {
        Self::hamiltonian_times(parts, f_value, parts.e_c, psi, out);
        for o in out.iter_mut() {
            // multiply by -i
            *o = C64::new(o.im, -o.re);
        }
    }

    /// Advance `psi` by `dt` with switching values at the start, midpoint and
    /// end of the step.
    pub(crate) fn step(&mut self, psi: &mut [C64], f: [f64; 3], dt: f64) {
        let parts = self.parts;
        let [k1, k2, k3, k4] = &mut self.k;
        let tmp = &mut self.tmp;
        let h = 0.5 * dt;

        Self::derivative(parts, f[0], psi, k1);
        for ((t, p), k) in tmp.iter_mut().zip(psi.iter()).zip(k1.iter()) {
            *t = p + k * h;
        }
        Self::derivative(parts, f[1], tmp, k2);
        for ((t, p), k) in tmp.iter_mut().zip(psi.iter()).zip(k2.iter()) {
            *t = p + k * h;
        }
        Self::derivative(parts, f[1], tmp, k3);
        for ((t, p), k) in tmp.iter_mut().zip(psi.iter()).zip(k3.iter()) {
            *t = p + k * dt;
        }
        Self::derivative(parts, f[2], tmp, k4);
        let w = dt / 6.0;
        for (i, p) in psi.iter_mut().enumerate() {
            *p += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * w;
        }
    }

    /// Energy without the offset, and its variance, of `psi` under `H(f)`.
    pub(crate) fn energy_and_variance(&mut self, psi: &[C64], f_value: f64) -> (f64, f64) {
        let out = &mut self.tmp;
        Self::hamiltonian_times(self.parts, f_value, 0.0, psi, out);
        let norm_sqr: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        let e: f64 = psi
            .iter()
            .zip(out.iter())
            .map(|(a, b)| (a.conj() * b).re)
            .sum::<f64>()
            / norm_sqr;
        let h2: f64 = out.iter().map(|b| b.norm_sqr()).sum::<f64>() / norm_sqr;
        (e, (h2 - e * e).max(0.0))
    }
}

/// Checks `dt * |H|` against [`STABILITY_LIMIT`] at both ramp endpoints.
pub fn check_stability(parts: &HamiltonianParts, dt: f64) -> Result<()> {
    let bound = [0.0, 1.0]
        .iter()
        .map(|&f| parts.at(f).map(|h| h.gershgorin_bound()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let product = dt * bound;
    if product > STABILITY_LIMIT {
        Err(Error::Unstable {
            dt,
            product,
            limit: STABILITY_LIMIT,
        })
    } else {
        Ok(())
    }
}

/// Integrate `psi0` from `t = 0` to `T_R` under `H0 + f(t)(H1 + alpha O) + E_c`.
pub fn propagate(
    spec: &ModelSpec,
    schedule: &Schedule,
    cfg: &EvolutionConfig,
    psi0: &QuantumState,
) -> Result<EvolutionTrace> {
    cfg.validate()?;
    let parts = HamiltonianParts::new(spec)?;
    if psi0.dim() != parts.dim() {
        return Err(Error::DimensionMismatch {
            expected: parts.dim(),
            found: psi0.dim(),
        });
    }
    if !psi0.is_normalized() {
        return Err(Error::InvalidEvolution(
            "initial state must be normalized".into(),
        ));
    }
    check_stability(&parts, cfg.dt)?;

    let run_time = schedule.run_time();
    let steps = ((run_time / cfg.dt).round() as usize).max(1);
    let dt = run_time / steps as f64;
    let n_samples = steps / cfg.sample_stride + 2;

    let mut trace = EvolutionTrace {
        times: Vec::with_capacity(n_samples),
        energies: Vec::with_capacity(n_samples),
        f_values: Vec::with_capacity(n_samples),
        norms: Vec::with_capacity(n_samples),
        amplitudes: cfg.record_amplitudes.then(|| Vec::with_capacity(n_samples)),
        final_state: psi0.clone(),
        dt,
        steps,
        max_norm_drift: 0.0,
        final_energy_variance: 0.0,
    };

    let mut psi = psi0.amplitudes().to_vec();
    let mut integrator = Integrator::new(&parts);
    let time_at = |k: usize| {
        if k == steps {
            run_time
        } else {
            k as f64 * dt
        }
    };
    let record =
        |k: usize, psi: &[C64], integrator: &mut Integrator, trace: &mut EvolutionTrace| {
            let t = time_at(k);
            let f_value = schedule.value(t);
            if psi.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
                return Err(Error::NonFinite { step: k, f_value });
            }
            let (energy, variance) = integrator.energy_and_variance(psi, f_value);
            let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            trace.max_norm_drift = trace.max_norm_drift.max((norm - 1.0).abs());
            trace.times.push(t);
            trace.f_values.push(f_value);
            trace.energies.push(energy);
            trace.norms.push(norm);
            if let Some(amps) = trace.amplitudes.as_mut() {
                amps.push(psi.to_vec());
            }
            trace.final_energy_variance = variance;
            Ok(())
        };

    record(0, &psi, &mut integrator, &mut trace)?;
    let mut f_start = schedule.value(0.0);
    for k in 1..=steps {
        let t0 = time_at(k - 1);
        let f_mid = schedule.value(t0 + 0.5 * dt);
        let f_end = schedule.value(time_at(k));
        integrator.step(&mut psi, [f_start, f_mid, f_end], dt);
        f_start = f_end;
        if k % cfg.sample_stride == 0 || k == steps {
            record(k, &psi, &mut integrator, &mut trace)?;
        }
    }
    trace.final_state = QuantumState::from_amplitudes(psi)?;
    Ok(trace)
}

/// `(t, Re a_n(t))` series from a trace recorded with amplitudes.
pub fn phase_trace(trace: &EvolutionTrace, n: usize) -> Result<Vec<(f64, f64)>> {
    let amps = trace
        .amplitudes
        .as_ref()
        .ok_or(Error::AmplitudesNotRecorded)?;
    let dim = trace.final_state.dim();
    if n >= dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: n + 1,
        });
    }
    Ok(trace
        .times
        .iter()
        .zip(amps)
        .map(|(&t, a)| (t, a[n].re))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::inner;
    use crate::schedule::DEFAULT_RUN_TIME;
    use std::f64::consts::PI;

    #[test]
    fn unperturbed_ground_state_stays_put() {
        let spec = ModelSpec::dho(3, 0.0);
        let s = Schedule::tanh(20.0).unwrap();
        let trace = propagate(
            &spec,
            &s,
            &EvolutionConfig::new(1e-3).with_stride(100),
            &QuantumState::basis(8, 0).unwrap(),
        )
        .unwrap();
        let overlap = inner(&QuantumState::basis(8, 0).unwrap(), &trace.final_state)
            .unwrap()
            .norm();
        assert!(overlap >= 1.0 - 1e-10);
        assert!(trace.energies.iter().all(|e| (e - 0.5).abs() < 1e-12));
        assert_eq!(*trace.times.last().unwrap(), 20.0);
        assert!(trace.times.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(trace.times.len(), trace.norms.len());
    }

    #[test]
    fn phase_trace_periods() {
        // W0 = 1/2 gives period 4 pi; adding E_c = 1/2 halves it.
        for (e_c, period) in [(0.0, 4.0 * PI), (0.5, 2.0 * PI)] {
            let spec = ModelSpec::dho(2, 0.0).with_offset(e_c);
            let s = Schedule::tanh(2.0 * period).unwrap();
            let cfg = EvolutionConfig::new(1e-3).with_stride(10).recording();
            let trace = propagate(&spec, &s, &cfg, &QuantumState::basis(4, 0).unwrap()).unwrap();
            let series = phase_trace(&trace, 0).unwrap();
            assert_eq!(series[0], (0.0, 1.0));
            let omega = 2.0 * PI / period;
            for &(t, re) in &series {
                assert!((re - (omega * t).cos()).abs() < 1e-9, "t={t}");
            }
        }
    }

    #[test]
    fn phase_trace_requires_amplitudes() {
        let spec = ModelSpec::dho(2, 0.0);
        let s = Schedule::tanh(1.0).unwrap();
        let trace = propagate(
            &spec,
            &s,
            &EvolutionConfig::new(1e-2),
            &QuantumState::basis(4, 0).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            phase_trace(&trace, 0),
            Err(Error::AmplitudesNotRecorded)
        ));
    }

    #[test]
    fn rejects_unstable_and_unnormalized() {
        let spec = ModelSpec::aho(6, 2.0);
        let s = Schedule::tanh(DEFAULT_RUN_TIME).unwrap();
        let psi = QuantumState::basis(64, 0).unwrap();
        assert!(matches!(
            propagate(&spec, &s, &EvolutionConfig::new(0.1), &psi),
            Err(Error::Unstable { .. })
        ));
        let bad = QuantumState::from_amplitudes(vec![C64::new(2.0, 0.0); 4]).unwrap();
        assert!(propagate(
            &ModelSpec::dho(2, 0.0),
            &s,
            &EvolutionConfig::new(1e-2),
            &bad
        )
        .is_err());
        assert!(EvolutionConfig::new(0.0).validate().is_err());
        assert!(EvolutionConfig::new(1e-3)
            .with_stride(0)
            .validate()
            .is_err());
    }

    #[test]
    fn offset_only_changes_phases() {
        let s = Schedule::tanh(30.0).unwrap();
        let cfg = EvolutionConfig::new(1e-3).with_stride(500);
        let psi = QuantumState::basis(16, 0).unwrap();
        let a = propagate(&ModelSpec::dho(4, 1.0), &s, &cfg, &psi).unwrap();
        let b = propagate(&ModelSpec::dho(4, 1.0).with_offset(1.0), &s, &cfg, &psi).unwrap();
        for (x, y) in a.energies.iter().zip(&b.energies) {
            assert!((x - y).abs() < 1e-9);
        }
        for (x, y) in a
            .final_state
            .amplitudes()
            .iter()
            .zip(b.final_state.amplitudes())
        {
            assert!((x.norm() - y.norm()).abs() < 1e-9);
        }
    }
}
