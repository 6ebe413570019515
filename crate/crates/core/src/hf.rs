//! Observable expectations from energy derivatives,
//! `<O> = dE(alpha)/dalpha` at `alpha = 0`, estimated by a central difference
//! of two adiabatic runs with `+alpha O` and `-alpha O` switched on alongside
//! the interaction.

use crate::evolve::{propagate, EvolutionConfig, EvolutionTrace};
use crate::linalg::QuantumState;
use crate::models::{ModelKind, ModelSpec, Observable};
use crate::readout::rayleigh_energy;
use crate::schedule::Schedule;
use crate::{Error, Result};

pub const DEFAULT_ALPHA_STEP: f64 = 1e-3;
/// Coarser step matching the energy-versus-alpha sweep.
pub const SWEEP_ALPHA_STEP: f64 = 0.02;
/// Fidelities may stray this far outside `[0, 1]` before being rejected.
pub const FIDELITY_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HfRequest {
    pub base_spec: ModelSpec,
    pub observable: Observable,
    pub alpha_step: f64,
    /// Initial basis state `|level>`, which evolves into `|E_level>`.
    pub level: usize,
}

impl HfRequest {
    pub fn new(base_spec: ModelSpec, observable: Observable) -> Self {
        Self {
            base_spec,
            observable,
            alpha_step: DEFAULT_ALPHA_STEP,
            level: 0,
        }
    }

    pub fn with_alpha_step(mut self, alpha_step: f64) -> Self {
        self.alpha_step = alpha_step;
        self
    }

    pub fn with_level(mut self, level: usize) -> Self {
        self.level = level;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha_step.is_finite() && self.alpha_step > 0.0) {
            return Err(Error::InvalidRequest(format!(
                "alpha step must be positive, got {}",
                self.alpha_step
            )));
        }
        if self.level != 0 && self.base_spec.kind() != ModelKind::Psm {
            return Err(Error::InvalidRequest(
                "excited levels are only tracked for the scattering model".into(),
            ));
        }
        self.base_spec.validate()?;
        if self.level >= self.base_spec.dim() {
            return Err(Error::InvalidRequest(format!(
                "level {} out of range for dimension {}",
                self.level,
                self.base_spec.dim()
            )));
        }
        Ok(())
    }

    fn spec_at(&self, alpha: f64) -> ModelSpec {
        self.base_spec.with_observable(self.observable, alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HfResult {
    /// `(e_plus - e_minus) / (2 alpha_step)`, accurate to `O(alpha_step^2)`.
    pub value: f64,
    pub e_plus: f64,
    pub e_minus: f64,
    pub alpha_step: f64,
    pub plus_variance: f64,
    pub minus_variance: f64,
    /// Largest norm drift of the two runs.
    pub max_norm_drift: f64,
}

fn run_at(
    req: &HfRequest,
    alpha: f64,
    schedule: &Schedule,
    cfg: &EvolutionConfig,
) -> Result<(f64, EvolutionTrace)> {
    let spec = req.spec_at(alpha);
    let psi0 = QuantumState::basis(spec.dim(), req.level)?;
    let trace = propagate(&spec, schedule, cfg, &psi0)?;
    let energy = rayleigh_energy(&spec, &trace.final_state)?;
    Ok((energy, trace))
}

pub fn expectation_hf(
    req: &HfRequest,
    schedule: &Schedule,
    cfg: &EvolutionConfig,
) -> Result<HfResult> {
    req.validate()?;
    let h = req.alpha_step;
    let (plus, minus) = rayon::join(
        || run_at(req, h, schedule, cfg),
        || run_at(req, -h, schedule, cfg),
    );
    let (e_plus, plus) = plus?;
    let (e_minus, minus) = minus?;
    let (plus_variance, minus_variance) = (plus.final_energy_variance, minus.final_energy_variance);
    if !(plus.is_adiabatic() && minus.is_adiabatic()) {
        return Err(Error::NonAdiabatic {
            plus_variance,
            minus_variance,
            tolerance: crate::evolve::ADIABATIC_VARIANCE_TOL,
            plus: Box::new(plus),
            minus: Box::new(minus),
        });
    }
    Ok(HfResult {
        value: (e_plus - e_minus) / (2.0 * h),
        e_plus,
        e_minus,
        alpha_step: h,
        plus_variance,
        minus_variance,
        max_norm_drift: plus.max_norm_drift.max(minus.max_norm_drift),
    })
}

/// `<x^2> - <x>^2` from two Hellmann-Feynman estimates at `alpha_step`.
pub fn variance_x_with(
    spec: &ModelSpec,
    alpha_step: f64,
    schedule: &Schedule,
    cfg: &EvolutionConfig,
) -> Result<f64> {
    if spec.kind() == ModelKind::Psm {
        return Err(Error::InvalidRequest(
            "position variance is defined for the oscillator models".into(),
        ));
    }
    let base = spec.without_observable();
    let (x, x2) = rayon::join(
        || {
            expectation_hf(
                &HfRequest::new(base, Observable::X).with_alpha_step(alpha_step),
                schedule,
                cfg,
            )
        },
        || {
            expectation_hf(
                &HfRequest::new(base, Observable::XSquared).with_alpha_step(alpha_step),
                schedule,
                cfg,
            )
        },
    );
    let (x, x2) = (x?.value, x2?.value);
    Ok(x2 - x * x)
}

pub fn variance_x(spec: &ModelSpec, schedule: &Schedule, cfg: &EvolutionConfig) -> Result<f64> {
    variance_x_with(spec, DEFAULT_ALPHA_STEP, schedule, cfg)
}

/// `F_n(g) = |<E_n(g)|n>|^2`, read out as the expectation of `|n><n|`.
pub fn fidelity_hf(
    spec: &ModelSpec,
    n: usize,
    schedule: &Schedule,
    cfg: &EvolutionConfig,
) -> Result<f64> {
    if spec.kind() != ModelKind::Psm {
        return Err(Error::InvalidRequest(
            "fidelity readout is defined for the scattering model".into(),
        ));
    }
    let req = HfRequest::new(spec.without_observable(), Observable::Projector(n)).with_level(n);
    clamp_fidelity(expectation_hf(&req, schedule, cfg)?.value)
}

pub(crate) fn clamp_fidelity(raw: f64) -> Result<f64> {
    if !(-FIDELITY_SLACK..=1.0 + FIDELITY_SLACK).contains(&raw) {
        return Err(Error::FidelityOutOfRange(raw));
    }
    Ok(raw.clamp(0.0, 1.0))
}
