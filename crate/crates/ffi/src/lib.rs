//! C ABI over the adiaproj simulator.
//!
//! Models and traces are opaque heap handles owned by the caller and
//! released with the matching `*_free`. Every fallible call returns an
//! [`AdiaStatus`]; the message of the last failure on the calling thread is
//! available from [`adia_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use adiaproj::evolve::{propagate, EvolutionConfig, EvolutionTrace};
use adiaproj::hf::{expectation_hf, HfRequest};
use adiaproj::linalg::QuantumState;
use adiaproj::models::{assemble, Model, ModelKind, ModelSpec, Observable};
use adiaproj::oracle::diagonalize;
use adiaproj::readout::{measure_energy, rayleigh_energy};
use adiaproj::schedule::{Schedule, Shape};
use adiaproj::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdiaStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    DimensionMismatch = 3,
    Unstable = 4,
    NonFinite = 5,
    NonAdiabatic = 6,
    NonStationary = 7,
    Numerical = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdiaModelKind {
    Dho = 0,
    Aho = 1,
    Psm = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdiaObservableKind {
    None = 0,
    X = 1,
    XSquared = 2,
    Projector = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdiaSeries {
    Times = 0,
    Energies = 1,
    FValues = 2,
    Norms = 3,
}

/// Switching function. `linear != 0` selects a linear ramp and ignores the
/// tanh parameters.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiaSchedule {
    pub run_time: f64,
    pub steepness: f64,
    pub midpoint_fraction: f64,
    pub linear: i32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiaEvolution {
    pub dt: f64,
    pub sample_stride: usize,
    pub record_amplitudes: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AdiaTraceSummary {
    pub samples: usize,
    pub steps: usize,
    pub dt: f64,
    pub final_energy: f64,
    pub final_energy_variance: f64,
    pub max_norm_drift: f64,
    pub adiabatic: bool,
    pub norm_compliant: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AdiaEnergyEstimate {
    pub magnitude: f64,
    pub e_c: f64,
    pub inferred_energy: f64,
    pub resolution: f64,
    pub wrapped: bool,
    pub low_resolution: bool,
}

/// Opaque model handle.
pub struct AdiaModel {
    spec: ModelSpec,
}

/// Opaque trajectory handle.
pub struct AdiaTrace {
    trace: EvolutionTrace,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> AdiaStatus {
    match err {
        Error::DimensionMismatch { .. } | Error::InvalidDimension(_) => {
            AdiaStatus::DimensionMismatch
        }
        Error::Unstable { .. } => AdiaStatus::Unstable,
        Error::NonFinite { .. } => AdiaStatus::NonFinite,
        Error::NonAdiabatic { .. } => AdiaStatus::NonAdiabatic,
        Error::NonStationary { .. } => AdiaStatus::NonStationary,
        Error::NotHermitian { .. }
        | Error::ComplexExpectation { .. }
        | Error::ZeroNorm
        | Error::FidelityOutOfRange(_)
        | Error::Convergence(_)
        | Error::IterationCap(_) => AdiaStatus::Numerical,
        _ => AdiaStatus::InvalidArgument,
    }
}

enum Failure {
    Null(&'static str),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

/// Runs `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> AdiaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AdiaStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer passed for `{what}`"));
            AdiaStatus::NullPointer
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            AdiaStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn borrow_mut<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn write_slice(src: &[f64], buf: *mut f64, cap: usize) -> Result<(), Failure> {
    if buf.is_null() {
        return Err(Failure::Null("buffer"));
    }
    if cap < src.len() {
        return Err(Error::DimensionMismatch {
            expected: src.len(),
            found: cap,
        }
        .into());
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    Ok(())
}

fn schedule_of(s: &AdiaSchedule) -> adiaproj::Result<Schedule> {
    let shape = if s.linear != 0 {
        Shape::Linear
    } else {
        Shape::Tanh {
            steepness: s.steepness,
            midpoint_fraction: s.midpoint_fraction,
        }
    };
    Schedule::new(s.run_time, shape)
}

fn evolution_of(e: &AdiaEvolution) -> EvolutionConfig {
    EvolutionConfig {
        dt: e.dt,
        sample_stride: e.sample_stride,
        record_amplitudes: e.record_amplitudes,
    }
}

fn observable_of(kind: AdiaObservableKind, level: u32) -> Option<Observable> {
    match kind {
        AdiaObservableKind::None => None,
        AdiaObservableKind::X => Some(Observable::X),
        AdiaObservableKind::XSquared => Some(Observable::XSquared),
        AdiaObservableKind::Projector => Some(Observable::Projector(level as usize)),
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn adia_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `cap`). Returns the length needed including the NUL.
///
/// # Safety
/// `buf` must be null or valid for `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn adia_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len() + 1
    })
}

/// Defaults: tanh ramp, steepness 20, midpoint 0.5, the model's run time.
#[no_mangle]
pub extern "C" fn adia_schedule_default(kind: AdiaModelKind) -> AdiaSchedule {
    let run_time = match kind {
        AdiaModelKind::Psm => adiaproj::schedule::PSM_RUN_TIME,
        _ => adiaproj::schedule::DEFAULT_RUN_TIME,
    };
    AdiaSchedule {
        run_time,
        steepness: adiaproj::schedule::DEFAULT_STEEPNESS,
        midpoint_fraction: adiaproj::schedule::DEFAULT_MIDPOINT,
        linear: 0,
    }
}

#[no_mangle]
pub extern "C" fn adia_evolution_default(kind: AdiaModelKind) -> AdiaEvolution {
    let cfg = EvolutionConfig::default_for(match kind {
        AdiaModelKind::Dho => ModelKind::Dho,
        AdiaModelKind::Aho => ModelKind::Aho,
        AdiaModelKind::Psm => ModelKind::Psm,
    });
    AdiaEvolution {
        dt: cfg.dt,
        sample_stride: cfg.sample_stride,
        record_amplitudes: cfg.record_amplitudes,
    }
}

/// Creates a model. `spacing` is used by the scattering model only.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn adia_model_new(
    kind: AdiaModelKind,
    qubits: u32,
    coupling: f64,
    spacing: f64,
    e_c: f64,
    out: *mut *mut AdiaModel,
) -> AdiaStatus {
    guard(|| {
        let out = borrow_mut(out, "out")?;
        *out = ptr::null_mut();
        let model = match kind {
            AdiaModelKind::Dho => Model::Dho { coupling },
            AdiaModelKind::Aho => Model::Aho { coupling },
            AdiaModelKind::Psm => Model::Psm { coupling, spacing },
        };
        let spec = ModelSpec::new(model, qubits).with_offset(e_c);
        spec.validate()?;
        *out = Box::into_raw(Box::new(AdiaModel { spec }));
        Ok(())
    })
}

/// # Safety
/// `model` must be null or a handle from [`adia_model_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn adia_model_free(model: *mut AdiaModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Adds `alpha * O` to the switched part; `AdiaObservableKind::None` removes it.
///
/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn adia_model_set_observable(
    model: *mut AdiaModel,
    kind: AdiaObservableKind,
    level: u32,
    alpha: f64,
) -> AdiaStatus {
    guard(|| {
        let m = borrow_mut(model, "model")?;
        let next = match observable_of(kind, level) {
            Some(o) => m.spec.with_observable(o, alpha),
            None => m.spec.without_observable(),
        };
        next.validate()?;
        m.spec = next;
        Ok(())
    })
}

/// Basis dimension `2^N`, or 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn adia_model_dim(model: *const AdiaModel) -> usize {
    model.as_ref().map_or(0, |m| m.spec.dim())
}

/// Integrates from the basis state `|start_level>` to the end of the schedule.
///
/// # Safety
/// All pointers must be valid; `out` receives a handle to free with
/// [`adia_trace_free`].
#[no_mangle]
pub unsafe extern "C" fn adia_propagate(
    model: *const AdiaModel,
    schedule: *const AdiaSchedule,
    evolution: *const AdiaEvolution,
    start_level: u32,
    out: *mut *mut AdiaTrace,
) -> AdiaStatus {
    guard(|| {
        let out = borrow_mut(out, "out")?;
        *out = ptr::null_mut();
        let m = borrow(model, "model")?;
        let s = schedule_of(borrow(schedule, "schedule")?)?;
        let e = evolution_of(borrow(evolution, "evolution")?);
        let psi0 = QuantumState::basis(m.spec.dim(), start_level as usize)?;
        let trace = propagate(&m.spec, &s, &e, &psi0)?;
        *out = Box::into_raw(Box::new(AdiaTrace { trace }));
        Ok(())
    })
}

/// # Safety
/// `trace` must be null or a handle from [`adia_propagate`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn adia_trace_free(trace: *mut AdiaTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Number of recorded samples, or 0 for a null handle.
///
/// # Safety
/// `trace` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn adia_trace_len(trace: *const AdiaTrace) -> usize {
    trace.as_ref().map_or(0, |t| t.trace.len())
}

/// # Safety
/// `trace` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn adia_trace_summary(
    trace: *const AdiaTrace,
    out: *mut AdiaTraceSummary,
) -> AdiaStatus {
    guard(|| {
        let t = &borrow(trace, "trace")?.trace;
        let out = borrow_mut(out, "out")?;
        *out = AdiaTraceSummary {
            samples: t.len(),
            steps: t.steps,
            dt: t.dt,
            final_energy: t.final_energy(),
            final_energy_variance: t.final_energy_variance,
            max_norm_drift: t.max_norm_drift,
            adiabatic: t.is_adiabatic(),
            norm_compliant: t.norm_compliant(),
        };
        Ok(())
    })
}

/// Copies one sampled series into `buf`, which must hold
/// [`adia_trace_len`] values.
///
/// # Safety
/// `trace` must be live and `buf` valid for `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn adia_trace_series(
    trace: *const AdiaTrace,
    which: AdiaSeries,
    buf: *mut f64,
    cap: usize,
) -> AdiaStatus {
    guard(|| {
        let t = &borrow(trace, "trace")?.trace;
        let src = match which {
            AdiaSeries::Times => &t.times,
            AdiaSeries::Energies => &t.energies,
            AdiaSeries::FValues => &t.f_values,
            AdiaSeries::Norms => &t.norms,
        };
        write_slice(src, buf, cap)
    })
}

/// `|a_n|^2` of the final state; `buf` must hold the model dimension.
///
/// # Safety
/// `trace` must be live and `buf` valid for `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn adia_trace_final_probabilities(
    trace: *const AdiaTrace,
    buf: *mut f64,
    cap: usize,
) -> AdiaStatus {
    guard(|| {
        let t = &borrow(trace, "trace")?.trace;
        write_slice(&t.final_state.probabilities(), buf, cap)
    })
}

/// `<H0 + H1 + alpha O>` in the final state, without the offset.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn adia_rayleigh_energy(
    model: *const AdiaModel,
    trace: *const AdiaTrace,
    out: *mut f64,
) -> AdiaStatus {
    guard(|| {
        let m = borrow(model, "model")?;
        let t = &borrow(trace, "trace")?.trace;
        let out = borrow_mut(out, "out")?;
        *out = rayleigh_energy(&m.spec, &t.final_state)?;
        Ok(())
    })
}

/// Phase-estimation readout of the trace's final state.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn adia_measure_energy(
    model: *const AdiaModel,
    trace: *const AdiaTrace,
    window: f64,
    dt: f64,
    out: *mut AdiaEnergyEstimate,
) -> AdiaStatus {
    guard(|| {
        let m = borrow(model, "model")?;
        let t = &borrow(trace, "trace")?.trace;
        let out = borrow_mut(out, "out")?;
        let est = measure_energy(&m.spec, &t.final_state, window, dt)?;
        *out = AdiaEnergyEstimate {
            magnitude: est.magnitude,
            e_c: est.e_c,
            inferred_energy: est.inferred_energy,
            resolution: est.resolution,
            wrapped: est.wrapped,
            low_resolution: est.low_resolution,
        };
        Ok(())
    })
}

/// Hellmann-Feynman expectation of an observable in the adiabatic
/// continuation of `|level>`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn adia_hf_expectation(
    model: *const AdiaModel,
    observable: AdiaObservableKind,
    projector_level: u32,
    alpha_step: f64,
    schedule: *const AdiaSchedule,
    evolution: *const AdiaEvolution,
    level: u32,
    out: *mut f64,
) -> AdiaStatus {
    guard(|| {
        let m = borrow(model, "model")?;
        let s = schedule_of(borrow(schedule, "schedule")?)?;
        let e = evolution_of(borrow(evolution, "evolution")?);
        let out = borrow_mut(out, "out")?;
        let obs = observable_of(observable, projector_level)
            .ok_or_else(|| Error::InvalidRequest("an observable is required".into()))?;
        let req = HfRequest::new(m.spec.without_observable(), obs)
            .with_alpha_step(alpha_step)
            .with_level(level as usize);
        *out = expectation_hf(&req, &s, &e)?.value;
        Ok(())
    })
}

/// Lowest eigenvalue of the final Hamiltonian minus the offset, by dense
/// diagonalization.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn adia_oracle_ground_energy(
    model: *const AdiaModel,
    out: *mut f64,
) -> AdiaStatus {
    guard(|| {
        let m = borrow(model, "model")?;
        let out = borrow_mut(out, "out")?;
        *out = diagonalize(&assemble(&m.spec, 1.0)?)?.ground_energy() - m.spec.e_c;
        Ok(())
    })
}

/// Pointer to a static description of `status`.
#[no_mangle]
pub extern "C" fn adia_status_name(status: AdiaStatus) -> *const c_char {
    let s: &'static CStr = match status {
        AdiaStatus::Ok => c"ok",
        AdiaStatus::InvalidArgument => c"invalid argument",
        AdiaStatus::NullPointer => c"null pointer",
        AdiaStatus::DimensionMismatch => c"dimension mismatch",
        AdiaStatus::Unstable => c"unstable time step",
        AdiaStatus::NonFinite => c"non-finite amplitudes",
        AdiaStatus::NonAdiabatic => c"evolution not adiabatic",
        AdiaStatus::NonStationary => c"state not stationary",
        AdiaStatus::Numerical => c"numerical failure",
        AdiaStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}
