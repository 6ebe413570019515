use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use adiaproj_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    unsafe { adia_last_error_message(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }
        .to_string_lossy()
        .into_owned()
}

fn model(kind: AdiaModelKind, qubits: u32, coupling: f64, e_c: f64) -> *mut AdiaModel {
    let mut m = ptr::null_mut();
    let st = unsafe { adia_model_new(kind, qubits, coupling, 10.0 / 64.0, e_c, &mut m) };
    assert_eq!(st, AdiaStatus::Ok, "{}", last_error());
    m
}

#[test]
fn oscillator_round_trip() {
    let m = model(AdiaModelKind::Dho, 3, 1.0, 1.0);
    assert_eq!(unsafe { adia_model_dim(m) }, 8);
    let sched = adia_schedule_default(AdiaModelKind::Dho);
    let mut evo = adia_evolution_default(AdiaModelKind::Dho);
    evo.dt = 2e-3;
    evo.sample_stride = 1000;

    let mut t = ptr::null_mut();
    assert_eq!(
        unsafe { adia_propagate(m, &sched, &evo, 0, &mut t) },
        AdiaStatus::Ok
    );
    let mut summary = AdiaTraceSummary::default();
    assert_eq!(
        unsafe { adia_trace_summary(t, &mut summary) },
        AdiaStatus::Ok
    );
    assert!(summary.adiabatic && summary.norm_compliant);
    assert_eq!(summary.samples, unsafe { adia_trace_len(t) });

    let mut times = vec![0.0; summary.samples];
    let st = unsafe { adia_trace_series(t, AdiaSeries::Times, times.as_mut_ptr(), times.len()) };
    assert_eq!(st, AdiaStatus::Ok);
    assert_eq!(times[0], 0.0);
    assert!((times.last().unwrap() - sched.run_time).abs() < 1e-9);
    let short = unsafe { adia_trace_series(t, AdiaSeries::Norms, times.as_mut_ptr(), 1) };
    assert_eq!(short, AdiaStatus::DimensionMismatch);

    let mut probs = vec![0.0; 8];
    assert_eq!(
        unsafe { adia_trace_final_probabilities(t, probs.as_mut_ptr(), 8) },
        AdiaStatus::Ok
    );
    assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);

    let (mut e, mut oracle) = (0.0, 0.0);
    assert_eq!(
        unsafe { adia_rayleigh_energy(m, t, &mut e) },
        AdiaStatus::Ok
    );
    assert_eq!(
        unsafe { adia_oracle_ground_energy(m, &mut oracle) },
        AdiaStatus::Ok
    );
    assert!((e - oracle).abs() < 1e-6, "{e} {oracle}");

    let mut est = AdiaEnergyEstimate::default();
    let st = unsafe { adia_measure_energy(m, t, 40.0 * std::f64::consts::PI, 1e-3, &mut est) };
    assert_eq!(st, AdiaStatus::Ok, "{}", last_error());
    assert!((est.inferred_energy - oracle).abs() < 1e-5);

    let mut x = 0.0;
    let st =
        unsafe { adia_hf_expectation(m, AdiaObservableKind::X, 0, 1e-3, &sched, &evo, 0, &mut x) };
    assert_eq!(st, AdiaStatus::Ok, "{}", last_error());
    assert!((x + 1.0).abs() < 1e-4, "{x}");

    unsafe {
        adia_trace_free(t);
        adia_model_free(m);
    }
}

#[test]
fn errors_map_to_codes() {
    let mut m = ptr::null_mut();
    let st = unsafe { adia_model_new(AdiaModelKind::Aho, 4, -1.0, 0.0, 0.0, &mut m) };
    assert_eq!(st, AdiaStatus::InvalidArgument);
    assert!(m.is_null());
    assert!(last_error().contains("λ ≥ 0"));

    let st = unsafe { adia_model_new(AdiaModelKind::Dho, 4, 0.0, 0.0, 0.0, ptr::null_mut()) };
    assert_eq!(st, AdiaStatus::NullPointer);

    let m = model(AdiaModelKind::Aho, 6, 2.0, 0.0);
    let sched = adia_schedule_default(AdiaModelKind::Aho);
    let mut evo = adia_evolution_default(AdiaModelKind::Aho);
    evo.dt = 0.01;
    let mut t = ptr::null_mut();
    let st = unsafe { adia_propagate(m, &sched, &evo, 0, &mut t) };
    assert_eq!(st, AdiaStatus::Unstable);
    assert!(t.is_null());

    let st = unsafe { adia_model_set_observable(m, AdiaObservableKind::Projector, 64, 0.1) };
    assert_eq!(st, AdiaStatus::InvalidArgument);
    let st = unsafe { adia_model_set_observable(m, AdiaObservableKind::XSquared, 0, 0.1) };
    assert_eq!(st, AdiaStatus::Ok);

    let mut e = 0.0;
    assert_eq!(
        unsafe { adia_rayleigh_energy(m, ptr::null(), &mut e) },
        AdiaStatus::NullPointer
    );
    unsafe {
        adia_model_free(m);
        adia_model_free(ptr::null_mut());
        adia_trace_free(ptr::null_mut());
    }
    assert_eq!(unsafe { adia_trace_len(ptr::null()) }, 0);
}

#[test]
fn sudden_switch_is_non_adiabatic() {
    let m = model(AdiaModelKind::Dho, 3, 1.0, 0.0);
    let sched = AdiaSchedule {
        run_time: 0.5,
        steepness: 20.0,
        midpoint_fraction: 0.5,
        linear: 0,
    };
    let evo = AdiaEvolution {
        dt: 1e-3,
        sample_stride: 100,
        record_amplitudes: false,
    };
    let mut v = 0.0;
    let st =
        unsafe { adia_hf_expectation(m, AdiaObservableKind::X, 0, 1e-3, &sched, &evo, 0, &mut v) };
    assert_eq!(st, AdiaStatus::NonAdiabatic);
    unsafe { adia_model_free(m) };
}

#[test]
fn status_names_and_version() {
    let name = unsafe { CStr::from_ptr(adia_status_name(AdiaStatus::NonStationary)) };
    assert_eq!(name.to_str().unwrap(), "state not stationary");
    let v = unsafe { CStr::from_ptr(adia_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/adiaproj.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in [
        "adia_model_new",
        "adia_propagate",
        "adia_hf_expectation",
        "ADIA_STATUS_PANIC",
    ] {
        assert!(text.contains(sym), "{sym} missing from header");
    }
    let Ok(out) = Command::new("cc")
        .args(["-fsyntax-only", "-std=c99", "-Wall", "-Werror", "-x", "c"])
        .arg(&header)
        .output()
    else {
        eprintln!("no C compiler; skipped syntax check");
        return;
    };
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
