//! Property tests for the invariants each module promises.

use std::f64::consts::PI;

use proptest::prelude::*;

use adiaproj::evolve::{propagate, EvolutionConfig};
use adiaproj::hf::{expectation_hf, HfRequest};
use adiaproj::linalg::{inner, HermitianOperator, QuantumState, C64};
use adiaproj::models::{
    assemble, build_h0, build_h1, build_observable, build_quartic, build_x,
    dho_exact_ground_energy, ModelSpec, Observable,
};
use adiaproj::oracle::{default_imaginary_step, diagonalize, imaginary_time_ground};
use adiaproj::readout::measure_energy;
use adiaproj::schedule::{Schedule, Shape, DEFAULT_RUN_TIME};

fn state(dim: usize) -> impl Strategy<Value = QuantumState> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim)
        .prop_filter("nonzero", |v| {
            v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3)
        })
        .prop_map(|v| {
            let amps = v.into_iter().map(|(a, b)| C64::new(a, b)).collect();
            QuantumState::from_amplitudes(amps)
                .unwrap()
                .normalized()
                .unwrap()
        })
}

fn hermitian(dim: usize) -> impl Strategy<Value = HermitianOperator> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), dim * dim).prop_map(move |v| {
        let mut m = vec![C64::new(0.0, 0.0); dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                let (a, b) = v[r * dim + c];
                if r == c {
                    m[r * dim + c] = C64::new(a, 0.0);
                } else if r < c {
                    m[r * dim + c] = C64::new(a, b);
                    m[c * dim + r] = C64::new(a, -b);
                }
            }
        }
        HermitianOperator::dense_complex(dim, m).unwrap()
    })
}

fn banded(dim: usize, width: usize) -> impl Strategy<Value = HermitianOperator> {
    prop::collection::vec(-3.0f64..3.0, dim * (width + 1)).prop_map(move |v| {
        let diagonals = (0..=width)
            .map(|k| (0..dim - k).map(|i| v[k * dim + i]).collect())
            .collect();
        HermitianOperator::banded(dim, diagonals).unwrap()
    })
}

fn max_diff(a: &QuantumState, b: &QuantumState) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn spec_strategy() -> impl Strategy<Value = ModelSpec> {
    prop_oneof![
        (2u32..=5, -2.0f64..2.0).prop_map(|(n, l)| ModelSpec::dho(n, l)),
        (2u32..=5, 0.0f64..2.0).prop_map(|(n, l)| ModelSpec::aho(n, l)),
        (2u32..=6, -2.0f64..2.0, 0.05f64..0.5).prop_map(|(n, g, d)| ModelSpec::psm(n, g, d)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expectation_is_linear((a, b, psi) in (hermitian(8), hermitian(8), state(8))) {
        let sum = a.add(&b).unwrap();
        let lhs = sum.expectation(&psi).unwrap();
        let rhs = a.expectation(&psi).unwrap() + b.expectation(&psi).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12, "{lhs} vs {rhs}");
    }

    #[test]
    fn apply_is_linear((a, psi, phi, c) in (hermitian(8), state(8), state(8), -2.0f64..2.0)) {
        let mix: Vec<C64> = psi.amplitudes().iter().zip(phi.amplitudes())
            .map(|(x, y)| x + y * c).collect();
        let lhs = a.apply(&QuantumState::from_amplitudes(mix).unwrap()).unwrap();
        let (ap, aq) = (a.apply(&psi).unwrap(), a.apply(&phi).unwrap());
        let rhs: Vec<C64> = ap.amplitudes().iter().zip(aq.amplitudes())
            .map(|(x, y)| x + y * c).collect();
        prop_assert!(max_diff(&lhs, &QuantumState::from_amplitudes(rhs).unwrap()) < 1e-12);
    }

    #[test]
    fn banded_matches_dense((op, psi) in (2usize..5).prop_flat_map(|w| (banded(16, w), state(16)))) {
        let dense = op.to_dense();
        prop_assert!(max_diff(&op.apply(&psi).unwrap(), &dense.apply(&psi).unwrap()) <= 1e-14);
        prop_assert!((op.expectation(&psi).unwrap() - dense.expectation(&psi).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn inner_product_symmetry((psi, phi) in (state(16), state(16))) {
        let a = inner(&psi, &phi).unwrap();
        let b = inner(&phi, &psi).unwrap();
        prop_assert!((a - b.conj()).norm() < 1e-15);
        prop_assert!((inner(&psi, &psi).unwrap().norm() - psi.norm_sqr()).abs() < 1e-14);
    }

    #[test]
    fn model_builders_are_exactly_hermitian(spec in spec_strategy()) {
        prop_assert!(build_h0(&spec).unwrap().check_hermitian(0.0).is_ok());
        prop_assert!(build_h1(&spec).unwrap().check_hermitian(0.0).is_ok());
        for f in [0.0, 0.3, 1.0] {
            prop_assert!(assemble(&spec, f).unwrap().check_hermitian(0.0).is_ok());
        }
        for obs in [Observable::X, Observable::XSquared, Observable::Projector(1)] {
            prop_assert!(build_observable(obs, spec.dim()).unwrap().check_hermitian(0.0).is_ok());
        }
    }

    #[test]
    fn quartic_interior_matches_x_to_the_fourth(n in 4u32..=6, lambda in 0.1f64..3.0) {
        let dim = 1usize << n;
        let analytic = build_quartic(dim).unwrap().scaled(lambda);
        let x2 = build_x(dim).unwrap().square();
        let x4 = x2.square().scaled(lambda);
        for r in 0..=(dim - 5) {
            for c in 0..=(dim - 5) {
                let (a, b) = (analytic.get(r, c).re, x4.get(r, c).re);
                prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "({r},{c}) {a} {b}");
            }
        }
    }

    #[test]
    fn displaced_oscillator_energy(n in 5u32..=6, lambda in -1.5f64..1.5, e_c in 0.0f64..2.0) {
        let spec = ModelSpec::dho(n, lambda).with_offset(e_c);
        let d = diagonalize(&assemble(&spec, 1.0).unwrap()).unwrap();
        prop_assert!((d.ground_energy() - e_c - dho_exact_ground_energy(lambda)).abs() < 1e-8);
    }

    #[test]
    fn scattering_bound_state(g in prop_oneof![-3.0f64..-1e-3, 0.0f64..3.0], n in 3u32..=6) {
        let spec = ModelSpec::psm(n, g, 10.0 / 64.0);
        let d = diagonalize(&assemble(&spec, 1.0).unwrap()).unwrap();
        let expected = usize::from(g < 0.0);
        prop_assert_eq!(d.count_below(0.0), expected);
        if g >= 0.0 {
            prop_assert!(d.ground_energy() >= 0.0);
        }
    }

    #[test]
    fn oracle_invariants(spec in spec_strategy()) {
        let h = assemble(&spec, 1.0).unwrap();
        let d = diagonalize(&h).unwrap();
        prop_assert!(d.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(d.orthogonality <= 1e-10);
        let dim = spec.dim();
        for r in 0..dim {
            for c in 0..dim {
                let rebuilt: f64 = (0..dim)
                    .map(|k| d.eigenvalues[k] * d.eigenvectors[k][r] * d.eigenvectors[k][c])
                    .sum();
                prop_assert!((rebuilt - h.get(r, c).re).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn schedule_is_monotone(
        run_time in 1.0f64..2000.0,
        steepness in 20.0f64..40.0,
        linear in any::<bool>(),
    ) {
        let shape = if linear {
            Shape::Linear
        } else {
            Shape::Tanh { steepness, midpoint_fraction: 0.5 }
        };
        let s = Schedule::new(run_time, shape).unwrap();
        let grid: Vec<f64> = (0..=1000)
            .map(|k| s.evaluate(run_time * k as f64 / 1000.0).unwrap())
            .collect();
        prop_assert!(grid.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(grid[0] <= 1e-8 && 1.0 - grid[1000] <= 1e-8);
        prop_assert!(s.evaluate(run_time * 1.001).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn imaginary_time_agrees_with_diagonalization(spec in spec_strategy()) {
        let h = assemble(&spec, 1.0).unwrap();
        let exact = diagonalize(&h).unwrap().ground_energy();
        let start = QuantumState::uniform(spec.dim()).unwrap();
        let (e, _) = imaginary_time_ground(&h, &start, 4.0 * default_imaginary_step(&h), 1e-15)
            .unwrap();
        prop_assert!((e - exact).abs() <= 1e-8, "{e} vs {exact}");
    }

    #[test]
    fn trace_shape(spec in spec_strategy(), run_time in 1.0f64..20.0, stride in 1usize..50) {
        let s = Schedule::tanh(run_time).unwrap();
        let cfg = EvolutionConfig::new(1e-3).with_stride(stride);
        let dt_ok = adiaproj::evolve::check_stability(
            &adiaproj::models::HamiltonianParts::new(&spec).unwrap(), cfg.dt).is_ok();
        prop_assume!(dt_ok);
        let t = propagate(&spec, &s, &cfg, &QuantumState::basis(spec.dim(), 0).unwrap()).unwrap();
        prop_assert!(t.times.len() == t.energies.len()
            && t.times.len() == t.f_values.len()
            && t.times.len() == t.norms.len());
        prop_assert!(t.times.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(*t.times.last().unwrap(), run_time);
        prop_assert!(t.max_norm_drift <= 1e-8);
        prop_assert!(t.norm_compliant());
    }

    #[test]
    fn offset_only_rotates_phases(lambda in -1.5f64..1.5, e_c in 0.1f64..2.0) {
        let s = Schedule::tanh(30.0).unwrap();
        let cfg = EvolutionConfig::new(1e-3).with_stride(1000);
        let psi0 = QuantumState::basis(16, 0).unwrap();
        let a = propagate(&ModelSpec::dho(4, lambda), &s, &cfg, &psi0).unwrap();
        let b = propagate(&ModelSpec::dho(4, lambda).with_offset(e_c), &s, &cfg, &psi0).unwrap();
        for (x, y) in a.energies.iter().zip(&b.energies) {
            prop_assert!((x - y).abs() < 1e-9);
        }
        for (x, y) in a.final_state.amplitudes().iter().zip(b.final_state.amplitudes()) {
            prop_assert!((x.norm() - y.norm()).abs() < 1e-9);
        }
    }

    #[test]
    fn readout_offset_is_linear(lambda in -1.0f64..1.0, e_c in 0.3f64..1.5, shift in 0.1f64..1.0) {
        // Both offsets keep E + E_c > 0 since E0 >= 0.5 - lambda^2/2 >= 0.
        let spec = ModelSpec::dho(4, lambda).with_offset(e_c);
        let ground = diagonalize(&assemble(&spec, 1.0).unwrap()).unwrap().state(0);
        let window = 40.0 * PI;
        let a = measure_energy(&spec, &ground, window, 1e-3).unwrap();
        let b = measure_energy(&spec.with_offset(e_c + shift), &ground, window, 1e-3).unwrap();
        prop_assert!((b.magnitude - a.magnitude - shift).abs() < 1e-9);
        // Sign trick: the offset exceeds |E0| so the inferred energy is exact.
        prop_assert!((a.inferred_energy - dho_exact_ground_energy(lambda)).abs() < 1e-6);
    }

    #[test]
    fn sign_trick_on_negative_ground_states(lambda in 1.1f64..1.8) {
        let e0 = dho_exact_ground_energy(lambda);
        let spec = ModelSpec::dho(5, lambda).with_offset(e0.abs() + 0.5);
        let ground = diagonalize(&assemble(&spec, 1.0).unwrap()).unwrap().state(0);
        let est = measure_energy(&spec, &ground, 40.0 * PI, 1e-3).unwrap();
        prop_assert!((est.inferred_energy - e0).abs() < 1e-6);
        let bare = measure_energy(&spec.with_offset(0.0), &ground, 40.0 * PI, 1e-3).unwrap();
        prop_assert!((bare.inferred_energy - e0.abs()).abs() < 1e-6);
    }
}

fn hf_setup() -> (Schedule, EvolutionConfig) {
    (
        Schedule::tanh(DEFAULT_RUN_TIME).unwrap(),
        EvolutionConfig::new(2e-3).with_stride(10_000),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn hf_position_is_odd_in_coupling(lambda in 0.1f64..1.0) {
        let (s, cfg) = hf_setup();
        let run = |l: f64| {
            expectation_hf(&HfRequest::new(ModelSpec::dho(3, l), Observable::X), &s, &cfg)
                .unwrap()
                .value
        };
        let (p, m) = (run(lambda), run(-lambda));
        prop_assert!((p + m).abs() <= 1e-6, "{p} {m}");
        prop_assert!((p + lambda).abs() <= 1e-4);
    }

    #[test]
    fn hf_agrees_with_oracle(spec in prop_oneof![
        (0.0f64..1.0).prop_map(|l| (ModelSpec::dho(3, l), Observable::XSquared)),
        (0.2f64..1.5).prop_map(|l| (ModelSpec::aho(3, l), Observable::X)),
        (-1.0f64..1.0).prop_map(|g| (ModelSpec::psm(3, g, 0.5), Observable::Projector(0))),
    ]) {
        let (spec, obs) = spec;
        let s = if spec.kind() == adiaproj::ModelKind::Psm {
            Schedule::tanh(600.0).unwrap()
        } else {
            hf_setup().0
        };
        let cfg = hf_setup().1;
        let step = 1e-3;
        let r = expectation_hf(&HfRequest::new(spec, obs).with_alpha_step(step), &s, &cfg).unwrap();
        prop_assert_eq!(r.value, (r.e_plus - r.e_minus) / (2.0 * step));
        let d = diagonalize(&assemble(&spec, 1.0).unwrap()).unwrap();
        let exact = build_observable(obs, spec.dim()).unwrap().expectation(&d.state(0)).unwrap();
        prop_assert!((r.value - exact).abs() <= 1e-4_f64.max(10.0 * step * step),
            "{} vs {exact}", r.value);
    }
}

#[test]
fn hf_error_is_second_order() {
    let (s, cfg) = hf_setup();
    let value = |step: f64| {
        expectation_hf(
            &HfRequest::new(ModelSpec::dho(3, 1.0), Observable::XSquared).with_alpha_step(step),
            &s,
            &cfg,
        )
        .unwrap()
        .value
    };
    let (v1, v2, v3) = (value(0.04), value(0.02), value(0.01));
    let ratio = (v1 - v2) / (v2 - v3);
    assert!((ratio - 4.0).abs() < 0.5, "Richardson ratio {ratio}");
    // C = d / (alpha^2 (1 - 1/4)) is the same on both intervals.
    let c1 = (v1 - v2) / (0.04f64.powi(2) * 0.75);
    let c2 = (v2 - v3) / (0.02f64.powi(2) * 0.75);
    assert!((c1 / c2 - 1.0).abs() < 0.15, "{c1} {c2}");
}

#[test]
fn energy_settles_once_the_ramp_is_off() {
    let spec = ModelSpec::dho(4, 0.5);
    let s = Schedule::tanh(DEFAULT_RUN_TIME).unwrap();
    let cfg = EvolutionConfig::new(1e-3).with_stride(100);
    let t = propagate(&spec, &s, &cfg, &QuantumState::basis(16, 0).unwrap()).unwrap();
    let n = t.energies.len();
    let tail = (n / 100).max(2);
    let last = t.energies[n - 1];
    for e in &t.energies[n - tail..] {
        assert!((last - e).abs() <= 1e-9, "{last} vs {e}");
    }
}
