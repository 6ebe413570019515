//! Named experiments. Each one fills an [`Outcome`] with finished tables as
//! it goes, so a failure part-way still leaves the completed deliverables.

use std::f64::consts::SQRT_2;

use rayon::prelude::*;

use super::config::{Experiment, ExperimentConfig};
use crate::evolve::{propagate, EvolutionTrace};
use crate::hf::{clamp_fidelity, expectation_hf, HfRequest, HfResult};
use crate::linalg::QuantumState;
use crate::models::{assemble, build_observable, dho_exact_ground_energy, ModelSpec, Observable};
use crate::oracle::{diagonalize, SpectralDecomposition};
use crate::readout::{measure_energy, rayleigh_energy};
use crate::schedule::GROUND_PHASE_PERIOD;
use crate::{Error, Result};

/// One CSV/JSON deliverable.
#[derive(Debug, Clone, PartialEq)]
pub struct DataTable {
    pub name: String,
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl DataTable {
    fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            comments: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn with_columns(name: &str, columns: Vec<String>) -> Self {
        Self {
            name: name.to_string(),
            comments: Vec::new(),
            columns,
            rows: Vec::new(),
        }
    }

    fn comment(mut self, line: impl Into<String>) -> Self {
        self.comments.push(line.into());
        self
    }
}

/// Health flags of one trajectory (or a ±α pair of them).
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub label: String,
    pub adiabatic: bool,
    pub norm_compliant: bool,
    pub final_energy_variance: f64,
    pub max_norm_drift: f64,
    /// Overlap with the oracle eigenvector, where one was computed.
    pub fidelity: Option<f64>,
}

impl RunRecord {
    fn from_trace(label: String, trace: &EvolutionTrace, fidelity: Option<f64>) -> Self {
        Self {
            label,
            adiabatic: trace.is_adiabatic(),
            norm_compliant: trace.norm_compliant(),
            final_energy_variance: trace.final_energy_variance,
            max_norm_drift: trace.max_norm_drift,
            fidelity,
        }
    }

    fn from_hf(label: String, r: &HfResult) -> Self {
        let variance = r.plus_variance.max(r.minus_variance);
        Self {
            label,
            adiabatic: variance <= crate::evolve::ADIABATIC_VARIANCE_TOL,
            norm_compliant: r.max_norm_drift <= crate::evolve::NORM_DRIFT_TOL,
            final_energy_variance: variance,
            max_norm_drift: r.max_norm_drift,
            fidelity: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub tables: Vec<DataTable>,
    pub runs: Vec<RunRecord>,
}

pub fn execute(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    match cfg.experiment {
        Experiment::Fig1 => fig1(cfg, out),
        Experiment::Fig2 => fig2(cfg, out),
        Experiment::Fig3 => fig3(cfg, out),
        Experiment::Fig4 => fig4(cfg, out),
        Experiment::Fig5 => fig5(cfg, out),
        Experiment::DhoEnergy | Experiment::AhoEnergy => energy_readout(cfg, out),
        Experiment::PsmSpectrum => psm_spectrum(cfg, out),
        Experiment::Custom => custom(cfg, out),
    }
}

/// Results in input order, plus the first error if any point failed.
fn split<T>(results: Vec<Result<T>>) -> (Vec<T>, Option<Error>) {
    let mut ok = Vec::with_capacity(results.len());
    let mut err = None;
    for r in results {
        match r {
            Ok(v) => ok.push(v),
            Err(e) => {
                err.get_or_insert(e);
            }
        }
    }
    (ok, err)
}

fn finish(err: Option<Error>) -> Result<()> {
    match err {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn start(dim: usize) -> Result<QuantumState> {
    QuantumState::basis(dim, 0)
}

fn oracle_at_end(spec: &ModelSpec) -> Result<SpectralDecomposition> {
    diagonalize(&assemble(spec, 1.0)?)
}

fn sweep_value(value: Option<f64>, spec: &ModelSpec) -> f64 {
    value.unwrap_or_else(|| spec.model.coupling())
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

// ---------------------------------------------------------------- fig1

const FIG1_PANELS: [(char, f64, f64); 5] = [
    ('a', 0.0, 0.0),
    ('b', 0.9, 0.0),
    ('c', 0.9, 0.25),
    ('d', SQRT_2, 0.0),
    ('e', SQRT_2, 1.0),
];

fn fig1(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let base = cfg.model;
    let results: Vec<Result<_>> = FIG1_PANELS
        .par_iter()
        .map(|&(panel, lambda, e_c)| {
            let spec = ModelSpec {
                model: base.model.with_coupling(lambda),
                e_c,
                ..base
            };
            let evo = cfg.evolution_for(&spec)?.recording();
            let trace = propagate(&spec, &cfg.schedule, &evo, &start(spec.dim())?)?;
            let series = crate::evolve::phase_trace(&trace, 0)?;
            let est = measure_energy(&spec, &trace.final_state, cfg.window, evo.dt)?;
            let fidelity = oracle_at_end(&spec)?.fidelity(0, &trace.final_state)?;
            Ok((panel, lambda, e_c, trace, series, est, fidelity))
        })
        .collect();
    let (ok, err) = split(results);

    let mut readout = DataTable::new(
        "fig1_readout",
        &[
            "panel",
            "lambda",
            "e_c",
            "magnitude",
            "inferred_energy",
            "exact_energy",
            "wrapped",
            "resolution",
        ],
    )
    .comment("panel index 0..4 corresponds to a..e")
    .comment("inferred_energy = magnitude - e_c when e_c > 0, else magnitude");
    for (i, (panel, lambda, e_c, trace, series, est, fidelity)) in ok.into_iter().enumerate() {
        let mut t = DataTable::new(&format!("fig1{panel}_trace"), &["t_over_t0", "re_a0"])
            .comment(format!("lambda = {lambda}, e_c = {e_c}, T0 = 4 pi"));
        t.rows = series
            .into_iter()
            .map(|(time, re)| vec![time / GROUND_PHASE_PERIOD, re])
            .collect();
        out.tables.push(t);
        readout.rows.push(vec![
            (FIG1_PANELS.iter().position(|p| p.0 == panel).unwrap_or(i)) as f64,
            lambda,
            e_c,
            est.magnitude,
            est.inferred_energy,
            dho_exact_ground_energy(lambda),
            flag(est.wrapped),
            est.resolution,
        ]);
        out.runs.push(RunRecord::from_trace(
            format!("fig1{panel} lambda={lambda} e_c={e_c}"),
            &trace,
            Some(fidelity),
        ));
    }
    out.tables.push(readout);
    finish(err)
}

// ---------------------------------------------------------------- fig2

fn poisson(mean: f64, n: usize) -> f64 {
    let log_p = -mean + n as f64 * mean.ln() - (1..=n).map(|k| (k as f64).ln()).sum::<f64>();
    if mean == 0.0 {
        if n == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        log_p.exp()
    }
}

fn fig2(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let spec = cfg.model;
    let dim = spec.dim();
    let run_time = cfg.schedule.run_time();
    let evo = cfg.evolution_for(&spec)?.recording();
    let trace = propagate(&spec, &cfg.schedule, &evo, &start(dim)?)?;
    let amps = trace
        .amplitudes
        .as_ref()
        .ok_or(Error::AmplitudesNotRecorded)?;

    let mut columns = vec!["t_over_tr".to_string()];
    columns.extend((0..dim).map(|n| format!("p{n}")));
    let mut probs = DataTable::with_columns("fig2_probabilities", columns);
    probs.rows = trace
        .times
        .iter()
        .zip(amps)
        .map(|(&t, a)| {
            let mut row = vec![t / run_time];
            row.extend(a.iter().map(|c| c.norm_sqr()));
            row
        })
        .collect();
    out.tables.push(probs);

    let mut energy = DataTable::new(
        "fig2_energy",
        &["t_over_tr", "f", "energy", "oracle_energy"],
    )
    .comment("energy = <H(t)> - e_c; oracle_energy is the lowest eigenvalue of H(f) - e_c");
    let oracle: Vec<Result<f64>> = trace
        .f_values
        .par_iter()
        .map(|&f| Ok(diagonalize(&assemble(&spec, f)?)?.ground_energy() - spec.e_c))
        .collect();
    for ((&t, &f), (&e, o)) in trace
        .times
        .iter()
        .zip(&trace.f_values)
        .zip(trace.energies.iter().zip(oracle))
    {
        energy.rows.push(vec![t / run_time, f, e, o?]);
    }
    out.tables.push(energy);

    let mean = spec.model.coupling().powi(2) / 2.0;
    let mut stats = DataTable::new("fig2_poisson", &["n", "probability", "poisson"])
        .comment(format!("poisson mean lambda^2 / 2 = {mean}"));
    let final_probs = trace.final_state.probabilities();
    stats.rows = final_probs
        .iter()
        .enumerate()
        .map(|(n, &p)| vec![n as f64, p, poisson(mean, n)])
        .collect();
    let tvd: f64 = 0.5
        * final_probs
            .iter()
            .enumerate()
            .map(|(n, &p)| (p - poisson(mean, n)).abs())
            .sum::<f64>();
    stats
        .comments
        .push(format!("total variation distance {tvd:.6e}"));
    out.tables.push(stats);

    let fidelity = oracle_at_end(&spec)?.fidelity(0, &trace.final_state)?;
    out.runs.push(RunRecord::from_trace(
        format!("fig2 lambda={}", spec.model.coupling()),
        &trace,
        Some(fidelity),
    ));
    Ok(())
}

// ---------------------------------------------------------------- fig3

/// `<x>` and `<x^2>` in the oracle ground state of `spec` at `f = 1`.
fn oracle_moments(spec: &ModelSpec) -> Result<(f64, f64, f64)> {
    let dec = oracle_at_end(spec)?;
    let psi = dec.state(0);
    let x = build_observable(Observable::X, spec.dim())?.expectation(&psi)?;
    let x2 = build_observable(Observable::XSquared, spec.dim())?.expectation(&psi)?;
    Ok((dec.ground_energy() - spec.e_c, x, x2))
}

fn hf_pair(cfg: &ExperimentConfig, spec: &ModelSpec) -> Result<(HfResult, HfResult)> {
    let evo = cfg.evolution_for(spec)?;
    let base = spec.without_observable();
    let (x, x2) = rayon::join(
        || {
            expectation_hf(
                &HfRequest::new(base, Observable::X).with_alpha_step(cfg.hf.alpha_step),
                &cfg.schedule,
                &evo,
            )
        },
        || {
            expectation_hf(
                &HfRequest::new(base, Observable::XSquared).with_alpha_step(cfg.hf.alpha_step),
                &cfg.schedule,
                &evo,
            )
        },
    );
    Ok((x?, x2?))
}

fn fig3(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let points = cfg.points();
    let alphas = if cfg.hf.alphas.is_empty() {
        vec![0.0]
    } else {
        cfg.hf.alphas.clone()
    };

    let energy_jobs: Vec<(f64, f64, ModelSpec)> = points
        .iter()
        .flat_map(|(v, s)| {
            alphas.iter().map(move |&a| {
                (
                    sweep_value(*v, s),
                    a,
                    s.with_observable(Observable::XSquared, a),
                )
            })
        })
        .collect();
    let results: Vec<Result<_>> = energy_jobs
        .par_iter()
        .map(|(v, a, spec)| {
            let evo = cfg.evolution_for(spec)?;
            let trace = propagate(spec, &cfg.schedule, &evo, &start(spec.dim())?)?;
            let energy = rayleigh_energy(spec, &trace.final_state)?;
            let dec = oracle_at_end(spec)?;
            let fidelity = dec.fidelity(0, &trace.final_state)?;
            Ok((
                *v,
                *a,
                energy,
                dec.ground_energy() - spec.e_c,
                trace,
                fidelity,
            ))
        })
        .collect();
    let (ok, err) = split(results);
    let mut energy = DataTable::new(
        "fig3_energy",
        &["lambda", "alpha", "energy", "oracle_energy"],
    )
    .comment("final Hamiltonian H0 + lambda x + alpha x^2");
    for (v, a, e, o, trace, fid) in ok {
        energy.rows.push(vec![v, a, e, o]);
        out.runs.push(RunRecord::from_trace(
            format!("fig3 lambda={v} alpha={a}"),
            &trace,
            Some(fid),
        ));
    }
    out.tables.push(energy);
    if err.is_some() {
        return finish(err);
    }

    let results: Vec<Result<_>> = points
        .par_iter()
        .map(|(v, spec)| {
            let (x, x2) = hf_pair(cfg, spec)?;
            Ok((sweep_value(*v, spec), x, x2, oracle_moments(spec)?))
        })
        .collect();
    let (ok, err) = split(results);
    let mut hf = DataTable::new(
        "fig3_hf",
        &[
            "lambda",
            "x_hf",
            "x2_hf",
            "varx_hf",
            "x_oracle",
            "x2_oracle",
            "varx_oracle",
        ],
    )
    .comment(format!(
        "central difference with alpha_step = {}",
        cfg.hf.alpha_step
    ));
    for (v, x, x2, (_, ox, ox2)) in ok {
        hf.rows.push(vec![
            v,
            x.value,
            x2.value,
            x2.value - x.value * x.value,
            ox,
            ox2,
            ox2 - ox * ox,
        ]);
        out.runs
            .push(RunRecord::from_hf(format!("fig3 hf x lambda={v}"), &x));
        out.runs
            .push(RunRecord::from_hf(format!("fig3 hf x2 lambda={v}"), &x2));
    }
    out.tables.push(hf);
    finish(err)
}

// ---------------------------------------------------------------- fig4

fn fig4(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let points = cfg.points();
    let results: Vec<Result<_>> = points
        .par_iter()
        .map(|(v, spec)| {
            let v = sweep_value(*v, spec);
            let evo = cfg.evolution_for(spec)?;
            let (trace, hf) = rayon::join(
                || propagate(spec, &cfg.schedule, &evo, &start(spec.dim())?),
                || hf_pair(cfg, spec),
            );
            let trace = trace?;
            let (x, x2) = hf?;
            let energy = rayleigh_energy(spec, &trace.final_state)?;
            let dec = oracle_at_end(spec)?;
            let fidelity = dec.fidelity(0, &trace.final_state)?;
            let (oe, ox, ox2) = oracle_moments(spec)?;
            Ok((v, energy, oe, trace, fidelity, x, x2, ox2 - ox * ox, evo.dt))
        })
        .collect();
    let (ok, err) = split(results);
    let mut energy = DataTable::new(
        "fig4_energy",
        &[
            "lambda",
            "energy",
            "oracle_energy",
            "dt",
            "final_energy_variance",
        ],
    );
    let mut varx =
        DataTable::new("fig4_varx", &["lambda", "varx_hf", "varx_oracle"]).comment(format!(
            "<x^2> - <x>^2 from central differences, alpha_step = {}",
            cfg.hf.alpha_step
        ));
    for (v, e, oe, trace, fid, x, x2, ovar, dt) in ok {
        energy
            .rows
            .push(vec![v, e, oe, dt, trace.final_energy_variance]);
        varx.rows.push(vec![v, x2.value - x.value * x.value, ovar]);
        out.runs.push(RunRecord::from_trace(
            format!("fig4 lambda={v}"),
            &trace,
            Some(fid),
        ));
        out.runs
            .push(RunRecord::from_hf(format!("fig4 hf x lambda={v}"), &x));
        out.runs
            .push(RunRecord::from_hf(format!("fig4 hf x2 lambda={v}"), &x2));
    }
    out.tables.push(energy);
    out.tables.push(varx);
    finish(err)
}

// ---------------------------------------------------------------- fig5

fn fig5(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let points = cfg.points();
    let levels = cfg.hf.levels.clone();
    let jobs: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|p| levels.iter().map(move |&n| (p, n)))
        .collect();
    let results: Vec<Result<_>> = jobs
        .par_iter()
        .map(|&(p, n)| {
            let spec = points[p].1;
            let evo = cfg.evolution_for(&spec)?;
            let req = HfRequest::new(spec.without_observable(), Observable::Projector(n))
                .with_level(n)
                .with_alpha_step(cfg.hf.alpha_step);
            let r = expectation_hf(&req, &cfg.schedule, &evo)?;
            Ok((p, n, r, clamp_fidelity(r.value)?))
        })
        .collect();
    let (ok, err) = split(results);
    let oracles: Vec<Result<SpectralDecomposition>> =
        points.iter().map(|(_, s)| oracle_at_end(s)).collect();

    let mut level_cols = vec!["g".to_string(), "bound_states".to_string()];
    let mut fid_cols = vec!["g".to_string()];
    for n in &levels {
        level_cols.push(format!("e{n}"));
        level_cols.push(format!("e{n}_oracle"));
        fid_cols.push(format!("f{n}_hf"));
        fid_cols.push(format!("f{n}_oracle"));
    }
    let mut level_table = DataTable::with_columns("fig5_levels", level_cols)
        .comment("e_n is the midpoint of the two Hellmann-Feynman runs started from |n>");
    let mut fid_table =
        DataTable::with_columns("fig5_fidelity", fid_cols).comment("F_n(g) = |<E_n(g)|n>|^2");

    for (p, (v, spec)) in points.iter().enumerate() {
        let row_results: Vec<_> = ok.iter().filter(|r| r.0 == p).collect();
        if row_results.len() != levels.len() {
            continue;
        }
        let dec = match &oracles[p] {
            Ok(d) => d,
            Err(_) => continue,
        };
        let g = sweep_value(*v, spec);
        let mut lrow = vec![g, dec.count_below(0.0) as f64];
        let mut frow = vec![g];
        for (_, n, r, fid) in row_results {
            lrow.push(0.5 * (r.e_plus + r.e_minus));
            lrow.push(dec.eigenvalues[*n]);
            frow.push(*fid);
            frow.push(dec.fidelity(*n, &QuantumState::basis(spec.dim(), *n)?)?);
            out.runs
                .push(RunRecord::from_hf(format!("fig5 g={g} level={n}"), r));
        }
        level_table.rows.push(lrow);
        fid_table.rows.push(frow);
    }
    out.tables.push(level_table);
    out.tables.push(fid_table);
    if let Some(e) = oracles.into_iter().find_map(|r| r.err()) {
        return Err(e);
    }
    finish(err)
}

// ------------------------------------------------------- single families

fn energy_readout(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let (name, exact_col) = match cfg.experiment {
        Experiment::DhoEnergy => ("dho_energy", "exact_energy"),
        _ => ("aho_energy", "oracle_energy"),
    };
    let param = cfg.sweep.as_ref().map_or("lambda", |s| s.parameter.name());
    let points = cfg.points();
    let results: Vec<Result<_>> = points
        .par_iter()
        .map(|(v, spec)| {
            let evo = cfg.evolution_for(spec)?;
            let trace = propagate(spec, &cfg.schedule, &evo, &start(spec.dim())?)?;
            let est = measure_energy(spec, &trace.final_state, cfg.window, evo.dt)?;
            let dec = oracle_at_end(spec)?;
            let fid = dec.fidelity(0, &trace.final_state)?;
            let exact = match cfg.experiment {
                Experiment::DhoEnergy => dho_exact_ground_energy(spec.model.coupling()),
                _ => dec.ground_energy() - spec.e_c,
            };
            let e = rayleigh_energy(spec, &trace.final_state)?;
            Ok((sweep_value(*v, spec), spec.e_c, e, est, exact, trace, fid))
        })
        .collect();
    let (ok, err) = split(results);
    let mut t = DataTable::new(
        name,
        &[
            param,
            "e_c",
            "rayleigh_energy",
            "magnitude",
            "inferred_energy",
            exact_col,
            "wrapped",
            "resolution",
        ],
    )
    .comment(format!("readout window {}", cfg.window));
    for (v, e_c, e, est, exact, trace, fid) in ok {
        t.rows.push(vec![
            v,
            e_c,
            e,
            est.magnitude,
            est.inferred_energy,
            exact,
            flag(est.wrapped),
            est.resolution,
        ]);
        out.runs.push(RunRecord::from_trace(
            format!("{name} {param}={v}"),
            &trace,
            Some(fid),
        ));
    }
    out.tables.push(t);
    finish(err)
}

fn psm_spectrum(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let points = cfg.points();
    let dim = cfg.model.dim();
    let param = cfg.sweep.as_ref().map_or("g", |s| s.parameter.name());
    let mut columns = vec![param.to_string(), "bound_states".to_string()];
    columns.extend((0..dim).map(|n| format!("e{n}")));
    let mut t = DataTable::with_columns("psm_spectrum", columns)
        .comment("exact eigenvalues of H0 + H1, ascending");
    let results: Vec<Result<_>> = points
        .par_iter()
        .map(|(v, spec)| Ok((sweep_value(*v, spec), oracle_at_end(spec)?)))
        .collect();
    let (ok, err) = split(results);
    for (v, dec) in ok {
        let mut row = vec![v, dec.count_below(0.0) as f64];
        row.extend(dec.eigenvalues.iter().map(|e| e - cfg.model.e_c));
        t.rows.push(row);
    }
    out.tables.push(t);
    finish(err)
}

fn custom(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let param = cfg
        .sweep
        .as_ref()
        .map_or("coupling", |s| s.parameter.name());
    let points = cfg.points();
    let results: Vec<Result<_>> = points
        .par_iter()
        .map(|(v, spec)| {
            let evo = cfg.evolution_for(spec)?;
            let trace = propagate(spec, &cfg.schedule, &evo, &start(spec.dim())?)?;
            let dec = oracle_at_end(spec)?;
            let fid = dec.fidelity(0, &trace.final_state)?;
            let e = rayleigh_energy(spec, &trace.final_state)?;
            Ok((
                sweep_value(*v, spec),
                e,
                dec.ground_energy() - spec.e_c,
                fid,
                trace,
            ))
        })
        .collect();
    let (ok, err) = split(results);
    let mut t = DataTable::new(
        "custom",
        &[
            param,
            "energy",
            "oracle_energy",
            "fidelity",
            "final_energy_variance",
            "max_norm_drift",
        ],
    );
    for (v, e, oe, fid, trace) in ok {
        t.rows.push(vec![
            v,
            e,
            oe,
            fid,
            trace.final_energy_variance,
            trace.max_norm_drift,
        ]);
        out.runs.push(RunRecord::from_trace(
            format!("custom {param}={v}"),
            &trace,
            Some(fid),
        ));
    }
    out.tables.push(t);
    finish(err)
}
