//! Experiment configuration: TOML with one section per module, merged over
//! per-experiment defaults and `--set section.key=value` overrides.

use std::fmt;
use std::path::{Path, PathBuf};

use toml::{Table, Value};

use crate::evolve::{check_stability, EvolutionConfig};
use crate::models::{HamiltonianParts, Model, ModelKind, ModelSpec, Observable};
use crate::schedule::{Schedule, Shape};
use crate::{Error, Result};

pub const WORKERS_ENV: &str = "ADIAPROJ_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    DhoEnergy,
    AhoEnergy,
    PsmSpectrum,
    Custom,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::Fig1,
        Experiment::Fig2,
        Experiment::Fig3,
        Experiment::Fig4,
        Experiment::Fig5,
        Experiment::DhoEnergy,
        Experiment::AhoEnergy,
        Experiment::PsmSpectrum,
        Experiment::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Fig1 => "fig1",
            Experiment::Fig2 => "fig2",
            Experiment::Fig3 => "fig3",
            Experiment::Fig4 => "fig4",
            Experiment::Fig5 => "fig5",
            Experiment::DhoEnergy => "dho-energy",
            Experiment::AhoEnergy => "aho-energy",
            Experiment::PsmSpectrum => "psm-spectrum",
            Experiment::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s)
    }

    pub fn description(self) -> &'static str {
        match self {
            Experiment::Fig1 => "Re a0(t) for the displaced oscillator and the E_c sign readout",
            Experiment::Fig2 => {
                "occupations p_n(t), instantaneous energy, final Poisson statistics"
            }
            Experiment::Fig3 => "E0(alpha) for H0 + lambda x + alpha x^2 and the HF slope <x^2>",
            Experiment::Fig4 => "anharmonic oscillator E0(lambda) and position variance",
            Experiment::Fig5 => "scattering-model levels E_n(g) and fidelities F_n(g)",
            Experiment::DhoEnergy => "displaced-oscillator ground energy with phase readout",
            Experiment::AhoEnergy => "anharmonic-oscillator ground energy with phase readout",
            Experiment::PsmSpectrum => "exact scattering-model spectrum versus g",
            Experiment::Custom => "single run or sweep of an arbitrary model spec",
        }
    }

    pub fn takes_sweep(self) -> bool {
        !matches!(self, Experiment::Fig1 | Experiment::Fig2)
    }

    /// Model family the experiment is defined for, if fixed.
    pub fn required_kind(self) -> Option<ModelKind> {
        match self {
            Experiment::Fig1 | Experiment::Fig2 | Experiment::Fig3 | Experiment::DhoEnergy => {
                Some(ModelKind::Dho)
            }
            Experiment::Fig4 | Experiment::AhoEnergy => Some(ModelKind::Aho),
            Experiment::Fig5 | Experiment::PsmSpectrum => Some(ModelKind::Psm),
            Experiment::Custom => None,
        }
    }

    fn defaults(self) -> &'static str {
        match self {
            Experiment::Fig1 => FIG1_DEFAULTS,
            Experiment::Fig2 => FIG2_DEFAULTS,
            Experiment::Fig3 => FIG3_DEFAULTS,
            Experiment::Fig4 => FIG4_DEFAULTS,
            Experiment::Fig5 => FIG5_DEFAULTS,
            Experiment::DhoEnergy => DHO_ENERGY_DEFAULTS,
            Experiment::AhoEnergy => AHO_ENERGY_DEFAULTS,
            Experiment::PsmSpectrum => PSM_SPECTRUM_DEFAULTS,
            Experiment::Custom => "",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

// Run times: 188.49555921538757 = 15 * 4 pi, 94.24777960769379 = 15 * 2 pi.
const FIG1_DEFAULTS: &str = r#"
[model]
kind = "dho"
qubits = 4
[schedule]
run_time = 188.49555921538757
[evolution]
dt = 1e-4
sample_stride = 100
record_amplitudes = true
"#;

const FIG2_DEFAULTS: &str = r#"
[model]
kind = "dho"
qubits = 4
lambda = 2.449489742783178
[schedule]
run_time = 188.49555921538757
[evolution]
dt = 1e-4
sample_stride = 1000
record_amplitudes = true
"#;

const FIG3_DEFAULTS: &str = r#"
[model]
kind = "dho"
qubits = 4
[schedule]
run_time = 188.49555921538757
[evolution]
dt = 1e-4
[hf]
alpha_step = 0.02
alphas = [-0.04, -0.02, 0.0, 0.02, 0.04]
[sweep]
parameter = "lambda"
values = [0.0, 1.0]
"#;

const FIG4_DEFAULTS: &str = r#"
[model]
kind = "aho"
qubits = 6
[schedule]
run_time = 94.24777960769379
[evolution]
dt = 5e-5
courant = 1.42
sample_stride = 100000
[hf]
alpha_step = 0.001
[sweep]
parameter = "lambda"
values = [0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0]
"#;

const FIG5_DEFAULTS: &str = r#"
[model]
kind = "psm"
qubits = 6
spacing = 0.15625
[schedule]
run_time = 1500.0
[evolution]
dt = 0.02
sample_stride = 10000
[hf]
alpha_step = 0.001
levels = [0, 1, 2, 3]
[sweep]
parameter = "g"
values = [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0]
"#;

const DHO_ENERGY_DEFAULTS: &str = r#"
[model]
kind = "dho"
qubits = 4
lambda = 1.4142135623730951
e_c = 1.0
[schedule]
run_time = 188.49555921538757
[evolution]
dt = 1e-4
sample_stride = 10000
"#;

const AHO_ENERGY_DEFAULTS: &str = r#"
[model]
kind = "aho"
qubits = 6
lambda = 2.0
[schedule]
run_time = 94.24777960769379
[evolution]
dt = 5e-5
sample_stride = 100000
"#;

const PSM_SPECTRUM_DEFAULTS: &str = r#"
[model]
kind = "psm"
qubits = 6
spacing = 0.15625
[sweep]
parameter = "g"
values = [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0]
"#;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    Lambda,
    G,
    Spacing,
    EC,
    Alpha,
    Qubits,
}

impl SweepParameter {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "lambda" => Some(Self::Lambda),
            "g" => Some(Self::G),
            "spacing" => Some(Self::Spacing),
            "e_c" => Some(Self::EC),
            "alpha" => Some(Self::Alpha),
            "qubits" => Some(Self::Qubits),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Lambda => "lambda",
            Self::G => "g",
            Self::Spacing => "spacing",
            Self::EC => "e_c",
            Self::Alpha => "alpha",
            Self::Qubits => "qubits",
        }
    }

    pub fn applies_to(self, kind: ModelKind) -> bool {
        match self {
            Self::Lambda => kind != ModelKind::Psm,
            Self::G | Self::Spacing => kind == ModelKind::Psm,
            Self::EC | Self::Alpha | Self::Qubits => true,
        }
    }

    /// `spec` with this parameter set to `value`.
    pub fn apply(self, spec: &ModelSpec, value: f64) -> ModelSpec {
        let mut out = *spec;
        match self {
            Self::Lambda | Self::G => out.model = spec.model.with_coupling(value),
            Self::Spacing => {
                if let Model::Psm { coupling, .. } = spec.model {
                    out.model = Model::Psm {
                        coupling,
                        spacing: value,
                    };
                }
            }
            Self::EC => out.e_c = value,
            Self::Alpha => out.alpha = value,
            Self::Qubits => out.qubits = value.max(0.0).round() as u32,
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HfSettings {
    pub alpha_step: f64,
    pub levels: Vec<usize>,
    pub alphas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSettings {
    pub directory: PathBuf,
    pub csv: bool,
    pub json: bool,
    pub emit_plot_script: bool,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub model: ModelSpec,
    pub schedule: Schedule,
    pub evolution: EvolutionConfig,
    /// When set, `dt = courant / |H(f=1)|_gershgorin` for each run.
    pub courant: Option<f64>,
    pub hf: HfSettings,
    pub window: f64,
    pub sweep: Option<Sweep>,
    pub output: OutputSettings,
    pub workers: usize,
    /// Merged configuration table, echoed into the manifest.
    pub table: Table,
}

impl ExperimentConfig {
    /// Model specs of every sweep point, in sweep order.
    pub fn points(&self) -> Vec<(Option<f64>, ModelSpec)> {
        match &self.sweep {
            Some(s) => s
                .values
                .iter()
                .map(|&v| (Some(v), s.parameter.apply(&self.model, v)))
                .collect(),
            None => vec![(None, self.model)],
        }
    }

    /// Evolution settings for one spec, resolving `courant` if present.
    pub fn evolution_for(&self, spec: &ModelSpec) -> Result<EvolutionConfig> {
        let mut cfg = self.evolution;
        if let Some(c) = self.courant {
            let bound = HamiltonianParts::new(spec)?.at(1.0)?.gershgorin_bound();
            cfg.dt = c / bound.max(1.0);
        }
        Ok(cfg)
    }
}

const KNOWN: &[(&str, &[&str])] = &[
    ("", &["experiment", "workers"]),
    (
        "model",
        &[
            "kind",
            "qubits",
            "lambda",
            "g",
            "spacing",
            "e_c",
            "alpha",
            "observable",
        ],
    ),
    (
        "schedule",
        &["shape", "run_time", "steepness", "midpoint_fraction"],
    ),
    (
        "evolution",
        &["dt", "courant", "sample_stride", "record_amplitudes"],
    ),
    ("hf", &["alpha_step", "levels", "alphas"]),
    ("readout", &["window"]),
    ("sweep", &["parameter", "values"]),
    ("output", &["directory", "formats", "emit_plot_script"]),
];

fn merge(base: &mut Table, over: &Table) {
    for (k, v) in over {
        match (base.get_mut(k), v) {
            (Some(Value::Table(b)), Value::Table(o)) => merge(b, o),
            _ => {
                base.insert(k.clone(), v.clone());
            }
        }
    }
}

/// Applies `section.key=value` (or top-level `key=value`) to `table`.
pub fn apply_override(table: &mut Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{assignment}` is not key=value")))?;
    let key = key.trim();
    let value = parse_value(raw.trim());
    let (section, field) = match key.split_once('.') {
        Some((s, f)) => (Some(s), f),
        None => (None, key),
    };
    let target = match section {
        Some(s) => table
            .entry(s.to_string())
            .or_insert_with(|| Value::Table(Table::new()))
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("`{s}` is not a section")))?,
        None => table,
    };
    target.insert(field.to_string(), value);
    Ok(())
}

fn parse_value(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

/// Reads a config file and merges it over its experiment's defaults.
pub fn load(path: &Path, overrides: &[String]) -> Result<Table> {
    let text = std::fs::read_to_string(path)?;
    load_str(&text, overrides)
}

pub fn load_str(text: &str, overrides: &[String]) -> Result<Table> {
    let mut user: Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
    for o in overrides {
        apply_override(&mut user, o)?;
    }
    let mut merged = user
        .get("experiment")
        .and_then(Value::as_str)
        .and_then(Experiment::parse)
        .map(|e| {
            e.defaults()
                .parse::<Table>()
                .expect("built-in defaults parse")
        })
        .unwrap_or_default();
    merge(&mut merged, &user);
    Ok(merged)
}

struct Reader<'a> {
    table: &'a Table,
    diagnostics: Vec<String>,
}

impl<'a> Reader<'a> {
    fn section(&self, name: &str) -> Option<&'a Table> {
        if name.is_empty() {
            Some(self.table)
        } else {
            self.table.get(name).and_then(Value::as_table)
        }
    }

    fn get(&self, section: &str, key: &str) -> Option<&'a Value> {
        self.section(section).and_then(|t| t.get(key))
    }

    fn path(section: &str, key: &str) -> String {
        if section.is_empty() {
            key.to_string()
        } else {
            format!("{section}.{key}")
        }
    }

    fn float(&mut self, section: &str, key: &str) -> Option<f64> {
        match self.get(section, key)? {
            Value::Float(f) => Some(*f),
            Value::Integer(i) => Some(*i as f64),
            _ => {
                self.diagnostics
                    .push(format!("{} must be a number", Self::path(section, key)));
                None
            }
        }
    }

    fn int(&mut self, section: &str, key: &str) -> Option<i64> {
        match self.get(section, key)? {
            Value::Integer(i) => Some(*i),
            _ => {
                self.diagnostics
                    .push(format!("{} must be an integer", Self::path(section, key)));
                None
            }
        }
    }

    fn string(&mut self, section: &str, key: &str) -> Option<&'a str> {
        match self.get(section, key)? {
            Value::String(s) => Some(s.as_str()),
            _ => {
                self.diagnostics
                    .push(format!("{} must be a string", Self::path(section, key)));
                None
            }
        }
    }

    fn boolean(&mut self, section: &str, key: &str) -> Option<bool> {
        match self.get(section, key)? {
            Value::Boolean(b) => Some(*b),
            _ => {
                self.diagnostics.push(format!(
                    "{} must be true or false",
                    Self::path(section, key)
                ));
                None
            }
        }
    }

    fn floats(&mut self, section: &str, key: &str) -> Option<Vec<f64>> {
        let arr = match self.get(section, key)? {
            Value::Array(a) => a,
            _ => {
                self.diagnostics
                    .push(format!("{} must be an array", Self::path(section, key)));
                return None;
            }
        };
        let out: Option<Vec<f64>> = arr
            .iter()
            .map(|v| match v {
                Value::Float(f) => Some(*f),
                Value::Integer(i) => Some(*i as f64),
                _ => None,
            })
            .collect();
        if out.is_none() {
            self.diagnostics.push(format!(
                "{} must contain only numbers",
                Self::path(section, key)
            ));
        }
        out
    }

    fn strings(&mut self, section: &str, key: &str) -> Option<Vec<&'a str>> {
        let arr = self.get(section, key)?.as_array();
        let out: Option<Vec<&str>> = arr.and_then(|a| a.iter().map(Value::as_str).collect());
        if out.is_none() {
            self.diagnostics.push(format!(
                "{} must be an array of strings",
                Self::path(section, key)
            ));
        }
        out
    }

    fn unknown_keys(&mut self) {
        for (k, v) in self.table {
            match KNOWN.iter().find(|(s, _)| s == k) {
                Some((section, keys)) if !section.is_empty() => match v.as_table() {
                    Some(t) => {
                        for key in t.keys() {
                            if !keys.contains(&key.as_str()) {
                                self.diagnostics
                                    .push(format!("unknown field `{section}.{key}`"));
                            }
                        }
                    }
                    None => self.diagnostics.push(format!("`{k}` must be a section")),
                },
                _ => {
                    if !KNOWN[0].1.contains(&k.as_str()) {
                        self.diagnostics.push(format!("unknown field `{k}`"));
                    }
                }
            }
        }
    }
}

fn check_writable(dir: &Path) -> Option<String> {
    let mut probe = dir;
    loop {
        if probe.as_os_str().is_empty() {
            probe = Path::new(".");
        }
        match std::fs::metadata(probe) {
            Ok(meta) if !meta.is_dir() => {
                return Some(format!(
                    "output path {} is not a directory",
                    probe.display()
                ))
            }
            Ok(meta) if meta.permissions().readonly() => {
                return Some(format!(
                    "output directory {} is not writable",
                    probe.display()
                ))
            }
            Ok(_) => return None,
            Err(_) => match probe.parent() {
                Some(p) => probe = p,
                None => return Some(format!("output directory {} is unreachable", dir.display())),
            },
        }
    }
}

/// Resolves a merged table into a config, collecting every violation.
pub fn resolve(table: &Table) -> std::result::Result<ExperimentConfig, Vec<String>> {
    let mut r = Reader {
        table,
        diagnostics: Vec::new(),
    };
    r.unknown_keys();

    let experiment = match r.string("", "experiment") {
        Some(name) => Experiment::parse(name).or_else(|| {
            r.diagnostics.push(format!("unknown experiment `{name}`"));
            None
        }),
        None => {
            r.diagnostics.push("missing field `experiment`".into());
            None
        }
    };

    let mut workers = r.int("", "workers").unwrap_or(1);
    if let Ok(env) = std::env::var(WORKERS_ENV) {
        match env.trim().parse::<i64>() {
            Ok(w) => workers = w,
            Err(_) => r
                .diagnostics
                .push(format!("{WORKERS_ENV} must be an integer, got `{env}`")),
        }
    }
    if workers < 1 {
        r.diagnostics.push("workers must be at least 1".into());
    }

    // model
    let kind = match r.string("model", "kind") {
        Some(k) => ModelKind::parse(k).or_else(|| {
            r.diagnostics.push(format!("unknown model kind `{k}`"));
            None
        }),
        None => {
            r.diagnostics.push("missing field `model.kind`".into());
            None
        }
    };
    let qubits = r.int("model", "qubits").unwrap_or(4);
    let lambda = r.float("model", "lambda");
    let g = r.float("model", "g");
    let spacing = r.float("model", "spacing");
    let e_c = r.float("model", "e_c").unwrap_or(0.0);
    let alpha = r.float("model", "alpha").unwrap_or(0.0);
    let observable = r.string("model", "observable").and_then(|o| {
        Observable::parse(o).or_else(|| {
            r.diagnostics.push(format!("unknown observable `{o}`"));
            None
        })
    });
    let model = kind.map(|kind| {
        if kind == ModelKind::Psm && lambda.is_some() {
            r.diagnostics
                .push("parameter `lambda` not in model psm (use `g`)".into());
        }
        if kind != ModelKind::Psm && (g.is_some() || spacing.is_some()) {
            r.diagnostics
                .push(format!("parameters `g`/`spacing` not in model {kind}"));
        }
        let m = match kind {
            ModelKind::Dho => Model::Dho {
                coupling: lambda.unwrap_or(0.0),
            },
            ModelKind::Aho => Model::Aho {
                coupling: lambda.unwrap_or(0.0),
            },
            ModelKind::Psm => Model::Psm {
                coupling: g.unwrap_or(0.0),
                spacing: spacing.unwrap_or(10.0 / 64.0),
            },
        };
        ModelSpec {
            model: m,
            qubits: qubits.clamp(0, u32::MAX as i64) as u32,
            e_c,
            alpha,
            observable,
        }
    });
    if let Some(spec) = &model {
        r.diagnostics.extend(spec.diagnostics());
    }
    if let (Some(e), Some(k)) = (experiment, kind) {
        if let Some(req) = e.required_kind() {
            if req != k {
                r.diagnostics
                    .push(format!("experiment {e} requires model kind {req}, got {k}"));
            }
        }
    }

    // schedule
    let run_time = r
        .float("schedule", "run_time")
        .unwrap_or(crate::schedule::DEFAULT_RUN_TIME);
    let shape = match r.string("schedule", "shape").unwrap_or("tanh") {
        "tanh" => Some(Shape::Tanh {
            steepness: r
                .float("schedule", "steepness")
                .unwrap_or(crate::schedule::DEFAULT_STEEPNESS),
            midpoint_fraction: r
                .float("schedule", "midpoint_fraction")
                .unwrap_or(crate::schedule::DEFAULT_MIDPOINT),
        }),
        "linear" => Some(Shape::Linear),
        other => {
            r.diagnostics
                .push(format!("unknown schedule shape `{other}`"));
            None
        }
    };
    let schedule = shape.and_then(|s| match Schedule::new(run_time, s) {
        Ok(s) => Some(s),
        Err(e) => {
            r.diagnostics.push(e.to_string());
            None
        }
    });

    // evolution
    let default_evo = EvolutionConfig::default_for(kind.unwrap_or(ModelKind::Dho));
    let mut evolution = EvolutionConfig {
        dt: r.float("evolution", "dt").unwrap_or(default_evo.dt),
        sample_stride: default_evo.sample_stride,
        record_amplitudes: r.boolean("evolution", "record_amplitudes").unwrap_or(false),
    };
    if let Some(stride) = r.int("evolution", "sample_stride") {
        if stride < 1 {
            r.diagnostics
                .push("evolution.sample_stride must be at least 1".into());
        } else {
            evolution.sample_stride = stride as usize;
        }
    }
    if let Err(e) = evolution.validate() {
        r.diagnostics.push(e.to_string());
    }
    let courant = r.float("evolution", "courant");
    if let Some(c) = courant {
        if !(c > 0.0 && c <= crate::evolve::STABILITY_LIMIT) {
            r.diagnostics.push(format!(
                "evolution.courant must lie in (0, {}]",
                crate::evolve::STABILITY_LIMIT
            ));
        }
    }

    // hf and readout
    let hf = HfSettings {
        alpha_step: r
            .float("hf", "alpha_step")
            .unwrap_or(crate::hf::DEFAULT_ALPHA_STEP),
        levels: r
            .get("hf", "levels")
            .map(|_| {
                r.floats("hf", "levels")
                    .unwrap_or_default()
                    .into_iter()
                    .map(|v| v.max(0.0) as usize)
                    .collect()
            })
            .unwrap_or_else(|| vec![0]),
        alphas: r.floats("hf", "alphas").unwrap_or_default(),
    };
    if hf.alpha_step.is_nan() || hf.alpha_step <= 0.0 {
        r.diagnostics.push("hf.alpha_step must be positive".into());
    }
    if let Some(spec) = &model {
        if spec.qubits <= crate::models::MAX_QUBITS {
            if let Some(&bad) = hf.levels.iter().find(|&&l| l >= spec.dim()) {
                r.diagnostics.push(format!(
                    "hf.levels entry {bad} out of range for dimension {}",
                    spec.dim()
                ));
            }
        }
    }
    let window = r
        .float("readout", "window")
        .unwrap_or(crate::readout::DEFAULT_WINDOW);
    if window.is_nan() || window <= 0.0 {
        r.diagnostics.push("readout.window must be positive".into());
    }

    // sweep
    let sweep = if r.section("sweep").is_some() {
        let parameter = r.string("sweep", "parameter").and_then(|p| {
            SweepParameter::parse(p).or_else(|| {
                r.diagnostics.push(format!("parameter `{p}` not in model"));
                None
            })
        });
        if r.get("sweep", "parameter").is_none() {
            r.diagnostics.push("missing field `sweep.parameter`".into());
        }
        let values = r.floats("sweep", "values").unwrap_or_default();
        if values.is_empty() {
            r.diagnostics
                .push("sweep.values must be a nonempty list".into());
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            r.diagnostics
                .push("sweep.values must be sorted ascending".into());
        }
        if let (Some(p), Some(k)) = (parameter, kind) {
            if !p.applies_to(k) {
                r.diagnostics
                    .push(format!("parameter `{}` not in model {k}", p.name()));
            }
        }
        if let Some(e) = experiment {
            if !e.takes_sweep() {
                r.diagnostics
                    .push(format!("experiment {e} does not take a sweep"));
            }
        }
        parameter.map(|parameter| Sweep { parameter, values })
    } else {
        None
    };

    // output
    let directory = PathBuf::from(r.string("output", "directory").unwrap_or("out"));
    let formats = r
        .get("output", "formats")
        .map(|_| r.strings("output", "formats").unwrap_or_default())
        .unwrap_or_else(|| vec!["csv", "json"]);
    for f in &formats {
        if !matches!(*f, "csv" | "json") {
            r.diagnostics.push(format!("unknown output format `{f}`"));
        }
    }
    if let Some(msg) = check_writable(&directory) {
        r.diagnostics.push(msg);
    }
    let output = OutputSettings {
        directory,
        csv: formats.contains(&"csv"),
        json: formats.contains(&"json"),
        emit_plot_script: r.boolean("output", "emit_plot_script").unwrap_or(false),
    };

    let mut diagnostics = r.diagnostics;
    let (Some(experiment), Some(model), Some(schedule)) = (experiment, model, schedule) else {
        return Err(diagnostics);
    };
    let cfg = ExperimentConfig {
        experiment,
        model,
        schedule,
        evolution,
        courant,
        hf,
        window,
        sweep,
        output,
        workers: workers.max(1) as usize,
        table: table.clone(),
    };

    // stability, per sweep point, only once the structure is sound
    if diagnostics.is_empty() && experiment != Experiment::PsmSpectrum {
        for (value, spec) in cfg.points() {
            if spec.validate().is_err() {
                diagnostics.extend(spec.diagnostics());
                continue;
            }
            let result = cfg
                .evolution_for(&spec)
                .and_then(|evo| check_stability(&HamiltonianParts::new(&spec)?, evo.dt));
            if let Err(e) = result {
                let at = value
                    .map(|v| format!(" at sweep value {v}"))
                    .unwrap_or_default();
                diagnostics.push(format!("stability{at}: {e}"));
            }
        }
    }
    if diagnostics.is_empty() {
        Ok(cfg)
    } else {
        Err(diagnostics)
    }
}

/// Every violation in `table`, without running anything.
pub fn validate(table: &Table) -> Vec<String> {
    match resolve(table) {
        Ok(_) => Vec::new(),
        Err(d) => d,
    }
}
