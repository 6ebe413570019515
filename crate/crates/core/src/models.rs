//! Builders for the three model Hamiltonians in the oscillator/level basis
//! and their observable-coupled variants.
//!
//! Units: `hbar = m = omega = 1` for the oscillators; the scattering model is
//! in the arbitrary units of its level spacing.

use std::fmt;

use crate::linalg::HermitianOperator;
use crate::{Error, Result};

pub const MIN_QUBITS: u32 = 2;
pub const MAX_QUBITS: u32 = 12;

/// Model family together with exactly the parameters it needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    /// Displaced harmonic oscillator, `H1 = lambda * x`.
    Dho { coupling: f64 },
    /// Quartic anharmonic oscillator, `H1 = lambda * x^4`.
    Aho { coupling: f64 },
    /// Potential scattering: levels `k * spacing`, contact term `g / 2^N`.
    Psm { coupling: f64, spacing: f64 },
}

impl Model {
    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Dho { .. } => ModelKind::Dho,
            Model::Aho { .. } => ModelKind::Aho,
            Model::Psm { .. } => ModelKind::Psm,
        }
    }

    pub fn coupling(&self) -> f64 {
        match *self {
            Model::Dho { coupling } | Model::Aho { coupling } | Model::Psm { coupling, .. } => {
                coupling
            }
        }
    }

    pub fn with_coupling(self, coupling: f64) -> Self {
        match self {
            Model::Dho { .. } => Model::Dho { coupling },
            Model::Aho { .. } => Model::Aho { coupling },
            Model::Psm { spacing, .. } => Model::Psm { coupling, spacing },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Dho,
    Aho,
    Psm,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Dho => "dho",
            ModelKind::Aho => "aho",
            ModelKind::Psm => "psm",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dho" => Some(ModelKind::Dho),
            "aho" => Some(ModelKind::Aho),
            "psm" => Some(ModelKind::Psm),
            _ => None,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Observable `O` coupled linearly as `alpha * O`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    X,
    XSquared,
    /// `|n><n|`.
    Projector(usize),
}

impl Observable {
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "x" => Some(Observable::X),
            "x2" | "x^2" | "x_squared" => Some(Observable::XSquared),
            _ => s
                .strip_prefix("projector:")
                .and_then(|n| n.trim().parse().ok())
                .map(Observable::Projector),
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observable::X => f.write_str("x"),
            Observable::XSquared => f.write_str("x2"),
            Observable::Projector(n) => write!(f, "projector:{n}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    pub model: Model,
    pub qubits: u32,
    /// Constant energy offset `E_c`.
    pub e_c: f64,
    /// Observable coupling strength.
    pub alpha: f64,
    pub observable: Option<Observable>,
}

impl ModelSpec {
    pub fn new(model: Model, qubits: u32) -> Self {
        Self {
            model,
            qubits,
            e_c: 0.0,
            alpha: 0.0,
            observable: None,
        }
    }

    pub fn dho(qubits: u32, coupling: f64) -> Self {
        Self::new(Model::Dho { coupling }, qubits)
    }

    pub fn aho(qubits: u32, coupling: f64) -> Self {
        Self::new(Model::Aho { coupling }, qubits)
    }

    pub fn psm(qubits: u32, coupling: f64, spacing: f64) -> Self {
        Self::new(Model::Psm { coupling, spacing }, qubits)
    }

    pub fn with_offset(mut self, e_c: f64) -> Self {
        self.e_c = e_c;
        self
    }

    pub fn with_observable(mut self, observable: Observable, alpha: f64) -> Self {
        self.observable = Some(observable);
        self.alpha = alpha;
        self
    }

    /// Same spec with the observable term removed.
    pub fn without_observable(mut self) -> Self {
        self.observable = None;
        self.alpha = 0.0;
        self
    }

    pub fn kind(&self) -> ModelKind {
        self.model.kind()
    }

    /// Basis size `2^N`. Only meaningful for validated specs.
    pub fn dim(&self) -> usize {
        1usize << self.qubits
    }

    pub fn validate(&self) -> Result<()> {
        self.diagnostics()
            .into_iter()
            .next()
            .map_or(Ok(()), |d| Err(Error::InvalidModel(d)))
    }

    /// Every violated constraint, as human-readable messages.
    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(MIN_QUBITS..=MAX_QUBITS).contains(&self.qubits) {
            out.push(format!(
                "qubit count {} outside [{MIN_QUBITS}, {MAX_QUBITS}]",
                self.qubits
            ));
        }
        let coupling = self.model.coupling();
        if !coupling.is_finite() {
            out.push("coupling must be finite".into());
        }
        match self.model {
            Model::Aho { coupling } if coupling < 0.0 => {
                out.push("AHO requires λ ≥ 0".into());
            }
            Model::Psm { spacing, .. } if !(spacing.is_finite() && spacing > 0.0) => {
                out.push("PSM level spacing must be positive".into());
            }
            _ => {}
        }
        if !self.e_c.is_finite() {
            out.push("e_c must be finite".into());
        }
        if !self.alpha.is_finite() {
            out.push("alpha must be finite".into());
        }
        match self.observable {
            None if self.alpha != 0.0 => {
                out.push("alpha is nonzero but no observable is set".into());
            }
            Some(Observable::Projector(n)) if self.qubits <= MAX_QUBITS && n >= self.dim() => {
                out.push(format!(
                    "projector index {n} out of range for dimension {}",
                    self.dim()
                ));
            }
            _ => {}
        }
        out
    }
}

/// Ground energy of the untruncated displaced oscillator, `1/2 - lambda^2/2`.
pub fn dho_exact_ground_energy(coupling: f64) -> f64 {
    0.5 - 0.5 * coupling * coupling
}

pub fn build_h0(spec: &ModelSpec) -> Result<HermitianOperator> {
    spec.validate()?;
    let dim = spec.dim();
    let diag: Vec<f64> = match spec.model {
        Model::Dho { .. } | Model::Aho { .. } => (0..dim).map(|n| n as f64 + 0.5).collect(),
        Model::Psm { spacing, .. } => (0..dim).map(|k| k as f64 * spacing).collect(),
    };
    Ok(HermitianOperator::diagonal(diag)?.with_label("H0"))
}

/// Position operator `(a + a^dagger)/sqrt(2)` truncated to `dim` states.
pub fn build_x(dim: usize) -> Result<HermitianOperator> {
    let off: Vec<f64> = (0..dim.saturating_sub(1))
        .map(|n| ((n + 1) as f64).sqrt() * std::f64::consts::FRAC_1_SQRT_2)
        .collect();
    Ok(HermitianOperator::banded(dim, vec![vec![0.0; dim], off])?.with_label("x"))
}

/// `(3/4) I + (1/4) V`, i.e. `x^4` from its closed-form ladder elements,
/// keeping only entries whose row and column both fall inside the basis.
pub fn build_quartic(dim: usize) -> Result<HermitianOperator> {
    let diag: Vec<f64> = (0..dim)
        .map(|n| {
            let n = n as f64;
            0.75 + 0.25 * 6.0 * n * (n + 1.0)
        })
        .collect();
    let zero1 = vec![0.0; dim.saturating_sub(1)];
    let two: Vec<f64> = (0..dim.saturating_sub(2))
        .map(|n| {
            let n = n as f64;
            0.25 * 2.0 * (2.0 * n + 3.0) * ((n + 1.0) * (n + 2.0)).sqrt()
        })
        .collect();
    let mut diagonals = vec![diag, zero1, two];
    if dim > 4 {
        diagonals.push(vec![0.0; dim - 3]);
        diagonals.push(
            (0..dim - 4)
                .map(|n| {
                    let n = n as f64;
                    0.25 * ((n + 1.0) * (n + 2.0) * (n + 3.0) * (n + 4.0)).sqrt()
                })
                .collect(),
        );
    }
    Ok(HermitianOperator::banded(dim, diagonals)?.with_label("x^4"))
}

pub fn build_h1(spec: &ModelSpec) -> Result<HermitianOperator> {
    spec.validate()?;
    let dim = spec.dim();
    let op = match spec.model {
        Model::Dho { coupling } => build_x(dim)?.scaled(coupling),
        Model::Aho { coupling } => build_quartic(dim)?.scaled(coupling),
        Model::Psm { coupling, .. } => {
            HermitianOperator::dense_real(dim, vec![coupling / dim as f64; dim * dim])?
        }
    };
    Ok(op.with_label("H1"))
}

pub fn build_observable(observable: Observable, dim: usize) -> Result<HermitianOperator> {
    match observable {
        Observable::X => build_x(dim),
        Observable::XSquared => Ok(build_x(dim)?.square().with_label("x^2")),
        Observable::Projector(n) => {
            if n >= dim {
                return Err(Error::InvalidModel(format!(
                    "projector index {n} out of range for dimension {dim}"
                )));
            }
            let mut diag = vec![0.0; dim];
            diag[n] = 1.0;
            Ok(HermitianOperator::diagonal(diag)?.with_label(format!("|{n}><{n}|")))
        }
    }
}

/// Pieces of `H(t) = H0 + f(t) (H1 + alpha O) + E_c`, cached so the
/// time-dependent Hamiltonian is a scalar combination of fixed operators.
#[derive(Debug, Clone)]
pub struct HamiltonianParts {
    pub h0: HermitianOperator,
    /// `H1 + alpha O`.
    pub switched: HermitianOperator,
    pub e_c: f64,
}

impl HamiltonianParts {
    pub fn new(spec: &ModelSpec) -> Result<Self> {
        let h0 = build_h0(spec)?;
        let mut switched = build_h1(spec)?;
        if let Some(observable) = spec.observable {
            if spec.alpha != 0.0 {
                let o = build_observable(observable, spec.dim())?;
                switched = switched.add(&o.scaled(spec.alpha))?;
            }
        }
        Ok(Self {
            h0,
            switched: switched.with_label("H1 + alpha O"),
            e_c: spec.e_c,
        })
    }

    pub fn dim(&self) -> usize {
        self.h0.dim()
    }

    pub fn at(&self, f_value: f64) -> Result<HermitianOperator> {
        Ok(self
            .h0
            .add(&self.switched.scaled(f_value))?
            .shifted(self.e_c)
            .with_label(format!("H(f={f_value})")))
    }
}

/// `H0 + f (H1 + alpha O) + E_c I`.
pub fn assemble(spec: &ModelSpec, f_value: f64) -> Result<HermitianOperator> {
    if !(0.0..=1.0).contains(&f_value) {
        return Err(Error::InvalidModel(format!(
            "switching value {f_value} outside [0, 1]"
        )));
    }
    HamiltonianParts::new(spec)?.at(f_value)
}
