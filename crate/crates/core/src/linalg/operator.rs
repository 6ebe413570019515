use super::state::dot;
use super::{check_dim, QuantumState, C64, EXPECTATION_IMAG_TOL, HERMITIAN_TOL};
use crate::{Error, Result};

/// Backing storage of a [`HermitianOperator`].
///
/// Real symmetric storage is applied directly to complex vectors; it is never
/// widened to complex unless combined with genuinely complex data.
#[derive(Debug, Clone, PartialEq)]
pub enum Storage {
    /// Symmetric banded real matrix. `diagonals[k][i]` holds element
    /// `(i, i + k)` (and by symmetry `(i + k, i)`) for `k = 0..=bandwidth`.
    Banded { diagonals: Vec<Vec<f64>> },
    /// Row-major symmetric real matrix.
    DenseReal(Vec<f64>),
    /// Row-major Hermitian complex matrix.
    DenseComplex(Vec<C64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    dim: usize,
    storage: Storage,
    label: String,
}

impl HermitianOperator {
    pub fn zeros(dim: usize) -> Result<Self> {
        Self::diagonal(vec![0.0; dim])
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::diagonal(vec![1.0; dim]).map(|op| op.with_label("identity"))
    }

    pub fn diagonal(values: Vec<f64>) -> Result<Self> {
        let dim = values.len();
        check_dim(dim)?;
        Ok(Self {
            dim,
            storage: Storage::Banded {
                diagonals: vec![values],
            },
            label: String::new(),
        })
    }

    /// Symmetric banded operator from its main diagonal and superdiagonals.
    /// `diagonals[k]` must have length `dim - k`.
    pub fn banded(dim: usize, diagonals: Vec<Vec<f64>>) -> Result<Self> {
        check_dim(dim)?;
        if diagonals.is_empty() || diagonals.len() > dim {
            return Err(Error::InvalidModel(format!(
                "banded operator needs between 1 and {dim} diagonals"
            )));
        }
        for (k, d) in diagonals.iter().enumerate() {
            if d.len() != dim - k {
                return Err(Error::DimensionMismatch {
                    expected: dim - k,
                    found: d.len(),
                });
            }
        }
        Ok(Self {
            dim,
            storage: Storage::Banded { diagonals },
            label: String::new(),
        })
    }

    /// Dense real matrix in row-major order; must be symmetric to
    /// [`HERMITIAN_TOL`]. Stored entries are symmetrized exactly.
    pub fn dense_real(dim: usize, mut data: Vec<f64>) -> Result<Self> {
        check_dim(dim)?;
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                let (a, b) = (data[i * dim + j], data[j * dim + i]);
                let deviation = (a - b).abs();
                if deviation > HERMITIAN_TOL || !deviation.is_finite() {
                    return Err(Error::NotHermitian {
                        row: i,
                        col: j,
                        deviation,
                    });
                }
                data[j * dim + i] = a;
            }
        }
        Ok(Self {
            dim,
            storage: Storage::DenseReal(data),
            label: String::new(),
        })
    }

    /// Dense complex matrix in row-major order; must be Hermitian to
    /// [`HERMITIAN_TOL`]. Stored entries are made exactly Hermitian.
    pub fn dense_complex(dim: usize, mut data: Vec<C64>) -> Result<Self> {
        check_dim(dim)?;
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        for i in 0..dim {
            let d = data[i * dim + i];
            if d.im.abs() > HERMITIAN_TOL {
                return Err(Error::NotHermitian {
                    row: i,
                    col: i,
                    deviation: d.im.abs(),
                });
            }
            data[i * dim + i] = C64::new(d.re, 0.0);
            for j in (i + 1)..dim {
                let (a, b) = (data[i * dim + j], data[j * dim + i]);
                let deviation = (a - b.conj()).norm();
                if deviation > HERMITIAN_TOL || !deviation.is_finite() {
                    return Err(Error::NotHermitian {
                        row: i,
                        col: j,
                        deviation,
                    });
                }
                data[j * dim + i] = a.conj();
            }
        }
        Ok(Self {
            dim,
            storage: Storage::DenseComplex(data),
            label: String::new(),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn storage(&self) -> &Storage {
        &self.storage
    }

    /// Number of sub/super-diagonals for banded storage.
    pub fn bandwidth(&self) -> Option<usize> {
        match &self.storage {
            Storage::Banded { diagonals } => Some(diagonals.len() - 1),
            _ => None,
        }
    }

    pub fn is_real(&self) -> bool {
        !matches!(self.storage, Storage::DenseComplex(_))
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        let dim = self.dim;
        assert!(row < dim && col < dim, "index ({row}, {col}) out of range");
        match &self.storage {
            Storage::Banded { diagonals } => {
                let (lo, k) = (row.min(col), row.abs_diff(col));
                diagonals
                    .get(k)
                    .map_or(C64::new(0.0, 0.0), |d| C64::new(d[lo], 0.0))
            }
            Storage::DenseReal(data) => C64::new(data[row * dim + col], 0.0),
            Storage::DenseComplex(data) => data[row * dim + col],
        }
    }

    /// Real row-major copy, or `None` for complex storage.
    pub fn to_real_dense(&self) -> Option<Vec<f64>> {
        let dim = self.dim;
        match &self.storage {
            Storage::Banded { diagonals } => {
                let mut out = vec![0.0; dim * dim];
                for (k, d) in diagonals.iter().enumerate() {
                    for (i, &a) in d.iter().enumerate() {
                        out[i * dim + i + k] = a;
                        out[(i + k) * dim + i] = a;
                    }
                }
                Some(out)
            }
            Storage::DenseReal(data) => Some(data.clone()),
            Storage::DenseComplex(_) => None,
        }
    }

    pub fn to_complex_dense(&self) -> Vec<C64> {
        match &self.storage {
            Storage::DenseComplex(data) => data.clone(),
            _ => self
                .to_real_dense()
                .expect("real storage")
                .into_iter()
                .map(|a| C64::new(a, 0.0))
                .collect(),
        }
    }

    /// Same operator in dense storage.
    pub fn to_dense(&self) -> Self {
        let storage = match self.to_real_dense() {
            Some(data) => Storage::DenseReal(data),
            None => self.storage.clone(),
        };
        Self {
            dim: self.dim,
            storage,
            label: self.label.clone(),
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i).re).sum()
    }

    /// Largest absolute row sum; an upper bound on the spectral radius.
    pub fn gershgorin_bound(&self) -> f64 {
        let dim = self.dim;
        match &self.storage {
            Storage::Banded { diagonals } => {
                let mut rows = vec![0.0; dim];
                for (k, d) in diagonals.iter().enumerate() {
                    for (i, &a) in d.iter().enumerate() {
                        rows[i] += a.abs();
                        if k > 0 {
                            rows[i + k] += a.abs();
                        }
                    }
                }
                rows.into_iter().fold(0.0, f64::max)
            }
            Storage::DenseReal(data) => data
                .chunks(dim)
                .map(|r| r.iter().map(|a| a.abs()).sum::<f64>())
                .fold(0.0, f64::max),
            Storage::DenseComplex(data) => data
                .chunks(dim)
                .map(|r| r.iter().map(|a| a.norm()).sum::<f64>())
                .fold(0.0, f64::max),
        }
    }

    /// Largest elementwise deviation `|a_mn - conj(a_nm)|` with its location.
    pub fn hermiticity_defect(&self) -> (usize, usize, f64) {
        let mut worst = (0, 0, 0.0);
        if let Storage::DenseComplex(data) = &self.storage {
            let dim = self.dim;
            for i in 0..dim {
                for j in i..dim {
                    let dev = (data[i * dim + j] - data[j * dim + i].conj()).norm();
                    if dev > worst.2 {
                        worst = (i, j, dev);
                    }
                }
            }
        } else if let Storage::DenseReal(data) = &self.storage {
            let dim = self.dim;
            for i in 0..dim {
                for j in (i + 1)..dim {
                    let dev = (data[i * dim + j] - data[j * dim + i]).abs();
                    if dev > worst.2 {
                        worst = (i, j, dev);
                    }
                }
            }
        }
        worst
    }

    pub fn check_hermitian(&self, tol: f64) -> Result<()> {
        let (row, col, deviation) = self.hermiticity_defect();
        if deviation > tol {
            Err(Error::NotHermitian {
                row,
                col,
                deviation,
            })
        } else {
            Ok(())
        }
    }

    fn check_same_dim(&self, dim: usize) -> Result<()> {
        if self.dim == dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found: dim,
            })
        }
    }

    /// `out += coeff * A x`. Lengths are the caller's responsibility.
    pub(crate) fn apply_accumulate(&self, coeff: f64, x: &[C64], out: &mut [C64]) {
        let dim = self.dim;
        debug_assert!(x.len() == dim && out.len() == dim);
        match &self.storage {
            Storage::Banded { diagonals } => {
                for (i, (&a, o)) in diagonals[0].iter().zip(out.iter_mut()).enumerate() {
                    *o += x[i] * (coeff * a);
                }
                for (k, d) in diagonals.iter().enumerate().skip(1) {
                    let n = d.len();
                    for ((o, &a), v) in out[..n].iter_mut().zip(d).zip(&x[k..]) {
                        *o += v * (coeff * a);
                    }
                    for ((o, &a), v) in out[k..].iter_mut().zip(d).zip(&x[..n]) {
                        *o += v * (coeff * a);
                    }
                }
            }
            Storage::DenseReal(data) => {
                for (row, o) in data.chunks_exact(dim).zip(out.iter_mut()) {
                    let (mut re, mut im) = (0.0, 0.0);
                    for (&a, v) in row.iter().zip(x) {
                        re += a * v.re;
                        im += a * v.im;
                    }
                    *o += C64::new(re, im) * coeff;
                }
            }
            Storage::DenseComplex(data) => {
                for (row, o) in data.chunks_exact(dim).zip(out.iter_mut()) {
                    let s: C64 = row.iter().zip(x).map(|(a, v)| a * v).sum();
                    *o += s * coeff;
                }
            }
        }
    }

    /// `A |psi>` as a fresh state.
    pub fn apply(&self, psi: &QuantumState) -> Result<QuantumState> {
        self.check_same_dim(psi.dim())?;
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        self.apply_accumulate(1.0, psi.amplitudes(), &mut out);
        QuantumState::from_amplitudes(out)
    }

    /// Rayleigh quotient `<psi|A|psi> / <psi|psi>`.
    pub fn expectation(&self, psi: &QuantumState) -> Result<f64> {
        self.check_same_dim(psi.dim())?;
        let norm_sqr = psi.norm_sqr();
        if norm_sqr == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        self.apply_accumulate(1.0, psi.amplitudes(), &mut out);
        let raw = dot(psi.amplitudes(), &out);
        if raw.im.abs() > EXPECTATION_IMAG_TOL * raw.re.abs().max(norm_sqr) {
            return Err(Error::ComplexExpectation {
                real: raw.re,
                imag: raw.im,
            });
        }
        Ok(raw.re / norm_sqr)
    }

    pub fn scaled(&self, coeff: f64) -> Self {
        let storage = match &self.storage {
            Storage::Banded { diagonals } => Storage::Banded {
                diagonals: diagonals
                    .iter()
                    .map(|d| d.iter().map(|a| a * coeff).collect())
                    .collect(),
            },
            Storage::DenseReal(data) => {
                Storage::DenseReal(data.iter().map(|a| a * coeff).collect())
            }
            Storage::DenseComplex(data) => {
                Storage::DenseComplex(data.iter().map(|a| a * coeff).collect())
            }
        };
        Self {
            dim: self.dim,
            storage,
            label: self.label.clone(),
        }
    }

    /// `A + shift * I`.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut out = self.clone();
        let dim = self.dim;
        match &mut out.storage {
            Storage::Banded { diagonals } => diagonals[0].iter_mut().for_each(|a| *a += shift),
            Storage::DenseReal(data) => (0..dim).for_each(|i| data[i * dim + i] += shift),
            Storage::DenseComplex(data) => (0..dim).for_each(|i| data[i * dim + i] += shift),
        }
        out
    }

    /// `A + B`, keeping the narrowest storage that represents the sum.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other.dim)?;
        let dim = self.dim;
        let storage = match (&self.storage, &other.storage) {
            (Storage::Banded { diagonals: a }, Storage::Banded { diagonals: b }) => {
                let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
                let mut diagonals = long.clone();
                for (d, s) in diagonals.iter_mut().zip(short) {
                    d.iter_mut().zip(s).for_each(|(x, y)| *x += y);
                }
                Storage::Banded { diagonals }
            }
            _ if self.is_real() && other.is_real() => {
                let a = self.to_real_dense().expect("real");
                let b = other.to_real_dense().expect("real");
                Storage::DenseReal(a.iter().zip(&b).map(|(x, y)| x + y).collect())
            }
            _ => {
                let a = self.to_complex_dense();
                let b = other.to_complex_dense();
                Storage::DenseComplex(a.iter().zip(&b).map(|(x, y)| x + y).collect())
            }
        };
        Ok(Self {
            dim,
            storage,
            label: String::new(),
        })
    }

    /// `A^2`, evaluated in the truncated space. Banded bandwidth doubles.
    pub fn square(&self) -> Self {
        let dim = self.dim;
        match &self.storage {
            Storage::Banded { diagonals } => {
                let b = diagonals.len() - 1;
                let nb = (2 * b).min(dim - 1);
                let mut out: Vec<Vec<f64>> = (0..=nb).map(|k| vec![0.0; dim - k]).collect();
                let elem = |i: usize, j: usize| -> f64 {
                    let k = i.abs_diff(j);
                    if k > b {
                        0.0
                    } else {
                        diagonals[k][i.min(j)]
                    }
                };
                for (k, d) in out.iter_mut().enumerate() {
                    for (i, slot) in d.iter_mut().enumerate() {
                        let j = i + k;
                        let lo = j.saturating_sub(b);
                        let hi = (i + b).min(dim - 1);
                        *slot = (lo..=hi).map(|m| elem(i, m) * elem(m, j)).sum();
                    }
                }
                Self {
                    dim,
                    storage: Storage::Banded { diagonals: out },
                    label: String::new(),
                }
            }
            Storage::DenseReal(a) => {
                let mut out = vec![0.0; dim * dim];
                for i in 0..dim {
                    for j in i..dim {
                        let s: f64 = (0..dim).map(|m| a[i * dim + m] * a[m * dim + j]).sum();
                        out[i * dim + j] = s;
                        out[j * dim + i] = s;
                    }
                }
                Self {
                    dim,
                    storage: Storage::DenseReal(out),
                    label: String::new(),
                }
            }
            Storage::DenseComplex(a) => {
                let mut out = vec![C64::new(0.0, 0.0); dim * dim];
                for i in 0..dim {
                    for j in i..dim {
                        let s: C64 = (0..dim).map(|m| a[i * dim + m] * a[m * dim + j]).sum();
                        out[i * dim + j] = s;
                        out[j * dim + i] = s.conj();
                    }
                    out[i * dim + i].im = 0.0;
                }
                Self {
                    dim,
                    storage: Storage::DenseComplex(out),
                    label: String::new(),
                }
            }
        }
    }
}
