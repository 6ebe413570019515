//! Independent ground truth for tests and acceptance checks: dense exact
//! diagonalization and imaginary-time projection. Nothing in the simulation
//! pipeline calls into this module.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::linalg::{inner, HermitianOperator, QuantumState, C64};
use crate::{Error, Result};

pub const MAX_DIAG_DIM: usize = 4096;
pub const IMAGINARY_TIME_STEP_CAP: usize = 1_000_000;

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[k]` belongs to `eigenvalues[k]`.
    pub eigenvectors: Vec<Vec<f64>>,
    /// `max_k |H v_k - E_k v_k|`.
    pub residual: f64,
    /// `max_{j != k} |<v_j|v_k>|`.
    pub orthogonality: f64,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn state(&self, k: usize) -> QuantumState {
        QuantumState::from_amplitudes(
            self.eigenvectors[k]
                .iter()
                .map(|&a| C64::new(a, 0.0))
                .collect(),
        )
        .expect("eigenvector has the operator dimension")
    }

    /// `|<v_k|psi>|^2 / <psi|psi>`.
    pub fn fidelity(&self, k: usize, psi: &QuantumState) -> Result<f64> {
        let overlap = inner(&self.state(k), psi)?;
        Ok(overlap.norm_sqr() / psi.norm_sqr())
    }

    pub fn count_below(&self, threshold: f64) -> usize {
        self.eigenvalues.iter().filter(|&&e| e < threshold).count()
    }
}

fn frobenius(data: &[f64]) -> f64 {
    data.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn max_residual(h: &DMatrix<f64>, values: &DVector<f64>, vectors: &DMatrix<f64>) -> f64 {
    let r = h * vectors - vectors * DMatrix::from_diagonal(values);
    r.column_iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Cyclic Jacobi rotations on `V^T H V`, accumulated into `V`.
fn jacobi_polish(h: &DMatrix<f64>, mut v: DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = h.nrows();
    let mut a = v.transpose() * h * &v;
    for _sweep in 0..50 {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)] * a[(p, q)])
            .sum();
        if off.sqrt() <= f64::EPSILON * 1e-3 * a.norm() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    (a.diagonal(), v)
}

pub fn diagonalize(h: &HermitianOperator) -> Result<SpectralDecomposition> {
    let dim = h.dim();
    if dim > MAX_DIAG_DIM {
        return Err(Error::InvalidRequest(format!(
            "dimension {dim} exceeds dense diagonalization limit {MAX_DIAG_DIM}"
        )));
    }
    let data = h.to_real_dense().ok_or_else(|| {
        Error::InvalidRequest(
            "oracle diagonalization supports real symmetric operators only".into(),
        )
    })?;
    let matrix = DMatrix::from_row_slice(dim, dim, &data);
    let eig = SymmetricEigen::new(matrix.clone());
    let scale = frobenius(&data).max(1.0);
    let (mut values, mut vectors) = (eig.eigenvalues, eig.eigenvectors);
    if max_residual(&matrix, &values, &vectors) > 1e-10 * scale {
        // QL deflation is occasionally sloppy when the off-diagonal part is
        // tiny (f close to 0 in a sweep); Jacobi sweeps on V^T H V fix it.
        (values, vectors) = jacobi_polish(&matrix, vectors);
    }

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| values[k]).collect();
    let eigenvectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&k| vectors.column(k).iter().copied().collect())
        .collect();

    let mut residual = 0.0f64;
    for (e, v) in eigenvalues.iter().zip(&eigenvectors) {
        let hv = &matrix * nalgebra::DVector::from_column_slice(v);
        let r = hv
            .iter()
            .zip(v)
            .map(|(a, b)| (a - e * b).powi(2))
            .sum::<f64>()
            .sqrt();
        residual = residual.max(r);
    }
    let mut orthogonality = 0.0f64;
    for j in 0..dim {
        for k in (j + 1)..dim {
            let d: f64 = eigenvectors[j]
                .iter()
                .zip(&eigenvectors[k])
                .map(|(a, b)| a * b)
                .sum();
            orthogonality = orthogonality.max(d.abs());
        }
    }

    if residual > 1e-10 * scale || orthogonality > 1e-10 {
        return Err(Error::Convergence(format!(
            "residual {residual:e}, orthogonality defect {orthogonality:e}"
        )));
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        residual,
        orthogonality,
    })
}

/// Default Euler step for [`imaginary_time_ground`], `0.1 / |H|_gershgorin`.
pub fn default_imaginary_step(h: &HermitianOperator) -> f64 {
    0.1 / h.gershgorin_bound().max(f64::MIN_POSITIVE)
}

/// Projects `psi0` onto the ground state with `psi <- normalize((1 - dtau H) psi)`
/// until the Rayleigh quotient changes by less than `tol` in one step.
pub fn imaginary_time_ground(
    h: &HermitianOperator,
    psi0: &QuantumState,
    dtau: f64,
    tol: f64,
) -> Result<(f64, QuantumState)> {
    if !(dtau.is_finite() && dtau > 0.0) {
        return Err(Error::InvalidRequest(format!(
            "dtau must be positive, got {dtau}"
        )));
    }
    let mut psi = psi0.normalized()?;
    let mut energy = h.expectation(&psi)?;
    for _ in 0..IMAGINARY_TIME_STEP_CAP {
        let hpsi = h.apply(&psi)?;
        let next: Vec<C64> = psi
            .amplitudes()
            .iter()
            .zip(hpsi.amplitudes())
            .map(|(p, hp)| p - hp * dtau)
            .collect();
        psi = QuantumState::from_amplitudes(next)?.normalized()?;
        let e = h.expectation(&psi)?;
        let change = (e - energy).abs();
        energy = e;
        if change < tol {
            return Ok((energy, psi));
        }
    }
    Err(Error::IterationCap(IMAGINARY_TIME_STEP_CAP))
}
