use super::{check_dim, C64, NORM_TOL};
use crate::{Error, Result};

/// Amplitudes `a_n` of `sum_n a_n |n>` over a `2^N`-dimensional basis.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amplitudes: Vec<C64>,
}

impl QuantumState {
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        check_dim(amplitudes.len())?;
        Ok(Self { amplitudes })
    }

    /// The basis state `|n>`.
    pub fn basis(dim: usize, n: usize) -> Result<Self> {
        check_dim(dim)?;
        if n >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: n + 1,
            });
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[n] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    /// Equal-weight superposition of every basis state, normalized.
    pub fn uniform(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let a = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(Self {
            amplitudes: vec![a; dim],
        })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }

    pub fn is_finite(&self) -> bool {
        self.amplitudes
            .iter()
            .all(|a| a.re.is_finite() && a.im.is_finite())
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            amplitudes: self.amplitudes.iter().map(|a| a / norm).collect(),
        })
    }

    /// Occupation probabilities `p_n = |a_n|^2`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// `<psi|phi>`, conjugating the first argument.
pub fn inner(psi: &QuantumState, phi: &QuantumState) -> Result<C64> {
    if psi.dim() != phi.dim() {
        return Err(Error::DimensionMismatch {
            expected: psi.dim(),
            found: phi.dim(),
        });
    }
    Ok(dot(psi.amplitudes(), phi.amplitudes()))
}

pub(crate) fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_dimensions() {
        assert!(QuantumState::from_amplitudes(vec![C64::new(1.0, 0.0)]).is_err());
        assert!(QuantumState::from_amplitudes(vec![C64::new(0.0, 0.0); 6]).is_err());
        assert!(QuantumState::basis(4, 4).is_err());
    }

    #[test]
    fn basis_inner_products() {
        let two = QuantumState::basis(8, 2).unwrap();
        let one = QuantumState::basis(8, 1).unwrap();
        assert_eq!(inner(&two, &two).unwrap(), C64::new(1.0, 0.0));
        assert_eq!(inner(&one, &two).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn inner_is_conjugate_symmetric() {
        let psi = QuantumState::from_amplitudes(vec![
            C64::new(0.3, -0.1),
            C64::new(0.2, 0.5),
            C64::new(-0.7, 0.0),
            C64::new(0.0, 0.1),
        ])
        .unwrap();
        let phi = QuantumState::from_amplitudes(vec![
            C64::new(-0.2, 0.4),
            C64::new(0.1, 0.1),
            C64::new(0.6, -0.3),
            C64::new(0.5, 0.2),
        ])
        .unwrap();
        let a = inner(&psi, &phi).unwrap();
        let b = inner(&phi, &psi).unwrap();
        assert!((a - b.conj()).norm() < 1e-15);
        assert!((inner(&psi, &psi).unwrap().norm() - psi.norm_sqr()).abs() < 1e-15);
    }

    #[test]
    fn inner_rejects_mismatch() {
        let a = QuantumState::basis(4, 0).unwrap();
        let b = QuantumState::basis(8, 0).unwrap();
        assert!(matches!(
            inner(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn zero_state_cannot_be_normalized() {
        let z = QuantumState::from_amplitudes(vec![C64::new(0.0, 0.0); 4]).unwrap();
        assert!(matches!(z.normalized(), Err(Error::ZeroNorm)));
        assert!(QuantumState::uniform(16).unwrap().is_normalized());
    }
}
