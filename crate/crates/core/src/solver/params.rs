use crate::error::{Error, Result};
use crate::frames::DictionaryKind;
use crate::Scalar;

/// Regularization and penalty parameters.
///
/// `lambda` and `rho` are indexed like the solver's dictionary list.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverParams<T> {
    pub lambda: Vec<T>,
    pub beta: T,
    pub rho: Vec<T>,
    pub mu: T,
    pub gamma: T,
    /// Relative-change stopping threshold.
    pub tol: T,
    pub max_iter: usize,
}

/// Typical sparsity weight of the wavelet dictionary.
pub const LAMBDA_WAVELET: f64 = 4e-5;
/// Typical sparsity weight of the contourlet dictionary.
pub const LAMBDA_CONTOURLET: f64 = 2e-4;
pub const BETA: f64 = 2e-3;
pub const RHO: f64 = 1e-3;
pub const MU: f64 = 1e-2;
pub const GAMMA: f64 = 1e-1;
pub const TOL: f64 = 1e-4;
pub const MAX_ITER: usize = 500;

impl<T: Scalar> SolverParams<T> {
    /// Typical values for the given dictionary list.
    pub fn typical(dicts: &[DictionaryKind]) -> Self {
        let lambda = dicts
            .iter()
            .map(|k| match k {
                DictionaryKind::Wavelet => T::lit(LAMBDA_WAVELET),
                DictionaryKind::Contourlet => T::lit(LAMBDA_CONTOURLET),
            })
            .collect();
        Self {
            lambda,
            beta: T::lit(BETA),
            rho: vec![T::lit(RHO); dicts.len()],
            mu: T::lit(MU),
            gamma: T::lit(GAMMA),
            tol: T::lit(TOL),
            max_iter: MAX_ITER,
        }
    }

    pub fn dictionaries(&self) -> usize {
        self.lambda.len()
    }

    /// Checks positivity and per-dictionary lengths.
    pub fn validate(&self, dictionaries: usize) -> Result<()> {
        if self.lambda.len() != dictionaries || self.rho.len() != dictionaries {
            return Err(Error::Parameter(format!(
                "{} lambda / {} rho values for {dictionaries} dictionaries",
                self.lambda.len(),
                self.rho.len()
            )));
        }
        let named = self
            .lambda
            .iter()
            .map(|&v| ("lambda", v))
            .chain(self.rho.iter().map(|&v| ("rho", v)))
            .chain([("beta", self.beta), ("mu", self.mu), ("gamma", self.gamma), ("tol", self.tol)]);
        for (name, v) in named {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::Parameter(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.max_iter == 0 {
            return Err(Error::Parameter("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

impl<T: Scalar> Default for SolverParams<T> {
    /// Typical values for the wavelet + contourlet pair.
    fn default() -> Self {
        Self::typical(&[DictionaryKind::Wavelet, DictionaryKind::Contourlet])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn typical_values() {
        let p = SolverParams::<f64>::default();
        assert_eq!(p.lambda, vec![4e-5, 2e-4]);
        assert_eq!(p.rho, vec![1e-3, 1e-3]);
        assert_eq!((p.beta, p.mu, p.gamma), (2e-3, 1e-2, 1e-1));
        assert!(p.validate(2).is_ok());
    }

    #[test]
    fn validation_rejects_bad_values() {
        let mut p = SolverParams::<f64>::default();
        assert!(p.validate(1).is_err());
        p.mu = 0.0;
        assert!(p.validate(2).is_err());
        let mut q = SolverParams::<f64>::default();
        q.max_iter = 0;
        assert!(q.validate(2).is_err());
    }
}
