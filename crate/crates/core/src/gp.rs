//! Exact Gaussian-process regression with a unit-amplitude RBF kernel.
//!
//! The posterior at a query `q` given training inputs `X`, values `f`,
//! constant prior mean `m` and kernel matrix `K` is
//!
//! ```text
//! mean(q) = m + k(X, q)ᵀ (K + s·I)⁻¹ (f − m)
//! var(q)  = 1 − k(X, q)ᵀ (K + s·I)⁻¹ k(X, q)
//! ```
//!
//! with `s` the noise (jitter) variance. Solves go through a Cholesky factor;
//! nothing is ever inverted explicitly.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::{Error, Point2};

/// Hyperparameters of the RBF kernel and the constant prior mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    /// Squared lengthscale in normalized coordinates.
    pub lengthscale_sq: f64,
    /// Added to the kernel diagonal; also acts as numerical jitter.
    pub noise_var: f64,
    pub prior_mean: f64,
}

impl KernelParams {
    pub const DEFAULT_LENGTHSCALE_SQ: f64 = 0.017;
    pub const DEFAULT_NOISE_VAR: f64 = 1e-6;

    pub fn new(lengthscale_sq: f64, noise_var: f64, prior_mean: f64) -> Result<Self, Error> {
        let params = KernelParams {
            lengthscale_sq,
            noise_var,
            prior_mean,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.lengthscale_sq.is_finite() && self.lengthscale_sq > 0.0) {
            return Err(Error::InvalidParameter(
                "lengthscale_sq must be positive and finite",
            ));
        }
        if !(self.noise_var.is_finite() && self.noise_var >= 0.0) {
            return Err(Error::InvalidParameter(
                "noise_var must be non-negative and finite",
            ));
        }
        if !self.prior_mean.is_finite() {
            return Err(Error::InvalidParameter("prior_mean must be finite"));
        }
        Ok(())
    }

    pub fn with_prior_mean(mut self, prior_mean: f64) -> Self {
        self.prior_mean = prior_mean;
        self
    }
}

impl Default for KernelParams {
    fn default() -> Self {
        KernelParams {
            lengthscale_sq: Self::DEFAULT_LENGTHSCALE_SQ,
            noise_var: Self::DEFAULT_NOISE_VAR,
            prior_mean: 0.0,
        }
    }
}

/// `exp(-|a - b|² / (2 σ²))`.
#[inline]
pub fn rbf(a: Point2, b: Point2, params: &KernelParams) -> f64 {
    libm::exp(-a.dist_sq(b) / (2.0 * params.lengthscale_sq))
}

pub fn kernel_matrix(xs: &[Point2], ys: &[Point2], params: &KernelParams) -> DMatrix<f64> {
    DMatrix::from_fn(xs.len(), ys.len(), |i, j| rbf(xs[i], ys[j], params))
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainingSet {
    inputs: Vec<Point2>,
    values: Vec<f64>,
}

impl TrainingSet {
    pub fn new(inputs: Vec<Point2>, values: Vec<f64>) -> Result<Self, Error> {
        if inputs.len() != values.len() {
            return Err(Error::InvalidParameter(
                "inputs and values differ in length",
            ));
        }
        if inputs.iter().any(|p| !p.in_unit_square()) {
            return Err(Error::InvalidParameter("training input outside [0,1]²"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("training value is not finite"));
        }
        Ok(TrainingSet { inputs, values })
    }

    pub fn empty() -> Self {
        TrainingSet::default()
    }

    pub fn inputs(&self) -> &[Point2] {
        &self.inputs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub mean: f64,
    pub variance: f64,
}

/// A trained GP. Cheap to query, never mutated after [`fit`].
#[derive(Debug, Clone, PartialEq)]
pub struct FittedGP {
    training: TrainingSet,
    params: KernelParams,
    lower: DMatrix<f64>,
    weights: DVector<f64>,
}

pub fn fit(training: TrainingSet, params: KernelParams) -> Result<FittedGP, Error> {
    params.validate()?;
    let mut k = kernel_matrix(training.inputs(), training.inputs(), &params);
    for i in 0..training.len() {
        k[(i, i)] += params.noise_var;
    }
    let factor = k.cholesky().ok_or(Error::FactorizationFailure)?;
    let centered = DVector::from_iterator(
        training.len(),
        training.values().iter().map(|v| v - params.prior_mean),
    );
    let weights = factor.solve(&centered);
    Ok(FittedGP {
        training,
        params,
        lower: factor.unpack(),
        weights,
    })
}

impl FittedGP {
    /// The GP prior: no data, constant mean, unit variance.
    pub fn prior(params: KernelParams) -> Result<Self, Error> {
        fit(TrainingSet::empty(), params)
    }

    pub fn training_set(&self) -> &TrainingSet {
        &self.training
    }

    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    /// Lower-triangular `L` with `L Lᵀ = K + noise_var·I`.
    pub fn factor(&self) -> &DMatrix<f64> {
        &self.lower
    }

    /// `(K + noise_var·I)⁻¹ (values − prior_mean)`.
    pub fn weights(&self) -> &[f64] {
        self.weights.as_slice()
    }

    pub fn predict_point(&self, query: Point2) -> Prediction {
        let mut scratch = DVector::zeros(self.training.len());
        self.predict_with(query, &mut scratch)
    }

    pub fn predict(&self, queries: &[Point2]) -> Vec<Prediction> {
        let mut scratch = DVector::zeros(self.training.len());
        queries
            .iter()
            .map(|&q| self.predict_with(q, &mut scratch))
            .collect()
    }

    /// Posterior means only; skips the triangular solve.
    pub fn predict_mean(&self, queries: &[Point2]) -> Vec<f64> {
        queries
            .iter()
            .map(|&q| {
                let correction: f64 = self
                    .training
                    .inputs()
                    .iter()
                    .zip(self.weights.iter())
                    .map(|(&x, w)| rbf(x, q, &self.params) * w)
                    .sum();
                self.params.prior_mean + correction
            })
            .collect()
    }

    fn predict_with(&self, query: Point2, kstar: &mut DVector<f64>) -> Prediction {
        for (k, &x) in kstar.iter_mut().zip(self.training.inputs()) {
            *k = rbf(x, query, &self.params);
        }
        let correction: f64 = kstar
            .iter()
            .zip(self.weights.iter())
            .map(|(k, w)| k * w)
            .sum();
        self.lower.solve_lower_triangular_unchecked_mut(kstar);
        let explained: f64 = kstar.iter().map(|v| v * v).sum();
        Prediction {
            mean: self.params.prior_mean + correction,
            variance: (1.0 - explained).max(0.0),
        }
    }
}
