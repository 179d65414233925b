//! High-dimensional covariance estimation from observations whose entries
//! are missing completely at random.
//!
//! Each sample coordinate is observed independently with probability
//! `delta` and zero-filled otherwise. The masked empirical covariance is
//! biased for the true covariance; inverting the bias exactly gives an
//! unbiased (possibly indefinite) estimate, and soft-thresholding its
//! spectrum at half the regularization parameter solves the nuclear-norm
//! penalized least-squares problem over the PSD cone in closed form.
//!
//! Modules:
//!
//! * [`linalg`] - dense symmetric matrices, Jacobi eigendecomposition,
//!   norms, effective rank.
//! * [`model`] - ground-truth covariances, Gaussian sampling, Bernoulli
//!   masking.
//! * [`estimator`] - debiasing, spectral soft-thresholding, the data-driven
//!   regularization rule, and diagnostic bounds.
//! * [`oracle`] - an independent projected-gradient minimizer and
//!   oracle-inequality checks certifying the closed form.
//! * [`experiments`] - seeded Monte Carlo sweeps, rate fits, and constant
//!   calibration.
//!
//! The crate is `no_std` (with `alloc`); IO, file formats, and the CLI live
//! in the companion `covest-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod error;
pub mod estimator;
pub mod experiments;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod rng;

pub use error::{Error, Result};
pub use estimator::{
    debias, estimate, masked_empirical_cov, population_bias_map, soft_threshold_psd, DeltaSource,
    EstimateReport, EstimatorConfig, LambdaRule,
};
pub use linalg::{DataMatrix, MatrixNorm, SpectralDecomposition, SymMatrix};
pub use model::{apply_mask, sample_gaussian, CovarianceSpec, MaskedData};
pub use rng::RngSeed;
