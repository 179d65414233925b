//! Ground-truth covariances, Gaussian sampling, and the Bernoulli
//! missingness mask.
//!
//! The observation model: each component of each sample is observed
//! independently with probability `delta`, and unobserved entries are stored
//! as zero next to an explicit boolean mask. Estimation of `delta` always
//! uses the mask, never the zero pattern, so genuine zeros in the data are
//! not mistaken for missingness.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{DataMatrix, SymMatrix, PSD_TOL};
use crate::rng::{next_unit, GaussianStream, RngSeed};

/// Recipe for a ground-truth covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum CovarianceSpec {
    /// The identity matrix.
    Identity { dim: usize },
    /// Diagonal matrix whose leading entries are the given eigenvalues and
    /// whose remaining `dim - eigenvalues.len()` entries equal `tail`.
    /// `Spiked { dim: p, eigenvalues: [1.0], tail: 1.0 / p }` is the
    /// canonical approximately-low-rank example.
    Spiked {
        dim: usize,
        eigenvalues: Vec<f64>,
        tail: f64,
    },
    /// Diagonal matrix with the given nonnegative values.
    Diagonal { values: Vec<f64> },
    /// An arbitrary PSD matrix given by rows.
    Explicit { rows: Vec<Vec<f64>> },
}

impl CovarianceSpec {
    pub fn dim(&self) -> usize {
        match self {
            CovarianceSpec::Identity { dim } | CovarianceSpec::Spiked { dim, .. } => *dim,
            CovarianceSpec::Diagonal { values } => values.len(),
            CovarianceSpec::Explicit { rows } => rows.len(),
        }
    }

    /// Materializes the PSD covariance matrix described by this spec.
    pub fn build(&self) -> Result<SymMatrix> {
        match self {
            CovarianceSpec::Identity { dim } => {
                if *dim == 0 {
                    return Err(Error::EmptyMatrix);
                }
                Ok(SymMatrix::identity(*dim))
            }
            CovarianceSpec::Spiked {
                dim,
                eigenvalues,
                tail,
            } => {
                if *dim == 0 {
                    return Err(Error::EmptyMatrix);
                }
                if eigenvalues.len() > *dim {
                    return Err(Error::InvalidSpec {
                        reason: format!(
                            "spiked covariance lists {} eigenvalues for dimension {}",
                            eigenvalues.len(),
                            dim
                        ),
                    });
                }
                if !tail.is_finite() || *tail < 0.0 {
                    return Err(Error::InvalidSpec {
                        reason: format!("spiked tail must be finite and nonnegative, got {tail}"),
                    });
                }
                let mut diag = Vec::with_capacity(*dim);
                for &v in eigenvalues {
                    if !v.is_finite() || v < 0.0 {
                        return Err(Error::InvalidSpec {
                            reason: format!(
                                "spiked eigenvalues must be finite and nonnegative, got {v}"
                            ),
                        });
                    }
                    diag.push(v);
                }
                diag.resize(*dim, *tail);
                Ok(SymMatrix::from_diagonal(&diag))
            }
            CovarianceSpec::Diagonal { values } => {
                if values.is_empty() {
                    return Err(Error::EmptyMatrix);
                }
                for &v in values {
                    if !v.is_finite() || v < 0.0 {
                        return Err(Error::InvalidSpec {
                            reason: format!(
                                "diagonal covariance values must be finite and nonnegative, got {v}"
                            ),
                        });
                    }
                }
                Ok(SymMatrix::from_diagonal(values))
            }
            CovarianceSpec::Explicit { rows } => {
                let m = SymMatrix::from_rows(rows)?;
                if !m.is_psd(PSD_TOL) {
                    let min = m.eig()?.min_eigenvalue();
                    return Err(Error::NotPsd {
                        min_eigenvalue: min,
                    });
                }
                Ok(m)
            }
        }
    }
}

/// Zero-filled observations plus the explicit observation mask.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedData {
    y: DataMatrix,
    mask: Vec<bool>, // row-major, true = observed
}

impl MaskedData {
    /// Pairs observations with their mask. Values at unobserved positions
    /// are zero-filled, so callers may pass raw data containing anything at
    /// masked entries.
    pub fn new(mut y: DataMatrix, mask: Vec<bool>) -> Result<Self> {
        let expected = y.rows() * y.cols();
        if mask.len() != expected {
            return Err(Error::EntryCount {
                dim: y.rows(),
                expected,
                actual: mask.len(),
            });
        }
        for i in 0..y.rows() {
            for j in 0..y.cols() {
                if !mask[i * y.cols() + j] {
                    y.set(i, j, 0.0);
                }
            }
        }
        Ok(MaskedData { y, mask })
    }

    /// Fully observed data (mask all true).
    pub fn fully_observed(y: DataMatrix) -> Self {
        let mask = alloc::vec![true; y.rows() * y.cols()];
        MaskedData { y, mask }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.y.rows()
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.y.cols()
    }

    pub fn y(&self) -> &DataMatrix {
        &self.y
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    #[inline]
    pub fn observed(&self, i: usize, j: usize) -> bool {
        self.mask[i * self.y.cols() + j]
    }

    pub fn observed_count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    /// Proportion of observed entries, the natural estimate of `delta`.
    pub fn estimate_delta(&self) -> f64 {
        self.observed_count() as f64 / (self.n() * self.p()) as f64
    }
}

/// Draws `n` i.i.d. rows from `N(0, sigma)` as `R z` with `R` the PSD square
/// root of `sigma` and `z` standard normal. Deterministic per seed.
pub fn sample_gaussian(sigma: &SymMatrix, n: usize, seed: RngSeed) -> Result<DataMatrix> {
    if n == 0 {
        return Err(Error::InvalidSpec {
            reason: alloc::string::String::from("sample count must be at least 1"),
        });
    }
    let root = sigma.psd_sqrt()?;
    let p = sigma.dim();
    let mut stream = GaussianStream::new(seed);
    let mut out = DataMatrix::zeros(n, p);
    let mut z = alloc::vec![0.0; p];
    for i in 0..n {
        for zj in z.iter_mut() {
            *zj = stream.next();
        }
        for j in 0..p {
            let mut sum = 0.0;
            for (k, zk) in z.iter().enumerate() {
                sum += root.get(j, k) * zk;
            }
            out.set(i, j, sum);
        }
    }
    Ok(out)
}

/// Masks each entry of `x` independently with observation probability
/// `delta` and zero-fills the rest. Deterministic per seed.
pub fn apply_mask(x: &DataMatrix, delta: f64, seed: RngSeed) -> Result<MaskedData> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidDelta { value: delta });
    }
    let mut rng = seed.rng();
    let total = x.rows() * x.cols();
    let mut mask = Vec::with_capacity(total);
    for _ in 0..total {
        // next_unit is in [0, 1), so delta = 1 observes everything.
        mask.push(next_unit(&mut rng) < delta);
    }
    MaskedData::new(x.clone(), mask)
}
