//! Debiased masked covariance and its nuclear-norm-penalized estimator.
//!
//! Pipeline: masked empirical covariance -> exact bias inversion ->
//! eigenvalue soft-thresholding at `lambda / 2`, with the data-driven
//! `lambda` rule, the sample-size condition, and the deviation-bound
//! diagnostics alongside.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{SpectralDecomposition, SymMatrix, RANK_TOL};
use crate::model::MaskedData;

/// Where the observation probability comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaSource {
    /// Treat `delta` as known. When both a known value and a mask are
    /// available this wins: the model treats `delta` as known once
    /// estimated.
    Known(f64),
    /// Use the observed proportion of mask bits.
    EstimateFromMask,
}

/// How the regularization parameter is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaRule {
    Fixed(f64),
    /// The plug-in rule `C sqrt(tr * spectral norm of the debiased
    /// covariance) / delta * sqrt(log(2p) / n)`.
    DataDriven {
        constant: f64,
    },
}

/// Estimator configuration. Defaults: estimate `delta` from the mask,
/// data-driven `lambda` with constant 1, `c1 = 1` (Gaussian data), and
/// bound constant 1 for diagnostics. The constants are empirical knobs, not
/// canonical values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    pub delta_source: DeltaSource,
    pub lambda_rule: LambdaRule,
    pub c1: f64,
    pub bound_constant: f64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            delta_source: DeltaSource::EstimateFromMask,
            lambda_rule: LambdaRule::DataDriven { constant: 1.0 },
            c1: 1.0,
            bound_constant: 1.0,
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        if let DeltaSource::Known(delta) = self.delta_source {
            if !(delta > 0.0 && delta <= 1.0) {
                return Err(Error::InvalidDelta { value: delta });
            }
        }
        match self.lambda_rule {
            LambdaRule::Fixed(lambda) => {
                if !(lambda >= 0.0 && lambda.is_finite()) {
                    return Err(Error::InvalidLambda { value: lambda });
                }
            }
            LambdaRule::DataDriven { constant } => {
                if !(constant > 0.0 && constant.is_finite()) {
                    return Err(Error::InvalidSpec {
                        reason: alloc::format!(
                            "data-driven lambda constant must be positive, got {constant}"
                        ),
                    });
                }
            }
        }
        if !(self.c1 > 0.0 && self.c1.is_finite()) {
            return Err(Error::InvalidSpec {
                reason: alloc::format!("c1 must be positive, got {}", self.c1),
            });
        }
        if !(self.bound_constant > 0.0 && self.bound_constant.is_finite()) {
            return Err(Error::InvalidSpec {
                reason: alloc::format!(
                    "bound constant must be positive, got {}",
                    self.bound_constant
                ),
            });
        }
        Ok(())
    }
}

/// Everything [`estimate`] produces.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    /// The PSD soft-thresholded estimate.
    pub sigma_hat: SymMatrix,
    /// The debiased (possibly indefinite) covariance estimate.
    pub sigma_tilde: SymMatrix,
    pub lambda_used: f64,
    pub delta_used: f64,
    /// Count of strictly positive kept eigenvalues.
    pub rank_hat: usize,
    /// `tr / spectral norm` of the debiased estimate (0 for the zero
    /// matrix). A diagnostic ratio: unlike the effective rank of a PSD
    /// matrix it may drop below 1 when the debiased estimate is indefinite.
    pub effective_rank_tilde: f64,
    /// Whether `n` clears the sample-size condition, evaluated with the
    /// same trace/spectral ratio and unit constant.
    pub sample_size_ok: bool,
    /// The full thresholded spectrum `(sigma_j - lambda/2)_+`, descending.
    pub kept_eigenvalues: Vec<f64>,
}

/// Empirical covariance of the zero-filled observations,
/// `(1/n) sum_i y_i y_i^T`. PSD by construction.
pub fn masked_empirical_cov(data: &MaskedData) -> SymMatrix {
    let n = data.n();
    let p = data.p();
    let mut acc = alloc::vec![0.0; p * p];
    for i in 0..n {
        let row = data.y().row(i);
        for j in 0..p {
            let yj = row[j];
            if yj == 0.0 {
                continue;
            }
            for k in j..p {
                acc[j * p + k] += yj * row[k];
            }
        }
    }
    let inv_n = 1.0 / n as f64;
    for j in 0..p {
        for k in j..p {
            let v = acc[j * p + k] * inv_n;
            acc[j * p + k] = v;
            acc[k * p + j] = v;
        }
    }
    SymMatrix::from_raw(p, acc)
}

/// The bias the mask induces on a covariance: diagonal entries scale by
/// `delta`, off-diagonal entries by `delta^2`.
pub fn population_bias_map(sigma: &SymMatrix, delta: f64) -> Result<SymMatrix> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidDelta { value: delta });
    }
    let p = sigma.dim();
    let d2 = delta * delta;
    let mut out = alloc::vec![0.0; p * p];
    for i in 0..p {
        for j in 0..p {
            let scale = if i == j { delta } else { d2 };
            out[i * p + j] = scale * sigma.get(i, j);
        }
    }
    Ok(SymMatrix::from_raw(p, out))
}

/// Exact inverse of [`population_bias_map`]: diagonal entries divide by
/// `delta`, off-diagonal entries by `delta^2`. The output is symmetric but
/// may be indefinite for `delta < 1`.
pub fn debias(sigma_n_delta: &SymMatrix, delta: f64) -> Result<SymMatrix> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidDelta { value: delta });
    }
    let p = sigma_n_delta.dim();
    let d2 = delta * delta;
    let mut out = alloc::vec![0.0; p * p];
    for i in 0..p {
        for j in 0..p {
            let scale = if i == j { delta } else { d2 };
            out[i * p + j] = sigma_n_delta.get(i, j) / scale;
        }
    }
    Ok(SymMatrix::from_raw(p, out))
}

/// Soft-thresholds the spectrum: eigenvalues map to
/// `max(0, sigma_j - lambda/2)` while eigenvectors are kept. This is the
/// exact minimizer of `||A - S||_F^2 + lambda ||S||_1` over the PSD cone
/// for any symmetric `A` (negative eigenvalues map to zero).
///
/// Returns the PSD result together with the full thresholded spectrum in
/// descending order.
pub fn soft_threshold_psd(a: &SymMatrix, lambda: f64) -> Result<(SymMatrix, Vec<f64>)> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidLambda { value: lambda });
    }
    let decomp = a.eig()?;
    Ok(soft_threshold_decomposition(&decomp, lambda))
}

pub(crate) fn soft_threshold_decomposition(
    decomp: &SpectralDecomposition,
    lambda: f64,
) -> (SymMatrix, Vec<f64>) {
    let half = 0.5 * lambda;
    let threshold = |v: f64| (v - half).max(0.0);
    let kept: Vec<f64> = decomp.eigenvalues().iter().map(|&v| threshold(v)).collect();
    let result = decomp.reconstruct_with(threshold);
    (result, kept)
}

/// Plug-in regularization parameter
/// `C sqrt(tr(S) ||S||_inf) / delta * sqrt(log(2p) / n)` computed from the
/// debiased covariance `S`. A negative trace means the data are too noisy
/// for the rule.
pub fn data_driven_lambda(
    sigma_tilde: &SymMatrix,
    delta: f64,
    n: usize,
    constant: f64,
) -> Result<f64> {
    let decomp = sigma_tilde.eig()?;
    data_driven_lambda_from_spectrum(
        sigma_tilde.trace(),
        decomp.max_abs_eigenvalue(),
        sigma_tilde.dim(),
        delta,
        n,
        constant,
    )
}

pub(crate) fn data_driven_lambda_from_spectrum(
    trace: f64,
    spectral: f64,
    p: usize,
    delta: f64,
    n: usize,
    constant: f64,
) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidDelta { value: delta });
    }
    if n == 0 {
        return Err(Error::InvalidSpec {
            reason: alloc::string::String::from("sample count must be at least 1"),
        });
    }
    if !(constant > 0.0 && constant.is_finite()) {
        return Err(Error::InvalidSpec {
            reason: alloc::format!("lambda constant must be positive, got {constant}"),
        });
    }
    if trace < 0.0 {
        return Err(Error::NegativeTrace { trace });
    }
    let log_2p = libm::log(2.0 * p as f64);
    Ok(constant * libm::sqrt(trace * spectral) / delta * libm::sqrt(log_2p / n as f64))
}

/// Oracle regularization parameter
/// `C (||sigma||_inf / c1) sqrt(r(sigma) log(2p) / (delta^2 n))` from the
/// true covariance; usable only in simulation.
pub fn oracle_lambda(
    sigma: &SymMatrix,
    delta: f64,
    n: usize,
    p: usize,
    constant: f64,
    c1: f64,
) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidDelta { value: delta });
    }
    if n == 0 {
        return Err(Error::InvalidSpec {
            reason: alloc::string::String::from("sample count must be at least 1"),
        });
    }
    let r = sigma.effective_rank()?;
    let spectral = sigma.norm(crate::linalg::MatrixNorm::Spectral);
    let log_2p = libm::log(2.0 * p as f64);
    Ok(constant * (spectral / c1) * libm::sqrt(r * log_2p / (delta * delta * n as f64)))
}

/// Sample-size condition `n >= c (r(sigma) / delta^2) log^2(max(2p, n))`.
pub fn sample_size_check(
    sigma: &SymMatrix,
    delta: f64,
    n: usize,
    p: usize,
    c: f64,
) -> Result<bool> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidDelta { value: delta });
    }
    let r = sigma.effective_rank()?;
    Ok(sample_size_check_ratio(r, delta, n, p, c))
}

fn sample_size_check_ratio(r: f64, delta: f64, n: usize, p: usize, c: f64) -> bool {
    let arg = (2.0 * p as f64).max(n as f64);
    let log_term = libm::log(arg);
    n as f64 >= c * (r / (delta * delta)) * log_term * log_term
}

/// Deviation envelope for the debiased covariance in spectral norm, at
/// confidence `1 - exp(-t)`:
/// `C (||sigma||_inf / c1) max{ sqrt(r (t + log 2p) / (delta^2 n)),
/// (r (t + log 2p) / (delta^2 n)) (c1 delta + t + log n) }`.
pub fn deviation_bound(
    sigma: &SymMatrix,
    delta: f64,
    n: usize,
    p: usize,
    t: f64,
    constant: f64,
    c1: f64,
) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidDelta { value: delta });
    }
    let r = sigma.effective_rank()?;
    let spectral = sigma.norm(crate::linalg::MatrixNorm::Spectral);
    let base = r * (t + libm::log(2.0 * p as f64)) / (delta * delta * n as f64);
    let first = libm::sqrt(base);
    let second = base * (c1 * delta + t + libm::log(n as f64));
    Ok(constant * (spectral / c1) * first.max(second))
}

/// Trace deviation envelope at confidence `1 - exp(-t)`:
/// `C tr(sigma) / (c1 delta) max{ sqrt(t/n), t/n }`.
pub fn trace_deviation_bound(
    sigma: &SymMatrix,
    delta: f64,
    n: usize,
    t: f64,
    constant: f64,
    c1: f64,
) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidDelta { value: delta });
    }
    let ratio = t / n as f64;
    Ok(constant * sigma.trace() / (c1 * delta) * libm::sqrt(ratio).max(ratio))
}

/// Runs the full pipeline: resolve `delta`, form the masked empirical
/// covariance, debias it, resolve `lambda`, and soft-threshold.
pub fn estimate(data: &MaskedData, config: &EstimatorConfig) -> Result<EstimateReport> {
    config.validate()?;
    let delta = match config.delta_source {
        DeltaSource::Known(v) => v,
        DeltaSource::EstimateFromMask => {
            let d = data.estimate_delta();
            if d == 0.0 {
                return Err(Error::EmptyMask);
            }
            d
        }
    };

    let sigma_n_delta = masked_empirical_cov(data);
    let sigma_tilde = debias(&sigma_n_delta, delta)?;
    let decomp = sigma_tilde.eig()?;

    let trace_tilde = sigma_tilde.trace();
    let spectral_tilde = decomp.max_abs_eigenvalue();
    let p = data.p();
    let n = data.n();

    let lambda = match config.lambda_rule {
        LambdaRule::Fixed(v) => v,
        LambdaRule::DataDriven { constant } => {
            data_driven_lambda_from_spectrum(trace_tilde, spectral_tilde, p, delta, n, constant)?
        }
    };

    let (sigma_hat, kept_eigenvalues) = soft_threshold_decomposition(&decomp, lambda);
    let rank_hat = kept_eigenvalues.iter().filter(|&&v| v > 0.0).count();

    // The trace/spectral ratio of the debiased estimate stands in for the
    // effective rank of the unknown covariance; it is reported as-is even
    // when the debiased estimate is indefinite.
    let effective_rank_tilde = if spectral_tilde == 0.0 {
        0.0
    } else {
        trace_tilde / spectral_tilde
    };
    let sample_size_ok =
        trace_tilde > 0.0 && sample_size_check_ratio(effective_rank_tilde, delta, n, p, 1.0);

    Ok(EstimateReport {
        sigma_hat,
        sigma_tilde,
        lambda_used: lambda,
        delta_used: delta,
        rank_hat,
        effective_rank_tilde,
        sample_size_ok,
        kept_eigenvalues,
    })
}

/// Numerical rank used in the Frobenius penalty term, shared with the
/// oracle-verification module.
pub(crate) fn penalty_rank(sigma: &SymMatrix) -> usize {
    let decomp = sigma.eig().expect("eigensolver did not converge");
    let threshold = RANK_TOL * decomp.max_abs_eigenvalue();
    decomp
        .eigenvalues()
        .iter()
        .filter(|v| libm::fabs(**v) > threshold)
        .count()
}
