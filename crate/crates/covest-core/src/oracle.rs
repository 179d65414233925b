//! Independent verification of the closed-form estimator.
//!
//! A projected-gradient minimizer for the penalized problem certifies the
//! soft-thresholding closed form, and an oracle-inequality evaluator turns
//! the theoretical guarantees into per-replicate checks.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::estimator::penalty_rank;
use crate::linalg::{MatrixNorm, SymMatrix, PSD_TOL};

/// `(1 + sqrt 2)^2 / 8`, the constant in the rank branch of the Frobenius
/// oracle inequality.
pub fn frobenius_rank_constant() -> f64 {
    let r = 1.0 + core::f64::consts::SQRT_2;
    r * r / 8.0
}

/// Relative slack absorbing eigensolver rounding when checking inequalities
/// that hold deterministically in exact arithmetic.
const CHECK_SLACK: f64 = 1e-9;

/// Projected-gradient settings. The objective `||S - A||_F^2 + lambda tr(S)`
/// has a 2-Lipschitz gradient, so any step below 1/2 descends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PgdSettings {
    pub step_size: f64,
    pub max_iters: usize,
    pub convergence_tol: f64,
}

impl Default for PgdSettings {
    fn default() -> Self {
        PgdSettings {
            step_size: 0.25,
            max_iters: 50_000,
            convergence_tol: 1e-10,
        }
    }
}

impl PgdSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0 && self.step_size < 0.5) {
            return Err(Error::InvalidSpec {
                reason: format!("step size must lie in (0, 0.5), got {}", self.step_size),
            });
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidSpec {
                reason: String::from("max_iters must be at least 1"),
            });
        }
        if !(self.convergence_tol > 0.0 && self.convergence_tol.is_finite()) {
            return Err(Error::InvalidSpec {
                reason: format!(
                    "convergence tolerance must be positive, got {}",
                    self.convergence_tol
                ),
            });
        }
        Ok(())
    }
}

fn project_psd(a: &SymMatrix) -> Result<SymMatrix> {
    Ok(a.eig()?.reconstruct_with(|v| v.max(0.0)))
}

fn objective(s: &SymMatrix, a: &SymMatrix, lambda: f64) -> f64 {
    // On the PSD cone the nuclear norm is the trace.
    let d = s.sub(a).frobenius_norm();
    d * d + lambda * s.trace()
}

/// Minimizes `||A - S||_F^2 + lambda ||S||_1` over the PSD cone by
/// projected gradient descent from `S_0 = proj(A)`. The objective is
/// checked to be non-increasing every iteration; convergence is declared
/// when successive iterates are within `convergence_tol` in Frobenius norm.
pub fn minimize_penalized(a: &SymMatrix, lambda: f64, settings: &PgdSettings) -> Result<SymMatrix> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidLambda { value: lambda });
    }
    settings.validate()?;

    let p = a.dim();
    let eta = settings.step_size;
    let mut current = project_psd(a)?;
    let mut obj = objective(&current, a, lambda);
    let mut residual = f64::INFINITY;

    for iter in 0..settings.max_iters {
        // S - eta (2 (S - A) + lambda I)
        let mut stepped = alloc::vec![0.0; p * p];
        for i in 0..p {
            for j in 0..p {
                let g = 2.0 * (current.get(i, j) - a.get(i, j)) + if i == j { lambda } else { 0.0 };
                stepped[i * p + j] = current.get(i, j) - eta * g;
            }
        }
        let next = project_psd(&SymMatrix::from_raw(p, stepped))?;
        let next_obj = objective(&next, a, lambda);
        if next_obj > obj + 1e-12 * obj.abs().max(1.0) {
            return Err(Error::PgdObjectiveIncrease {
                previous: obj,
                current: next_obj,
            });
        }
        residual = next.sub(&current).frobenius_norm();
        current = next;
        obj = next_obj;
        if residual <= settings.convergence_tol {
            return Ok(current);
        }
        let _ = iter;
    }
    Err(Error::PgdNoConvergence {
        residual,
        iters: settings.max_iters,
    })
}

/// One candidate in the oracle-inequality right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleCandidate {
    pub description: String,
    pub rank: usize,
    pub rhs_value: f64,
}

/// The right-hand side of the Frobenius oracle inequality evaluated over a
/// family of candidates, together with its minimum.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleCurve {
    pub candidates: Vec<OracleCandidate>,
    pub infimum: f64,
}

/// Evaluates `||S - sigma||_F^2 + min{2 lambda ||S||_1,
/// ((1+sqrt2)^2/8) lambda^2 rank(S)}` over spectral truncations of `sigma`
/// at the given ranks, plus `S = sigma` and `S = 0`.
///
/// Truncations share eigenvectors with `sigma`, so each term is computed
/// exactly from the spectrum. The family minimum upper-bounds the infimum
/// over all PSD matrices.
pub fn oracle_rhs(
    sigma: &SymMatrix,
    lambda: f64,
    truncation_ranks: &[usize],
) -> Result<OracleCurve> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidLambda { value: lambda });
    }
    let p = sigma.dim();
    let decomp = sigma.eig()?;
    let spectral = decomp.max_abs_eigenvalue();
    let min_eig = decomp.min_eigenvalue();
    if min_eig < -PSD_TOL * spectral {
        return Err(Error::NotPsd {
            min_eigenvalue: min_eig,
        });
    }
    let eigenvalues = decomp.eigenvalues();
    let rank_constant = frobenius_rank_constant();

    // rhs for the candidate whose spectrum keeps (clipped) eigenvalues
    // 0..keep and zeroes the rest.
    let candidate_from_spectrum = |keep: usize, description: String| {
        let mut approx_sq = 0.0;
        let mut nuclear = 0.0;
        let mut rank = 0usize;
        for (j, &v) in eigenvalues.iter().enumerate() {
            let kept = if j < keep { v.max(0.0) } else { 0.0 };
            let diff = kept - v;
            approx_sq += diff * diff;
            nuclear += kept;
            if kept > 0.0 {
                rank += 1;
            }
        }
        let penalty = (2.0 * lambda * nuclear).min(rank_constant * lambda * lambda * rank as f64);
        OracleCandidate {
            description,
            rank,
            rhs_value: approx_sq + penalty,
        }
    };

    let mut candidates = Vec::with_capacity(truncation_ranks.len() + 2);
    for &k in truncation_ranks {
        if k > p {
            return Err(Error::RankExceedsDim { rank: k, dim: p });
        }
        candidates.push(candidate_from_spectrum(k, format!("rank-{k} truncation")));
    }
    candidates.push(candidate_from_spectrum(p, String::from("sigma")));
    candidates.push(candidate_from_spectrum(0, String::from("zero")));

    let infimum = candidates
        .iter()
        .map(|c| c.rhs_value)
        .fold(f64::INFINITY, f64::min);
    Ok(OracleCurve {
        candidates,
        infimum,
    })
}

/// Outcome of checking both oracle inequalities on one realization.
/// The inequality checks are meaningful only when the event
/// `lambda >= 2 ||sigma_tilde - sigma||_inf` holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleVerdict {
    pub event_holds: bool,
    pub frobenius_ok: Option<bool>,
    pub spectral_ok: Option<bool>,
}

/// Spectral-norm bound check: `||sigma_hat - sigma||_inf <= lambda`.
pub fn spectral_bound_ok(spectral_error: f64, lambda: f64) -> bool {
    spectral_error <= lambda * (1.0 + CHECK_SLACK) + f64::EPSILON
}

/// Frobenius bound check with the candidate `S = sigma`:
/// `||sigma_hat - sigma||_F^2 <= min{2 lambda ||sigma||_1,
/// ((1+sqrt2)^2/8) lambda^2 rank(sigma)}`.
pub fn frobenius_bound_ok(
    frobenius_error_sq: f64,
    lambda: f64,
    nuclear_sigma: f64,
    rank_sigma: usize,
) -> bool {
    let rhs = (2.0 * lambda * nuclear_sigma)
        .min(frobenius_rank_constant() * lambda * lambda * rank_sigma as f64);
    frobenius_error_sq <= rhs * (1.0 + CHECK_SLACK) + f64::EPSILON
}

/// Checks both Theorem-1-style inequalities on one realization. All three
/// matrices must share a dimension (panics otherwise).
pub fn verify_oracle_inequality(
    sigma: &SymMatrix,
    sigma_hat: &SymMatrix,
    sigma_tilde: &SymMatrix,
    lambda: f64,
) -> OracleVerdict {
    assert_eq!(sigma.dim(), sigma_hat.dim(), "dimension mismatch");
    assert_eq!(sigma.dim(), sigma_tilde.dim(), "dimension mismatch");

    let dev = sigma_tilde.sub(sigma).norm(MatrixNorm::Spectral);
    if lambda < 2.0 * dev {
        return OracleVerdict {
            event_holds: false,
            frobenius_ok: None,
            spectral_ok: None,
        };
    }
    let spectral_error = sigma_hat.sub(sigma).norm(MatrixNorm::Spectral);
    let frobenius_error = sigma_hat.sub(sigma).frobenius_norm();
    let nuclear = sigma.norm(MatrixNorm::Nuclear);
    let rank = penalty_rank(sigma);
    OracleVerdict {
        event_holds: true,
        spectral_ok: Some(spectral_bound_ok(spectral_error, lambda)),
        frobenius_ok: Some(frobenius_bound_ok(
            frobenius_error * frobenius_error,
            lambda,
            nuclear,
            rank,
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn pgd_matches_diagonal_closed_form() {
        let a = SymMatrix::from_diagonal(&[3.0, 1.0]);
        let s = minimize_penalized(&a, 4.0, &PgdSettings::default()).unwrap();
        let expected = SymMatrix::from_diagonal(&[1.0, 0.0]);
        assert!(s.sub(&expected).frobenius_norm() <= 1e-6);
    }

    #[test]
    fn pgd_lambda_zero_returns_psd_input() {
        let a = SymMatrix::from_entries(2, alloc::vec![2.0, 0.5, 0.5, 1.0]).unwrap();
        let s = minimize_penalized(&a, 0.0, &PgdSettings::default()).unwrap();
        assert!(s.sub(&a).frobenius_norm() <= 1e-9);
    }

    #[test]
    fn pgd_rejects_bad_settings() {
        let a = SymMatrix::identity(2);
        let bad = PgdSettings {
            step_size: 0.9,
            ..PgdSettings::default()
        };
        assert!(matches!(
            minimize_penalized(&a, 1.0, &bad),
            Err(Error::InvalidSpec { .. })
        ));
        assert!(matches!(
            minimize_penalized(&a, -0.1, &PgdSettings::default()),
            Err(Error::InvalidLambda { .. })
        ));
    }

    #[test]
    fn oracle_rhs_hand_values() {
        // diag(3, 1, 0) with lambda = 1 and ranks {1, 2}.
        let sigma = SymMatrix::from_diagonal(&[3.0, 1.0, 0.0]);
        let curve = oracle_rhs(&sigma, 1.0, &[1, 2]).unwrap();
        let c = frobenius_rank_constant();
        assert_close(c, 0.7285533905932737, 1e-15);
        // rank-1: 1 + min{6, c}.
        assert_close(curve.candidates[0].rhs_value, 1.0 + c, 1e-12);
        assert_eq!(curve.candidates[0].rank, 1);
        // rank-2 keeps everything: 0 + min{8, 2c}.
        assert_close(curve.candidates[1].rhs_value, 2.0 * c, 1e-12);
        // S = sigma is the same as rank-2 here; S = 0 costs the full
        // Frobenius mass.
        assert_close(curve.candidates[2].rhs_value, 2.0 * c, 1e-12);
        assert_close(curve.candidates[3].rhs_value, 10.0, 1e-12);
        assert_eq!(curve.candidates[3].rank, 0);
        assert_close(curve.infimum, 2.0 * c, 1e-12);
    }

    #[test]
    fn oracle_rhs_lambda_zero_attained_at_sigma() {
        let sigma = SymMatrix::from_diagonal(&[2.0, 1.0]);
        let curve = oracle_rhs(&sigma, 0.0, &[1]).unwrap();
        assert_eq!(curve.infimum, 0.0);
    }

    #[test]
    fn oracle_rhs_rejects_bad_rank() {
        let sigma = SymMatrix::identity(2);
        assert!(matches!(
            oracle_rhs(&sigma, 1.0, &[3]),
            Err(Error::RankExceedsDim { .. })
        ));
    }

    #[test]
    fn verdict_trivial_cases() {
        let sigma = SymMatrix::from_diagonal(&[2.0, 1.0]);
        // sigma_hat == sigma with a generous lambda: both checks pass.
        let v = verify_oracle_inequality(&sigma, &sigma, &sigma, 1.0);
        assert!(v.event_holds);
        assert_eq!(v.spectral_ok, Some(true));
        assert_eq!(v.frobenius_ok, Some(true));

        // Event fails when lambda is below twice the deviation.
        let tilde = SymMatrix::from_diagonal(&[4.0, 1.0]);
        let v = verify_oracle_inequality(&sigma, &sigma, &tilde, 1.0);
        assert!(!v.event_holds);
        assert_eq!(v.spectral_ok, None);
        assert_eq!(v.frobenius_ok, None);
    }
}
