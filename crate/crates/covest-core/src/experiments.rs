//! Monte Carlo harness: seeded replicate sweeps over (n, delta) grids,
//! error aggregation, log-log rate fits, and calibration of the data-driven
//! lambda constant.
//!
//! Replicate `r` at grid point `g` always draws from substream
//! `seed.substream(g).substream(r)`, so results are independent of
//! execution order and bit-identical across runs.

use alloc::string::String;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{estimate, DeltaSource, EstimatorConfig, LambdaRule};
use crate::linalg::{MatrixNorm, SymMatrix};
use crate::model::{apply_mask, sample_gaussian, CovarianceSpec};
use crate::oracle::{frobenius_bound_ok, spectral_bound_ok};
use crate::rng::RngSeed;

/// Geometric grid `2^k / 8, k = 0..8` searched by [`calibrate_constant`].
pub const CALIBRATION_GRID: [f64; 9] = [0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0];

/// A full sweep description: ground truth, (n, delta) grid, replicate count,
/// estimator configuration, and the base seed.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub covariance: CovarianceSpec,
    pub n_grid: Vec<usize>,
    pub delta_grid: Vec<f64>,
    pub replicates: usize,
    /// Per grid point, a `Known(_)` delta source is replaced by the grid
    /// point's true delta; `EstimateFromMask` is kept as-is.
    pub estimator: EstimatorConfig,
    pub seed: RngSeed,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() || self.delta_grid.is_empty() {
            return Err(Error::InvalidSpec {
                reason: String::from("n and delta grids must be non-empty"),
            });
        }
        if self.n_grid.contains(&0) {
            return Err(Error::InvalidSpec {
                reason: String::from("grid sample counts must be at least 1"),
            });
        }
        for &d in &self.delta_grid {
            if !(d > 0.0 && d <= 1.0) {
                return Err(Error::InvalidDelta { value: d });
            }
        }
        if self.replicates == 0 {
            return Err(Error::InvalidSpec {
                reason: String::from("replicates must be at least 1"),
            });
        }
        self.estimator.validate()?;
        self.covariance.build()?;
        Ok(())
    }

    fn grid(&self) -> Vec<(usize, f64)> {
        let mut points = Vec::with_capacity(self.n_grid.len() * self.delta_grid.len());
        for &n in &self.n_grid {
            for &delta in &self.delta_grid {
                points.push((n, delta));
            }
        }
        points
    }
}

fn resolve_config(base: &EstimatorConfig, true_delta: f64) -> EstimatorConfig {
    let mut config = *base;
    if matches!(config.delta_source, DeltaSource::Known(_)) {
        config.delta_source = DeltaSource::Known(true_delta);
    }
    config
}

/// Mean and standard error of a per-replicate statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct MeanSe {
    pub mean: f64,
    pub se: f64,
}

fn mean_se(values: &[f64]) -> MeanSe {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    if values.len() < 2 {
        return MeanSe { mean, se: 0.0 };
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0);
    MeanSe {
        mean,
        se: libm::sqrt(var / m),
    }
}

/// Aggregates for one (n, delta) grid point.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct GridPointSummary {
    pub n: usize,
    pub delta: f64,
    pub replicates: usize,
    pub failures: usize,
    /// `||sigma_hat - sigma||_F^2`
    pub error_frobenius_sq: MeanSe,
    /// `||sigma_hat - sigma||_inf`
    pub error_spectral: MeanSe,
    /// `||sigma_tilde - sigma||_inf`
    pub deviation_spectral: MeanSe,
    pub lambda: MeanSe,
    pub rank: MeanSe,
    /// Fraction of replicates on which `lambda >= 2 ||sigma_tilde - sigma||_inf`.
    pub event_frequency: f64,
    /// Event replicates that violated either Theorem-1-style inequality.
    pub bound_violations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ScalingMetric {
    /// Mean squared Frobenius error of the penalized estimate.
    FrobeniusSq,
    /// Mean spectral deviation of the debiased estimate.
    DeviationSpectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ScalingAxis {
    SampleSize,
    Delta,
}

/// A fitted log-log scaling law along one grid axis with the other
/// coordinate held at `fixed`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SlopeFit {
    pub metric: ScalingMetric,
    pub axis: ScalingAxis,
    pub fixed: f64,
    pub slope: f64,
    pub intercept: f64,
    pub half_width: f64,
}

/// Aggregated output of [`run_experiment`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ExperimentResult {
    pub grid: Vec<GridPointSummary>,
    pub slopes: Vec<SlopeFit>,
}

/// Ordinary least squares on `(log x, log y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Twice the standard error of the slope.
    pub half_width: f64,
}

/// Fits `log y = intercept + slope log x` by OLS. Requires at least three
/// points with strictly positive coordinates and non-constant `x`.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    assert_eq!(xs.len(), ys.len(), "coordinate slices must match");
    let m = xs.len();
    if m < 3 {
        return Err(Error::TooFewPoints { got: m });
    }
    if xs.iter().chain(ys).any(|&v| v <= 0.0 || !v.is_finite()) {
        return Err(Error::DegenerateFit);
    }
    let lx: Vec<f64> = xs.iter().map(|&v| libm::log(v)).collect();
    let ly: Vec<f64> = ys.iter().map(|&v| libm::log(v)).collect();
    let mx = lx.iter().sum::<f64>() / m as f64;
    let my = ly.iter().sum::<f64>() / m as f64;
    let sxx: f64 = lx.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit);
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let se = libm::sqrt(rss / (m as f64 - 2.0) / sxx);
    Ok(LineFit {
        slope,
        intercept,
        half_width: 2.0 * se,
    })
}

struct ReplicateMetrics {
    error_frobenius_sq: f64,
    error_spectral: f64,
    deviation_spectral: f64,
    lambda: f64,
    rank: f64,
    event: bool,
    violated: bool,
}

fn run_replicate(
    sigma: &SymMatrix,
    nuclear_sigma: f64,
    rank_sigma: usize,
    n: usize,
    delta: f64,
    config: &EstimatorConfig,
    seed: RngSeed,
) -> Result<ReplicateMetrics> {
    let x = sample_gaussian(sigma, n, seed.substream(0))?;
    let data = apply_mask(&x, delta, seed.substream(1))?;
    let report = estimate(&data, config)?;

    let deviation_spectral = report.sigma_tilde.sub(sigma).norm(MatrixNorm::Spectral);
    let diff = report.sigma_hat.sub(sigma);
    let error_spectral = diff.norm(MatrixNorm::Spectral);
    let fro = diff.frobenius_norm();
    let error_frobenius_sq = fro * fro;

    let event = report.lambda_used >= 2.0 * deviation_spectral;
    let violated = event
        && !(spectral_bound_ok(error_spectral, report.lambda_used)
            && frobenius_bound_ok(
                error_frobenius_sq,
                report.lambda_used,
                nuclear_sigma,
                rank_sigma,
            ));

    Ok(ReplicateMetrics {
        error_frobenius_sq,
        error_spectral,
        deviation_spectral,
        lambda: report.lambda_used,
        rank: report.rank_hat as f64,
        event,
        violated,
    })
}

/// Runs the sweep. Failed replicates are excluded from the aggregates and
/// counted; a grid point with more than 1% failures aborts the run.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    let sigma = spec.covariance.build()?;
    let nuclear_sigma = sigma.norm(MatrixNorm::Nuclear);
    let rank_sigma = crate::estimator::penalty_rank(&sigma);

    let points = spec.grid();
    let mut grid = Vec::with_capacity(points.len());
    for (gi, &(n, delta)) in points.iter().enumerate() {
        let config = resolve_config(&spec.estimator, delta);
        let point_seed = spec.seed.substream(gi as u64);

        let mut fro2 = Vec::with_capacity(spec.replicates);
        let mut espec = Vec::with_capacity(spec.replicates);
        let mut devs = Vec::with_capacity(spec.replicates);
        let mut lambdas = Vec::with_capacity(spec.replicates);
        let mut ranks = Vec::with_capacity(spec.replicates);
        let mut events = 0usize;
        let mut violations = 0usize;
        let mut failures = 0usize;

        for r in 0..spec.replicates {
            match run_replicate(
                &sigma,
                nuclear_sigma,
                rank_sigma,
                n,
                delta,
                &config,
                point_seed.substream(r as u64),
            ) {
                Ok(m) => {
                    fro2.push(m.error_frobenius_sq);
                    espec.push(m.error_spectral);
                    devs.push(m.deviation_spectral);
                    lambdas.push(m.lambda);
                    ranks.push(m.rank);
                    if m.event {
                        events += 1;
                    }
                    if m.violated {
                        violations += 1;
                    }
                }
                Err(_) => failures += 1,
            }
        }
        if failures * 100 > spec.replicates {
            return Err(Error::ExcessiveFailures {
                grid_index: gi,
                n,
                delta,
                failures,
                replicates: spec.replicates,
            });
        }
        let successes = spec.replicates - failures;
        grid.push(GridPointSummary {
            n,
            delta,
            replicates: spec.replicates,
            failures,
            error_frobenius_sq: mean_se(&fro2),
            error_spectral: mean_se(&espec),
            deviation_spectral: mean_se(&devs),
            lambda: mean_se(&lambdas),
            rank: mean_se(&ranks),
            event_frequency: events as f64 / successes as f64,
            bound_violations: violations,
        });
    }

    let slopes = fit_slopes(spec, &grid);
    Ok(ExperimentResult { grid, slopes })
}

/// Fits every scaling law the grid supports (three or more points along the
/// swept axis, positive means). Grid points are laid out delta-minor.
fn fit_slopes(spec: &ExperimentSpec, grid: &[GridPointSummary]) -> Vec<SlopeFit> {
    let nd = spec.delta_grid.len();
    let mut slopes = Vec::new();

    if spec.n_grid.len() >= 3 {
        for (di, &delta) in spec.delta_grid.iter().enumerate() {
            let xs: Vec<f64> = spec.n_grid.iter().map(|&n| n as f64).collect();
            let ys: Vec<f64> = (0..spec.n_grid.len())
                .map(|ni| grid[ni * nd + di].error_frobenius_sq.mean)
                .collect();
            if let Ok(fit) = fit_loglog_slope(&xs, &ys) {
                slopes.push(SlopeFit {
                    metric: ScalingMetric::FrobeniusSq,
                    axis: ScalingAxis::SampleSize,
                    fixed: delta,
                    slope: fit.slope,
                    intercept: fit.intercept,
                    half_width: fit.half_width,
                });
            }
        }
    }
    if spec.delta_grid.len() >= 3 {
        for (ni, &n) in spec.n_grid.iter().enumerate() {
            let xs = spec.delta_grid.clone();
            for metric in [ScalingMetric::FrobeniusSq, ScalingMetric::DeviationSpectral] {
                let ys: Vec<f64> = (0..nd)
                    .map(|di| {
                        let point = &grid[ni * nd + di];
                        match metric {
                            ScalingMetric::FrobeniusSq => point.error_frobenius_sq.mean,
                            ScalingMetric::DeviationSpectral => point.deviation_spectral.mean,
                        }
                    })
                    .collect();
                if let Ok(fit) = fit_loglog_slope(&xs, &ys) {
                    slopes.push(SlopeFit {
                        metric,
                        axis: ScalingAxis::Delta,
                        fixed: n as f64,
                        slope: fit.slope,
                        intercept: fit.intercept,
                        half_width: fit.half_width,
                    });
                }
            }
        }
    }
    slopes
}

/// Achieved event coverage for one value of the lambda constant.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct CoverageRow {
    pub constant: f64,
    /// Worst event coverage over the grid points.
    pub coverage: f64,
}

/// Result of calibrating the data-driven lambda constant.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct CalibrationOutcome {
    pub target_coverage: f64,
    /// Smallest grid constant whose worst-case coverage meets the target.
    pub selected: f64,
    pub table: Vec<CoverageRow>,
}

/// Finds the smallest constant on [`CALIBRATION_GRID`] such that the event
/// `lambda(C) >= 2 ||sigma_tilde - sigma||_inf` holds with frequency at
/// least `target_coverage` on every grid point of `spec`.
///
/// The event indicator is monotone in the constant, so each replicate is
/// simulated once: with `lambda_1` the data-driven parameter at constant 1,
/// the event holds at constant `C` iff
/// `C >= 2 ||sigma_tilde - sigma||_inf / lambda_1`. Replicates that fail
/// (or where the rule is undefined) count as uncovered at every constant.
pub fn calibrate_constant(
    spec: &ExperimentSpec,
    target_coverage: f64,
) -> Result<CalibrationOutcome> {
    if !(0.0..1.0).contains(&target_coverage) {
        return Err(Error::InvalidSpec {
            reason: alloc::format!("target coverage must lie in [0, 1), got {target_coverage}"),
        });
    }
    spec.validate()?;
    let sigma = spec.covariance.build()?;

    let points = spec.grid();
    // Smallest constant that covers each replicate, per grid point.
    let mut thresholds: Vec<Vec<f64>> = Vec::with_capacity(points.len());
    for (gi, &(n, delta)) in points.iter().enumerate() {
        let mut config = resolve_config(&spec.estimator, delta);
        config.lambda_rule = LambdaRule::DataDriven { constant: 1.0 };
        let point_seed = spec.seed.substream(gi as u64);

        let mut point_thresholds = Vec::with_capacity(spec.replicates);
        for r in 0..spec.replicates {
            let seed = point_seed.substream(r as u64);
            let threshold = (|| -> Result<f64> {
                let x = sample_gaussian(&sigma, n, seed.substream(0))?;
                let data = apply_mask(&x, delta, seed.substream(1))?;
                let report = estimate(&data, &config)?;
                let dev = report.sigma_tilde.sub(&sigma).norm(MatrixNorm::Spectral);
                if dev == 0.0 {
                    Ok(0.0)
                } else if report.lambda_used == 0.0 {
                    Ok(f64::INFINITY)
                } else {
                    Ok(2.0 * dev / report.lambda_used)
                }
            })()
            .unwrap_or(f64::INFINITY);
            point_thresholds.push(threshold);
        }
        point_thresholds.sort_by(f64::total_cmp);
        thresholds.push(point_thresholds);
    }

    let coverage_at = |constant: f64| -> f64 {
        thresholds
            .iter()
            .map(|t| {
                let covered = t.partition_point(|&v| v <= constant);
                covered as f64 / t.len() as f64
            })
            .fold(1.0, f64::min)
    };

    let table: Vec<CoverageRow> = CALIBRATION_GRID
        .iter()
        .map(|&constant| CoverageRow {
            constant,
            coverage: coverage_at(constant),
        })
        .collect();

    match table.iter().find(|row| row.coverage >= target_coverage) {
        Some(row) => Ok(CalibrationOutcome {
            target_coverage,
            selected: row.constant,
            table,
        }),
        None => {
            let last = table.last().expect("grid is non-empty");
            Err(Error::CalibrationFailed {
                best_coverage: last.coverage,
                at_constant: last.constant,
                target: target_coverage,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_spec() -> ExperimentSpec {
        ExperimentSpec {
            covariance: CovarianceSpec::Spiked {
                dim: 5,
                eigenvalues: alloc::vec![1.0],
                tail: 0.2,
            },
            n_grid: alloc::vec![200],
            delta_grid: alloc::vec![1.0],
            replicates: 3,
            estimator: EstimatorConfig::default(),
            seed: RngSeed(77),
        }
    }

    #[test]
    fn experiment_is_deterministic() {
        let spec = tiny_spec();
        let a = run_experiment(&spec).unwrap();
        let b = run_experiment(&spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_replicate_identity_pipeline() {
        // replicates = 1, delta = 1, lambda = 0: error equals the plain
        // sample-covariance error.
        let mut spec = tiny_spec();
        spec.replicates = 1;
        spec.estimator.lambda_rule = LambdaRule::Fixed(0.0);
        spec.estimator.delta_source = DeltaSource::Known(1.0);
        let result = run_experiment(&spec).unwrap();
        let point = &result.grid[0];
        assert_eq!(point.failures, 0);
        // With lambda = 0 nothing is thresholded, so the estimate equals
        // the (debiased) sample covariance and the two error norms agree.
        assert!(
            (point.error_spectral.mean - point.deviation_spectral.mean).abs() <= 1e-10,
            "{} vs {}",
            point.error_spectral.mean,
            point.deviation_spectral.mean
        );
        assert_eq!(point.event_frequency, 0.0);
    }

    #[test]
    fn validate_rejects_bad_grids() {
        let mut spec = tiny_spec();
        spec.delta_grid = alloc::vec![0.0];
        assert!(matches!(
            run_experiment(&spec),
            Err(Error::InvalidDelta { .. })
        ));
        let mut spec = tiny_spec();
        spec.replicates = 0;
        assert!(matches!(
            run_experiment(&spec),
            Err(Error::InvalidSpec { .. })
        ));
    }

    #[test]
    fn fit_recovers_exact_power_laws() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 / x).collect();
        let fit = fit_loglog_slope(&xs, &ys).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-12);
        assert!(fit.half_width < 1e-10);

        let ys: Vec<f64> = xs.iter().map(|x| 5.0 / (x * x)).collect();
        let fit = fit_loglog_slope(&xs, &ys).unwrap();
        assert!((fit.slope + 2.0).abs() < 1e-12);
    }

    #[test]
    fn fit_rejects_bad_input() {
        assert!(matches!(
            fit_loglog_slope(&[1.0, 2.0], &[1.0, 2.0]),
            Err(Error::TooFewPoints { .. })
        ));
        assert!(matches!(
            fit_loglog_slope(&[1.0, 2.0, -3.0], &[1.0, 2.0, 3.0]),
            Err(Error::DegenerateFit)
        ));
        assert!(matches!(
            fit_loglog_slope(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]),
            Err(Error::DegenerateFit)
        ));
    }

    #[test]
    fn calibration_trivial_target_and_monotone_coverage() {
        let mut spec = tiny_spec();
        spec.replicates = 5;
        let outcome = calibrate_constant(&spec, 0.0).unwrap();
        assert_eq!(outcome.selected, 0.125);
        for pair in outcome.table.windows(2) {
            assert!(pair[0].coverage <= pair[1].coverage);
        }
    }

    #[test]
    fn calibration_rejects_bad_target() {
        let spec = tiny_spec();
        assert!(matches!(
            calibrate_constant(&spec, 1.0),
            Err(Error::InvalidSpec { .. })
        ));
    }
}
