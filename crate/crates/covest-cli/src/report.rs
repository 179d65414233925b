//! JSON and CSV output documents. Reports never embed large matrices:
//! matrices go to CSV files, reports carry scalars and spectra.

use serde::Serialize;

use covest_core::experiments::{
    CalibrationOutcome, ExperimentResult, ScalingAxis, ScalingMetric, SlopeFit,
};

use crate::config::VerdictConfig;

pub const ESTIMATE_REPORT_SCHEMA: &str = "covest/estimate-report/v1";
pub const RESULTS_SCHEMA: &str = "covest/simulation-results/v1";
pub const VERDICTS_SCHEMA: &str = "covest/verdicts/v1";
pub const CALIBRATION_SCHEMA: &str = "covest/calibration/v1";

#[derive(Debug, Serialize)]
pub struct Diagnostics {
    /// Plug-in spectral deviation envelope at t = log(2p), evaluated on the
    /// estimate itself (the true covariance is unknown on real data).
    pub deviation_envelope: Option<f64>,
    /// Plug-in trace deviation envelope at t = log(2p).
    pub trace_envelope: Option<f64>,
    pub confidence_t: f64,
}

#[derive(Debug, Serialize)]
pub struct EstimateReportDoc {
    pub schema: &'static str,
    pub n: usize,
    pub p: usize,
    pub delta_used: f64,
    pub lambda_used: f64,
    pub rank_hat: usize,
    pub effective_rank_tilde: f64,
    pub sample_size_ok: bool,
    pub kept_eigenvalues: Vec<f64>,
    pub seed: u64,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Serialize)]
pub struct ResultsDoc<'a> {
    pub schema: &'static str,
    pub seed: u64,
    #[serde(flatten)]
    pub result: &'a ExperimentResult,
}

#[derive(Debug, Serialize)]
pub struct BoundVerdict {
    pub replicates: usize,
    pub failures: usize,
    pub events: usize,
    pub violations: usize,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct SlopeVerdict {
    pub metric: ScalingMetric,
    pub axis: ScalingAxis,
    pub fixed: f64,
    pub slope: f64,
    pub half_width: f64,
    pub range: [f64; 2],
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct VerdictsDoc {
    pub schema: &'static str,
    pub bound_checks: BoundVerdict,
    pub slopes: Vec<SlopeVerdict>,
    pub all_pass: bool,
}

/// Evaluates the verdicts: zero Theorem-1 violations on event replicates,
/// and every fitted slope inside its configured range.
pub fn evaluate_verdicts(result: &ExperimentResult, config: &VerdictConfig) -> VerdictsDoc {
    let mut replicates = 0;
    let mut failures = 0;
    let mut events = 0;
    let mut violations = 0;
    for point in &result.grid {
        replicates += point.replicates;
        failures += point.failures;
        let successes = point.replicates - point.failures;
        events += (point.event_frequency * successes as f64).round() as usize;
        violations += point.bound_violations;
    }
    let bound_checks = BoundVerdict {
        replicates,
        failures,
        events,
        violations,
        pass: violations == 0,
    };

    let range_for = |fit: &SlopeFit| -> Option<[f64; 2]> {
        match (fit.metric, fit.axis) {
            (ScalingMetric::FrobeniusSq, ScalingAxis::SampleSize) => Some(config.n_slope_range),
            (ScalingMetric::FrobeniusSq, ScalingAxis::Delta) => Some(config.delta_slope_range),
            (ScalingMetric::DeviationSpectral, ScalingAxis::Delta) => {
                Some(config.deviation_slope_range)
            }
            (ScalingMetric::DeviationSpectral, ScalingAxis::SampleSize) => None,
        }
    };

    let slopes: Vec<SlopeVerdict> = result
        .slopes
        .iter()
        .filter_map(|fit| {
            range_for(fit).map(|range| SlopeVerdict {
                metric: fit.metric,
                axis: fit.axis,
                fixed: fit.fixed,
                slope: fit.slope,
                half_width: fit.half_width,
                range,
                pass: fit.slope >= range[0] && fit.slope <= range[1],
            })
        })
        .collect();

    let all_pass = bound_checks.pass && slopes.iter().all(|s| s.pass);
    VerdictsDoc {
        schema: VERDICTS_SCHEMA,
        bound_checks,
        slopes,
        all_pass,
    }
}

#[derive(Debug, Serialize)]
pub struct CalibrationDoc<'a> {
    pub schema: &'static str,
    pub seed: u64,
    #[serde(flatten)]
    pub outcome: &'a CalibrationOutcome,
}

/// One row per grid point, plot-ready.
pub fn results_csv(result: &ExperimentResult) -> String {
    let mut out = String::from(
        "n,delta,replicates,failures,\
         fro2_mean,fro2_se,spectral_mean,spectral_se,deviation_mean,deviation_se,\
         lambda_mean,lambda_se,rank_mean,rank_se,event_frequency,bound_violations\n",
    );
    for g in &result.grid {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            g.n,
            g.delta,
            g.replicates,
            g.failures,
            g.error_frobenius_sq.mean,
            g.error_frobenius_sq.se,
            g.error_spectral.mean,
            g.error_spectral.se,
            g.deviation_spectral.mean,
            g.deviation_spectral.se,
            g.lambda.mean,
            g.lambda.se,
            g.rank.mean,
            g.rank.se,
            g.event_frequency,
            g.bound_violations,
        ));
    }
    out
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<Vec<u8>, crate::error::CliError> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| crate::error::CliError::Internal(format!("serializing output: {e}")))?;
    bytes.push(b'\n');
    Ok(bytes)
}
