//! The three subcommands: estimation on user data, simulation sweeps, and
//! calibration runs. Outputs are computed fully before any file is written.

use std::path::PathBuf;

use clap::Args;

use covest_core::estimator::{
    deviation_bound, estimate, trace_deviation_bound, DeltaSource, EstimatorConfig, LambdaRule,
};
use covest_core::experiments::{calibrate_constant, run_experiment};
use covest_core::linalg::PSD_TOL;

use crate::config::load_run_config;
use crate::error::{domain_error, CliError};
use crate::formats::{parse_mask, parse_table, read_input, serialize_sym_matrix, write_atomic};
use crate::report::{
    evaluate_verdicts, results_csv, to_json_pretty, CalibrationDoc, Diagnostics, EstimateReportDoc,
    ResultsDoc, CALIBRATION_SCHEMA, ESTIMATE_REPORT_SCHEMA, RESULTS_SCHEMA,
};

/// "auto" or an explicit numeric value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AutoOr {
    Auto,
    Value(f64),
}

pub fn parse_auto_or(s: &str) -> Result<AutoOr, String> {
    if s == "auto" {
        return Ok(AutoOr::Auto);
    }
    s.parse::<f64>()
        .map(AutoOr::Value)
        .map_err(|_| format!("expected 'auto' or a number, got '{s}'"))
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Input data file (CSV, one sample per row).
    #[arg(long)]
    pub input: PathBuf,

    /// Companion 0/1 mask file (1 = observed), congruent with the input.
    #[arg(long, conflicts_with = "missing_token")]
    pub mask: Option<PathBuf>,

    /// Token marking missing entries inline in the input [default: NA].
    #[arg(long)]
    pub missing_token: Option<String>,

    /// Input (and output) files carry a header row.
    #[arg(long)]
    pub header: bool,

    /// Observation probability: 'auto' estimates it from the mask.
    #[arg(long, default_value = "auto", value_parser = parse_auto_or)]
    pub delta: AutoOr,

    /// Regularization parameter: 'auto' uses the data-driven rule.
    #[arg(long, default_value = "auto", value_parser = parse_auto_or)]
    pub lambda: AutoOr,

    /// Constant C of the data-driven lambda rule.
    #[arg(long, default_value_t = 1.0)]
    pub lambda_constant: f64,

    /// Output file for the estimated covariance matrix (CSV).
    #[arg(long)]
    pub out: PathBuf,

    /// Output file for the JSON report.
    #[arg(long)]
    pub report: PathBuf,

    /// Seed recorded in the report; estimation itself is deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn cmd_estimate(args: &EstimateArgs) -> Result<(), CliError> {
    let text = read_input(&args.input)?;
    let data = if let Some(mask_path) = &args.mask {
        let table = parse_table(&args.input, &text, args.header, None)?;
        let mask_text = read_input(mask_path)?;
        let mask = parse_mask(mask_path, &mask_text, args.header)?;
        if (mask.rows, mask.cols) != (table.rows, table.cols) {
            return Err(CliError::Config {
                path: mask_path.display().to_string(),
                message: format!(
                    "mask shape {}x{} does not match data shape {}x{}",
                    mask.rows, mask.cols, table.rows, table.cols
                ),
            });
        }
        let y = covest_core::DataMatrix::new(table.rows, table.cols, table.values)
            .map_err(|e| CliError::Internal(e.to_string()))?;
        covest_core::MaskedData::new(y, mask.mask).map_err(|e| CliError::Internal(e.to_string()))?
    } else {
        let token = args.missing_token.as_deref().unwrap_or("NA");
        parse_table(&args.input, &text, args.header, Some(token))?.into_masked_data()?
    };

    let delta_source = match args.delta {
        AutoOr::Auto => DeltaSource::EstimateFromMask,
        AutoOr::Value(v) => {
            if !(v > 0.0 && v <= 1.0) {
                return Err(CliError::Domain {
                    message: format!("delta must lie in (0, 1], got {v}"),
                    hint: None,
                });
            }
            DeltaSource::Known(v)
        }
    };
    let lambda_rule = match args.lambda {
        AutoOr::Auto => LambdaRule::DataDriven {
            constant: args.lambda_constant,
        },
        AutoOr::Value(v) => {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(CliError::Domain {
                    message: format!("lambda must be nonnegative, got {v}"),
                    hint: None,
                });
            }
            LambdaRule::Fixed(v)
        }
    };
    let config = EstimatorConfig {
        delta_source,
        lambda_rule,
        ..EstimatorConfig::default()
    };

    let report = estimate(&data, &config).map_err(domain_error)?;

    let (n, p) = (data.n(), data.p());
    let t = (2.0 * p as f64).ln();
    // Plug-in envelopes use the estimate in place of the unknown truth;
    // they are undefined when the estimate is zero.
    let envelopes = if report.rank_hat > 0 && report.sigma_hat.is_psd(PSD_TOL) {
        let dev = deviation_bound(
            &report.sigma_hat,
            report.delta_used,
            n,
            p,
            t,
            config.bound_constant,
            config.c1,
        )
        .ok();
        let tr = trace_deviation_bound(
            &report.sigma_hat,
            report.delta_used,
            n,
            t,
            config.bound_constant,
            config.c1,
        )
        .ok();
        (dev, tr)
    } else {
        (None, None)
    };

    let doc = EstimateReportDoc {
        schema: ESTIMATE_REPORT_SCHEMA,
        n,
        p,
        delta_used: report.delta_used,
        lambda_used: report.lambda_used,
        rank_hat: report.rank_hat,
        effective_rank_tilde: report.effective_rank_tilde,
        sample_size_ok: report.sample_size_ok,
        kept_eigenvalues: report.kept_eigenvalues.clone(),
        seed: args.seed,
        diagnostics: Diagnostics {
            deviation_envelope: envelopes.0,
            trace_envelope: envelopes.1,
            confidence_t: t,
        },
    };

    let matrix_text = serialize_sym_matrix(&report.sigma_hat, args.header);
    let report_bytes = to_json_pretty(&doc)?;
    write_atomic(&args.out, matrix_text.as_bytes())?;
    write_atomic(&args.report, &report_bytes)?;
    Ok(())
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Run configuration (JSON, see schemas/run-config.v1.schema.json).
    #[arg(long)]
    pub config: PathBuf,

    /// Directory receiving results.csv, results.json, and verdicts.json.
    #[arg(long)]
    pub out_dir: PathBuf,

    /// Write the verdicts but do not fail the run on them.
    #[arg(long)]
    pub no_verdict: bool,
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let config = load_run_config(&args.config)?;
    let spec = config.to_experiment_spec();
    let result = run_experiment(&spec).map_err(domain_error)?;
    let verdicts = evaluate_verdicts(&result, &config.verdicts);

    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::Internal(format!("{}: {e}", args.out_dir.display())))?;
    let csv = results_csv(&result);
    let results_doc = ResultsDoc {
        schema: RESULTS_SCHEMA,
        seed: config.seed,
        result: &result,
    };
    write_atomic(&args.out_dir.join("results.csv"), csv.as_bytes())?;
    write_atomic(
        &args.out_dir.join("results.json"),
        &to_json_pretty(&results_doc)?,
    )?;
    let verdicts_path = args.out_dir.join("verdicts.json");
    write_atomic(&verdicts_path, &to_json_pretty(&verdicts)?)?;

    if !verdicts.all_pass && !args.no_verdict {
        let failed = verdicts.slopes.iter().filter(|s| !s.pass).count()
            + usize::from(!verdicts.bound_checks.pass);
        let total = verdicts.slopes.len() + 1;
        return Err(CliError::VerdictFailed {
            failed,
            total,
            verdicts_path: verdicts_path.display().to_string(),
        });
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Run configuration (JSON); the verdict section is ignored.
    #[arg(long)]
    pub config: PathBuf,

    /// Target event coverage in [0, 1).
    #[arg(long, default_value_t = 0.95)]
    pub coverage: f64,

    /// Output file for the calibration JSON.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn cmd_calibrate(args: &CalibrateArgs) -> Result<(), CliError> {
    let config = load_run_config(&args.config)?;
    if !(0.0..1.0).contains(&args.coverage) {
        return Err(CliError::Config {
            path: "--coverage".to_string(),
            message: format!("coverage must lie in [0, 1), got {}", args.coverage),
        });
    }
    let spec = config.to_experiment_spec();
    let outcome = calibrate_constant(&spec, args.coverage).map_err(|e| match e {
        covest_core::Error::CalibrationFailed { .. } => CliError::Calibration {
            message: e.to_string(),
        },
        other => domain_error(other),
    })?;
    let doc = CalibrationDoc {
        schema: CALIBRATION_SCHEMA,
        seed: config.seed,
        outcome: &outcome,
    };
    write_atomic(&args.out, &to_json_pretty(&doc)?)?;
    Ok(())
}
