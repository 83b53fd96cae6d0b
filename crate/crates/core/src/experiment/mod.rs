//! Experiment drivers behind the command-line tool.
//!
//! Each driver takes a resolved [`ExperimentConfig`], returns a typed report
//! with its threshold checks, and can write one CSV table plus one JSON
//! summary that echoes the configuration. Output depends only on the
//! configuration, so a fixed seed gives byte-identical files.

mod config;
mod report;
mod spectrum_runs;
mod transform_runs;
mod zero_runs;

use std::path::{Path, PathBuf};

pub use config::{
    default_eta_grid, load, parse_vectors, Experiment, ExperimentConfig, Format, RawConfig, CONFIG_KEYS,
};
pub use report::{write_csv, write_report, Check, Report, Table};
pub use spectrum_runs::{
    eval_batch, pipeline_ladder, run_cube_spectrum, CertificateRow, CubeSpectrumReport, EvalReport,
    PipelineLadder, PipelineRow, HERZ_CERTIFICATE, REVERIFY_TOLERANCE,
};
pub use transform_runs::{
    random_frequency, run_model_error, run_oracle_check, ModelErrorReport, ModelRow, OracleCheckReport,
    OracleRow, ENVELOPE_TOLERANCE, HERZ_AGREEMENT, QUADRATURE_AGREEMENT,
};
pub use zero_runs::{
    p90, run_residual_stats, run_shells, run_xset_entropy, upper_exponent_limit, EtaScaling, RadialCheck,
    ResidualRow, ResidualStatsReport, ShellRow, ShellsReport, XsetCell, XsetEntropyReport, BRUTE_FORCE_LIMIT,
    ORDER_SHIFT_LIMIT, RADIAL_ZEROS, RESIDUAL_DECAY, SHELL_AGREEMENT, THICKENING_SHIFT_LIMIT,
};

use crate::error::{Error, Result};

/// Files written by a run and its threshold checks.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

fn finish<R: Report>(cfg: &ExperimentConfig, report: &R) -> Result<RunOutcome> {
    let files = write_report(cfg, report)?;
    Ok(RunOutcome {
        files,
        checks: report.checks().to_vec(),
        passed: report.passed(),
    })
}

/// Runs the configured experiment and writes its reports. `input` is the
/// frequency file read by [`Experiment::Eval`].
pub fn run(cfg: &ExperimentConfig, input: Option<&Path>) -> Result<RunOutcome> {
    match cfg.experiment {
        Experiment::OracleCheck => finish(cfg, &run_oracle_check(cfg)?),
        Experiment::ModelError => finish(cfg, &run_model_error(cfg)?),
        Experiment::Shells => finish(cfg, &run_shells(cfg)?),
        Experiment::XsetEntropy => {
            let report = run_xset_entropy(cfg)?;
            let mut outcome = finish(cfg, &report)?;
            if cfg.write_samples && report.route == "x-set" {
                let path = cfg.out_dir.join("xset_entropy_samples.csv");
                write_csv(&path, &report.sample_table())?;
                outcome.files.push(path);
            }
            Ok(outcome)
        }
        Experiment::CubeSpectrum => finish(cfg, &run_cube_spectrum(cfg)?),
        Experiment::ResidualStats => finish(cfg, &run_residual_stats(cfg)?),
        Experiment::Eval => {
            let input = input.ok_or_else(|| Error::config("input", "eval needs a frequency file"))?;
            finish(cfg, &eval_batch(cfg, input)?)
        }
    }
}
