use std::f64::consts::PI;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::channel::ChannelModel;
use crate::error::QkdError;
use crate::metrics::{empirical_report, kmax_grid, KeyRateReport, SessionConfig};
use crate::protocol::{run_b92_with_workers, run_bb84_with_workers, B92Config, Detection, Transcript};

use super::config::{ConfigError, ExperimentConfig, OutputFormat, Session};

/// Environment variable naming the directory for outputs without an explicit path.
pub const OUTPUT_DIR_ENV: &str = "FOCKQKD_OUTPUT_DIR";

/// Process exit status when the check rounds raise an alarm.
pub const EXIT_ALARM: i32 = 2;
/// Process exit status for configuration or I/O failures.
pub const EXIT_FAILURE: i32 = 1;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Qkd(#[from] QkdError),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: KeyRateReport,
    pub report_path: PathBuf,
    pub transcript_path: Option<PathBuf>,
    /// Serialized report exactly as written to `report_path`.
    pub report_bytes: Vec<u8>,
    pub summary: String,
    pub warnings: Vec<String>,
    pub exit_code: i32,
}

fn default_dir() -> PathBuf {
    std::env::var_os(OUTPUT_DIR_ENV).map_or_else(|| PathBuf::from("."), PathBuf::from)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|source| RunError::Io {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, bytes).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Runs the configured session and returns its transcript and report without
/// touching the filesystem.
pub fn simulate(cfg: &ExperimentConfig) -> Result<(Transcript, KeyRateReport), RunError> {
    let (transcript, session) = match &cfg.session {
        Session::B92(b) => (run_b92_with_workers(b, cfg.seed, cfg.workers)?, SessionConfig::B92(b)),
        Session::Bb84(b) => (run_bb84_with_workers(b, cfg.seed, cfg.workers)?, SessionConfig::Bb84(b)),
    };
    let report = empirical_report(&transcript, session, cfg.alarm_threshold)?;
    Ok((transcript, report))
}

pub fn render_report(report: &KeyRateReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => report.to_json(),
        OutputFormat::Csv => report.to_csv(),
    }
}

pub fn summary_line(report: &KeyRateReport) -> String {
    let opt = |v: Option<f64>| v.map_or_else(|| "n/a".to_owned(), |v| v.to_string());
    format!(
        "n_b={} n_p={} K={} K_analytic={} null_pair_click_rate={} detection={}",
        report.n_b,
        report.n_p,
        opt(report.k_empirical),
        report.k_analytic,
        opt(report.null_pair_click_rate),
        match report.detection {
            Detection::Indeterminate => "indeterminate",
            Detection::Clear => "clear",
            Detection::Alarm => "alarm",
        }
    )
}

/// Runs the experiment, writes the report (and optionally the transcript),
/// and decides the exit status: [`EXIT_ALARM`] when the check rounds detect
/// interference, 0 otherwise.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutcome, RunError> {
    let (transcript, report) = simulate(cfg)?;
    let report_path = cfg.output.clone().unwrap_or_else(|| {
        default_dir().join(format!("{}_report.{}", cfg.session.kind(), cfg.format.extension()))
    });
    let report_bytes = render_report(&report, cfg.format).into_bytes();
    write_file(&report_path, &report_bytes)?;

    let transcript_path = if cfg.write_transcript {
        let path = report_path.with_extension("transcript.json");
        let json = serde_json::to_vec(&transcript).expect("transcript serializes");
        write_file(&path, &json)?;
        Some(path)
    } else {
        None
    };

    let mut warnings = Vec::new();
    if report.detection == Detection::Indeterminate {
        warnings.push("no check rounds could test for interference; detection is indeterminate".to_owned());
    }
    Ok(RunOutcome {
        summary: summary_line(&report),
        exit_code: if report.detection == Detection::Alarm { EXIT_ALARM } else { 0 },
        report,
        report_path,
        transcript_path,
        report_bytes,
        warnings,
    })
}

/// Writes the K_max grid CSV and returns the path written.
pub fn export_kmax_grid(resolution: usize, output: Option<&Path>) -> Result<(PathBuf, crate::metrics::GridData), RunError> {
    let grid = kmax_grid(resolution)?;
    let path = output
        .map(Path::to_path_buf)
        .unwrap_or_else(|| default_dir().join("kmax_grid.csv"));
    write_file(&path, grid.to_csv().as_bytes())?;
    Ok((path, grid))
}

/// One row of the canned attack demonstration.
#[derive(Debug, Clone)]
pub struct DemoRow {
    pub channel: &'static str,
    pub report: KeyRateReport,
}

/// B92 with θ_0 = π/6, θ_1 = −π/6, ψ = 0 under each channel model.
pub fn attack_demo(rounds: u64, seed: u64, workers: usize) -> Result<Vec<DemoRow>, RunError> {
    let base = B92Config::new(PI / 6.0, -PI / 6.0, 0.0, rounds);
    let (p0, p1) = base.projectors()?;
    let channels = [
        ChannelModel::Ideal,
        ChannelModel::loss(0.5)?,
        ChannelModel::intercept_resend(vec![p0, p1])?,
        ChannelModel::PhotonNumberAttack,
    ];
    channels
        .into_iter()
        .map(|channel| {
            let mut cfg = base.clone();
            cfg.channel = channel;
            let t = run_b92_with_workers(&cfg, seed, workers)?;
            let report = empirical_report(&t, SessionConfig::B92(&cfg), 0.0)?;
            Ok(DemoRow {
                channel: cfg.channel.name(),
                report,
            })
        })
        .collect()
}
