use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use toml::{Table, Value};

use fockqkd::cli::config::{from_table, parse_table, ProtocolKind};
use fockqkd::cli::run::{attack_demo, export_kmax_grid, run_experiment, RunError, EXIT_FAILURE, OUTPUT_DIR_ENV};

#[derive(Parser)]
#[command(name = "fockqkd", version, about = "Vacuum/single-photon key distribution simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a B92-type session with two non-orthogonal vacuum/photon superpositions.
    RunB92 {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, allow_hyphen_values = true)]
        theta0: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        theta1: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        psi: Option<f64>,
        /// ideal_projective | linear_optics
        #[arg(long)]
        backend: Option<String>,
    },
    /// Run a BB84-type session with two orthogonal classes of states.
    RunBb84 {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Export K_max over a (sin θ_0, sin θ_1) grid as CSV.
    KmaxGrid {
        #[arg(long, default_value_t = 101)]
        resolution: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// B92 with θ_0 = π/6, θ_1 = −π/6 under every channel model.
    AttackDemo {
        #[arg(long, default_value_t = 10_000)]
        rounds: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Also write the reports as a JSON array.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Flags shared by the session commands; each overrides the config key of the same name.
#[derive(Args)]
struct CommonArgs {
    /// TOML configuration document.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    rounds: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// ideal | loss | intercept_resend | photon_number_attack
    #[arg(long)]
    channel: Option<String>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    check_fraction: Option<f64>,
    /// expected | sampled
    #[arg(long)]
    photon_count: Option<String>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// json | csv
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    workers: Option<u64>,
    #[arg(long)]
    alarm_threshold: Option<f64>,
    /// Also write the full transcript next to the report.
    #[arg(long)]
    transcript: bool,
}

impl CommonArgs {
    fn table(&self) -> Result<Table, RunError> {
        let mut table = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|source| RunError::Io {
                    path: path.clone(),
                    source,
                })?;
                parse_table(&text)?
            }
            None => Table::new(),
        };
        let mut set = |key: &str, value: Option<Value>| {
            if let Some(v) = value {
                table.insert(key.to_owned(), v);
            }
        };
        set("rounds", self.rounds.map(|r| Value::String(r.to_string())));
        set("seed", self.seed.map(|s| Value::String(s.to_string())));
        set("channel", self.channel.clone().map(Value::String));
        set("eta", self.eta.map(Value::Float));
        set("check_fraction", self.check_fraction.map(Value::Float));
        set("photon_count", self.photon_count.clone().map(Value::String));
        set("output", self.output.as_ref().map(|p| Value::String(p.display().to_string())));
        set("format", self.format.clone().map(Value::String));
        set("workers", self.workers.map(|w| Value::String(w.to_string())));
        set("alarm_threshold", self.alarm_threshold.map(Value::Float));
        if self.transcript {
            set("transcript", Some(Value::Boolean(true)));
        }
        Ok(table)
    }
}

fn default_bb84_table_states() -> Value {
    let pair = |t: f64, p: f64| Value::Array(vec![Value::Float(t), Value::Float(p)]);
    Value::Array(vec![
        pair(0.0, 0.0),
        pair(FRAC_PI_2, 0.0),
        pair(FRAC_PI_4, 0.0),
        pair(FRAC_PI_4, PI),
    ])
}

fn run_session(table: Table, kind: ProtocolKind) -> Result<ExitCode, RunError> {
    let cfg = from_table(table, Some(kind))?;
    let outcome = run_experiment(&cfg)?;
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    println!("{}", outcome.summary);
    eprintln!("report written to {}", outcome.report_path.display());
    if let Some(p) = &outcome.transcript_path {
        eprintln!("transcript written to {}", p.display());
    }
    Ok(ExitCode::from(outcome.exit_code as u8))
}

fn dispatch(cli: Cli) -> Result<ExitCode, RunError> {
    match cli.command {
        Command::RunB92 {
            common,
            theta0,
            theta1,
            psi,
            backend,
        } => {
            let mut table = common.table()?;
            for (key, v) in [("theta0", theta0), ("theta1", theta1), ("psi", psi)] {
                if let Some(v) = v {
                    table.insert(key.into(), Value::Float(v));
                }
            }
            if let Some(b) = backend {
                table.insert("backend".into(), Value::String(b));
            }
            run_session(table, ProtocolKind::B92)
        }
        Command::RunBb84 { common } => {
            let mut table = common.table()?;
            table
                .entry("states")
                .or_insert_with(default_bb84_table_states);
            run_session(table, ProtocolKind::Bb84)
        }
        Command::KmaxGrid { resolution, output } => {
            let (path, grid) = export_kmax_grid(resolution, output.as_deref())?;
            if let Some((i, j, v)) = grid.argmax() {
                println!(
                    "max K_max = {v} at sin_theta0 = {}, sin_theta1 = {}",
                    grid.axis(i),
                    grid.axis(j)
                );
            }
            eprintln!("grid written to {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::AttackDemo {
            rounds,
            seed,
            workers,
            output,
        } => {
            let rows = attack_demo(rounds, seed, workers)?;
            println!(
                "{:<22} {:>14} {:>14} {:>24} {:>14} {:>10}",
                "channel", "positive_rate", "null_pair", "99% interval", "detection", "K"
            );
            for row in &rows {
                let r = &row.report;
                let interval = r
                    .null_pair_interval
                    .map_or_else(|| "n/a".to_owned(), |(lo, hi)| format!("[{lo:.4}, {hi:.4}]"));
                println!(
                    "{:<22} {:>14.5} {:>14} {:>24} {:>14} {:>10}",
                    row.channel,
                    r.positive_rate,
                    r.null_pair_click_rate.map_or_else(|| "n/a".to_owned(), |v| format!("{v:.5}")),
                    interval,
                    format!("{:?}", r.detection).to_lowercase(),
                    r.k_empirical.map_or_else(|| "n/a".to_owned(), |v| format!("{v:.4}")),
                );
            }
            if let Some(path) = output {
                let json: Vec<_> = rows
                    .iter()
                    .map(|r| serde_json::json!({ "channel": r.channel, "report": r.report }))
                    .collect();
                let text = serde_json::to_string_pretty(&json).expect("reports serialize") + "\n";
                fs::write(&path, text).map_err(|source| RunError::Io { path, source })?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, RunError::Io { .. }) {
                eprintln!("hint: set {OUTPUT_DIR_ENV} or --output to choose where outputs go");
            }
            ExitCode::from(EXIT_FAILURE as u8)
        }
    }
}
