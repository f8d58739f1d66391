//! Experiment configuration documents.
//!
//! A configuration is a TOML document of flat `key = value` pairs. Every key is
//! checked against the known set and every value against the constraints of
//! the module it feeds, so a parsed [`ExperimentConfig`] is always runnable.
//!
//! ```toml
//! protocol = "b92"
//! theta0 = 0.5235987755982988
//! theta1 = -0.5235987755982988
//! rounds = 10000
//! seed = 42
//! channel = "photon_number_attack"
//! ```

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::path::PathBuf;

use num_complex::Complex64;
use thiserror::Error;
use toml::{Table, Value};

use crate::channel::ChannelModel;
use crate::fockqubit::{BlochAngles, FockQubit};
use crate::measurement::Projector;
use crate::protocol::{Backend, B92Config, Bb84Config, PhotonCount, DEFAULT_CHECK_FRACTION};

pub const KNOWN_KEYS: &[&str] = &[
    "protocol",
    "theta0",
    "theta1",
    "psi",
    "states",
    "eve_states",
    "rounds",
    "seed",
    "channel",
    "eta",
    "backend",
    "check_fraction",
    "photon_count",
    "output",
    "format",
    "workers",
    "alarm_threshold",
    "transcript",
];

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_ALARM_THRESHOLD: f64 = 0.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("invalid value for `{key}`: {rule}")]
    Constraint { key: String, rule: String },
}

fn constraint(key: &str, rule: impl Into<String>) -> ConfigError {
    ConfigError::Constraint {
        key: key.to_owned(),
        rule: rule.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolKind {
    B92,
    Bb84,
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProtocolKind::B92 => "b92",
            ProtocolKind::Bb84 => "bb84",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Session {
    B92(B92Config),
    Bb84(Bb84Config),
}

impl Session {
    pub fn kind(&self) -> ProtocolKind {
        match self {
            Session::B92(_) => ProtocolKind::B92,
            Session::Bb84(_) => ProtocolKind::Bb84,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub session: Session,
    pub seed: u64,
    pub workers: usize,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub alarm_threshold: f64,
    pub write_transcript: bool,
}

/// Parses and validates a configuration document. `protocol` overrides (or
/// supplies) the document's `protocol` key.
pub fn parse_config(text: &str, protocol: Option<ProtocolKind>) -> Result<ExperimentConfig, ConfigError> {
    let table = parse_table(text)?;
    from_table(table, protocol)
}

/// Parses the document into a raw table, mapping syntax errors to line/column.
pub fn parse_table(text: &str) -> Result<Table, ConfigError> {
    text.parse::<Table>().map_err(|e| {
        let (line, column) = e
            .span()
            .map(|span| line_column(text, span.start))
            .unwrap_or((1, 1));
        ConfigError::Syntax {
            line,
            column,
            message: e.message().to_owned(),
        }
    })
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |nl| before.len() - nl - 1) + 1;
    (line, column)
}

/// Validates a table that may combine a document with command-line overrides.
pub fn from_table(mut table: Table, protocol: Option<ProtocolKind>) -> Result<ExperimentConfig, ConfigError> {
    if let Some(key) = table.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
        return Err(ConfigError::UnknownKey(key.clone()));
    }
    let doc_protocol = match take_str(&mut table, "protocol")? {
        None => None,
        Some(s) => Some(match s.as_str() {
            "b92" => ProtocolKind::B92,
            "bb84" => ProtocolKind::Bb84,
            other => return Err(constraint("protocol", format!("expected \"b92\" or \"bb84\", got \"{other}\""))),
        }),
    };
    let kind = match (protocol, doc_protocol) {
        (Some(cmd), Some(doc)) if cmd != doc => {
            return Err(constraint(
                "protocol",
                format!("document says {doc} but the command runs {cmd}"),
            ))
        }
        (Some(k), _) | (None, Some(k)) => k,
        (None, None) => return Err(constraint("protocol", "missing; expected \"b92\" or \"bb84\"")),
    };

    let rounds = take_u64(&mut table, "rounds")?.ok_or_else(|| constraint("rounds", "missing"))?;
    if rounds == 0 {
        return Err(constraint("rounds", "must be positive"));
    }
    let seed = take_u64(&mut table, "seed")?.unwrap_or(DEFAULT_SEED);
    let check_fraction = take_f64(&mut table, "check_fraction")?.unwrap_or(DEFAULT_CHECK_FRACTION);
    if !(0.0..1.0).contains(&check_fraction) {
        return Err(constraint("check_fraction", format!("must lie in [0, 1), got {check_fraction}")));
    }
    let photon_count = match take_str(&mut table, "photon_count")?.as_deref() {
        None | Some("expected") => PhotonCount::Expected,
        Some("sampled") => PhotonCount::Sampled,
        Some(other) => {
            return Err(constraint(
                "photon_count",
                format!("expected \"expected\" or \"sampled\", got \"{other}\""),
            ))
        }
    };
    let workers = match take_u64(&mut table, "workers")? {
        None => 1,
        Some(0) => return Err(constraint("workers", "must be at least 1")),
        Some(w) => w as usize,
    };
    let format = match take_str(&mut table, "format")?.as_deref() {
        None | Some("json") => OutputFormat::Json,
        Some("csv") => OutputFormat::Csv,
        Some(other) => return Err(constraint("format", format!("expected \"json\" or \"csv\", got \"{other}\""))),
    };
    let output = take_str(&mut table, "output")?.map(PathBuf::from);
    let alarm_threshold = take_f64(&mut table, "alarm_threshold")?.unwrap_or(DEFAULT_ALARM_THRESHOLD);
    if !(0.0..1.0).contains(&alarm_threshold) {
        return Err(constraint("alarm_threshold", format!("must lie in [0, 1), got {alarm_threshold}")));
    }
    let write_transcript = take_bool(&mut table, "transcript")?.unwrap_or(false);

    let channel_name = take_str(&mut table, "channel")?.unwrap_or_else(|| "ideal".to_owned());
    let eta = take_f64(&mut table, "eta")?;
    let eve_states = take_states(&mut table, "eve_states")?;

    let session = match kind {
        ProtocolKind::B92 => {
            let theta0 = take_f64(&mut table, "theta0")?.ok_or_else(|| constraint("theta0", "missing"))?;
            let theta1 = take_f64(&mut table, "theta1")?.ok_or_else(|| constraint("theta1", "missing"))?;
            let psi = take_f64(&mut table, "psi")?.unwrap_or(0.0);
            if table.contains_key("states") {
                return Err(constraint("states", "only used by bb84"));
            }
            let backend = match take_str(&mut table, "backend")?.as_deref() {
                None | Some("ideal_projective") => Backend::IdealProjective,
                Some("linear_optics") => Backend::LinearOptics,
                Some(other) => {
                    return Err(constraint(
                        "backend",
                        format!("expected \"ideal_projective\" or \"linear_optics\", got \"{other}\""),
                    ))
                }
            };
            for (key, theta) in [("theta0", theta0), ("theta1", theta1)] {
                if theta.sin().abs() <= crate::fockqubit::IDENTITY_TOL {
                    return Err(constraint(
                        key,
                        format!("{theta} gives a pure-vacuum signal state, which is not allowed"),
                    ));
                }
            }
            let mut cfg = B92Config::new(theta0, theta1, psi, rounds);
            cfg.backend = backend;
            cfg.check_fraction = check_fraction;
            cfg.photon_count = photon_count;
            let default_eve = || -> Vec<Projector> {
                let (p0, p1) = cfg.projectors().expect("angles already checked finite");
                vec![p0, p1]
            };
            cfg.channel = channel_model(&channel_name, eta, eve_states, default_eve)?;
            cfg.validate().map_err(|e| constraint("theta0/theta1/psi", e.to_string()))?;
            Session::B92(cfg)
        }
        ProtocolKind::Bb84 => {
            for key in ["theta0", "theta1", "psi", "backend"] {
                if table.contains_key(key) {
                    return Err(constraint(key, "only used by b92"));
                }
            }
            let states = take_states(&mut table, "states")?.ok_or_else(|| constraint("states", "missing"))?;
            let states: [FockQubit; 4] = states
                .try_into()
                .map_err(|v: Vec<FockQubit>| constraint("states", format!("expected 4 states, got {}", v.len())))?;
            crate::protocol::validate_quadruple(&states).map_err(|e| constraint("states", e.to_string()))?;
            let mut cfg = Bb84Config::new(states, rounds);
            cfg.check_fraction = check_fraction;
            cfg.photon_count = photon_count;
            let default_eve = || states.iter().copied().map(Projector::new).collect();
            cfg.channel = channel_model(&channel_name, eta, eve_states, default_eve)?;
            cfg.validate().map_err(|e| constraint("states", e.to_string()))?;
            Session::Bb84(cfg)
        }
    };

    Ok(ExperimentConfig {
        session,
        seed,
        workers,
        output,
        format,
        alarm_threshold,
        write_transcript,
    })
}

fn channel_model(
    name: &str,
    eta: Option<f64>,
    eve_states: Option<Vec<FockQubit>>,
    default_eve: impl FnOnce() -> Vec<Projector>,
) -> Result<ChannelModel, ConfigError> {
    if eta.is_some() && name != "loss" {
        return Err(constraint("eta", "only used with channel = \"loss\""));
    }
    if eve_states.is_some() && name != "intercept_resend" {
        return Err(constraint("eve_states", "only used with channel = \"intercept_resend\""));
    }
    match name {
        "ideal" => Ok(ChannelModel::Ideal),
        "loss" => {
            let eta = eta.ok_or_else(|| constraint("eta", "required with channel = \"loss\""))?;
            ChannelModel::loss(eta).map_err(|e| constraint("eta", e.to_string()))
        }
        "intercept_resend" => {
            let projectors = match eve_states {
                Some(states) if states.is_empty() => return Err(constraint("eve_states", "must not be empty")),
                Some(states) => states.into_iter().map(Projector::new).collect(),
                None => default_eve(),
            };
            ChannelModel::intercept_resend(projectors).map_err(|e| constraint("eve_states", e.to_string()))
        }
        "photon_number_attack" => Ok(ChannelModel::PhotonNumberAttack),
        other => Err(constraint(
            "channel",
            format!(
                "expected one of \"ideal\", \"loss\", \"intercept_resend\", \"photon_number_attack\", got \"{other}\""
            ),
        )),
    }
}

fn type_error(key: &str, want: &str, got: &Value) -> ConfigError {
    constraint(key, format!("expected {want}, got {}", got.type_str()))
}

fn take_f64(table: &mut Table, key: &str) -> Result<Option<f64>, ConfigError> {
    match table.remove(key) {
        None => Ok(None),
        Some(Value::Float(f)) if f.is_finite() => Ok(Some(f)),
        Some(Value::Float(f)) => Err(constraint(key, format!("must be finite, got {f}"))),
        Some(Value::Integer(i)) => Ok(Some(i as f64)),
        Some(other) => Err(type_error(key, "a number", &other)),
    }
}

fn take_u64(table: &mut Table, key: &str) -> Result<Option<u64>, ConfigError> {
    match table.remove(key) {
        None => Ok(None),
        Some(Value::Integer(i)) => u64::try_from(i)
            .map(Some)
            .map_err(|_| constraint(key, format!("must be non-negative, got {i}"))),
        // seeds above i64::MAX can be given as strings
        Some(Value::String(s)) => s
            .parse::<u64>()
            .map(Some)
            .map_err(|_| constraint(key, format!("expected an unsigned integer, got \"{s}\""))),
        Some(other) => Err(type_error(key, "an integer", &other)),
    }
}

fn take_str(table: &mut Table, key: &str) -> Result<Option<String>, ConfigError> {
    match table.remove(key) {
        None => Ok(None),
        Some(Value::String(s)) => Ok(Some(s)),
        Some(other) => Err(type_error(key, "a string", &other)),
    }
}

fn take_bool(table: &mut Table, key: &str) -> Result<Option<bool>, ConfigError> {
    match table.remove(key) {
        None => Ok(None),
        Some(Value::Boolean(b)) => Ok(Some(b)),
        Some(other) => Err(type_error(key, "a boolean", &other)),
    }
}

/// A list of states, each either `[theta, psi]` Bloch angles or
/// `[alpha_re, alpha_im, beta_re, beta_im]` amplitudes.
fn take_states(table: &mut Table, key: &str) -> Result<Option<Vec<FockQubit>>, ConfigError> {
    let items = match table.remove(key) {
        None => return Ok(None),
        Some(Value::Array(items)) => items,
        Some(other) => return Err(type_error(key, "an array of states", &other)),
    };
    let mut states = Vec::with_capacity(items.len());
    for (idx, item) in items.iter().enumerate() {
        let entry = format!("{key}[{idx}]");
        let nums = match item {
            Value::Array(xs) => xs
                .iter()
                .map(|x| match x {
                    Value::Float(f) => Ok(*f),
                    Value::Integer(i) => Ok(*i as f64),
                    other => Err(type_error(&entry, "numbers", other)),
                })
                .collect::<Result<Vec<f64>, _>>()?,
            other => return Err(type_error(&entry, "an array of numbers", other)),
        };
        let state = match nums.as_slice() {
            [theta, psi] => FockQubit::from_bloch(BlochAngles::new(*theta, *psi)),
            [are, aim, bre, bim] => FockQubit::new(Complex64::new(*are, *aim), Complex64::new(*bre, *bim)),
            _ => {
                return Err(constraint(
                    &entry,
                    format!("expected [theta, psi] or [alpha_re, alpha_im, beta_re, beta_im], got {} numbers", nums.len()),
                ))
            }
        };
        states.push(state.map_err(|e| constraint(&entry, e.to_string()))?);
    }
    Ok(Some(states))
}

/// The computational class plus the balanced class `(|0⟩ ± |1⟩)/√2`.
pub fn default_bb84_states() -> [FockQubit; 4] {
    let h = FRAC_1_SQRT_2;
    [
        FockQubit::vacuum(),
        FockQubit::photon(),
        FockQubit::from_real(h, h).expect("normalized"),
        FockQubit::from_real(h, -h).expect("normalized"),
    ]
}
