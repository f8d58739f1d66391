//! Key bits per particle: closed forms, the K_max landscape, and empirical
//! reports from simulated transcripts.
//!
//! K = n_b / n_p divides sifted key bits by the expected number of photons
//! sent. For the B92-type scheme with states (cos θ_i, e^{iψ_i} sin θ_i):
//!
//! ```text
//! K = (1 − |cos θ_0 cos θ_1 + sin θ_0 sin θ_1 e^{iψ}|²) / (sin²θ_0 + sin²θ_1)
//!   ≤ (1 − (|cos θ_0 cos θ_1| − |sin θ_0 sin θ_1|)²) / (sin²θ_0 + sin²θ_1) = K_max
//! ```

use std::fmt::Write as _;
use std::io;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{QkdError, Result};
use crate::fockqubit::{BlochAngles, FockQubit};
use crate::protocol::{
    run_checks, B92Config, Backend, Bb84Config, CheckReport, Detection, Transcript,
};

/// K of ordinary single-photon BB84: n_b = N/2, n_p = N.
pub const ORDINARY_BB84_K: f64 = 0.5;
/// K of ordinary polarization B92: n_b = N/2, n_p = N.
pub const ORDINARY_B92_K: f64 = 0.5;
/// Success-probability factor of the heralded linear-optics projector.
pub const LINEAR_OPTICS_HERALD_FACTOR: f64 = 0.5;

/// Probability that a B92 round yields a positive result: ½(1 − |⟨φ_0|φ_1⟩|²).
pub fn success_probability(phi0: &FockQubit, phi1: &FockQubit) -> f64 {
    0.5 * (1.0 - phi0.overlap(phi1).norm_sqr())
}

/// K from amplitudes: (1 − |⟨φ_0|φ_1⟩|²) / (|β_0|² + |β_1|²).
pub fn k_ratio_b92_amplitudes(phi0: &FockQubit, phi1: &FockQubit) -> Result<f64> {
    let den = phi0.photon_probability() + phi1.photon_probability();
    if den <= 0.0 {
        return Err(QkdError::ZeroPhotonNumber);
    }
    Ok((1.0 - phi0.overlap(phi1).norm_sqr()) / den)
}

fn bloch_denominator(theta0: f64, theta1: f64) -> Result<f64> {
    for (what, value) in [("theta0", theta0), ("theta1", theta1)] {
        if !value.is_finite() {
            return Err(QkdError::NonFinite { what, value });
        }
    }
    let den = theta0.sin().powi(2) + theta1.sin().powi(2);
    if den <= 0.0 {
        return Err(QkdError::ZeroPhotonNumber);
    }
    Ok(den)
}

fn bloch_overlap(theta0: f64, theta1: f64, psi: f64) -> Complex64 {
    theta0.cos() * theta1.cos() + Complex64::from_polar(theta0.sin() * theta1.sin(), psi)
}

/// K for φ_0 = (cos θ_0, sin θ_0) and φ_1 = (cos θ_1, e^{iψ} sin θ_1), in Bloch form.
pub fn k_ratio_b92(theta0: f64, theta1: f64, psi: f64) -> Result<f64> {
    let den = bloch_denominator(theta0, theta1)?;
    if !psi.is_finite() {
        return Err(QkdError::NonFinite {
            what: "psi",
            value: psi,
        });
    }
    Ok((1.0 - bloch_overlap(theta0, theta1, psi).norm_sqr()) / den)
}

/// Upper bound of [`k_ratio_b92`] over ψ. `None` at the origin, where the
/// limit depends on the direction of approach.
pub fn k_max(theta0: f64, theta1: f64) -> Option<f64> {
    if !theta0.is_finite() || !theta1.is_finite() {
        return None;
    }
    k_max_from_parts(theta0.sin(), theta0.cos(), theta1.sin(), theta1.cos())
}

/// K_max on the sin θ chart, taking θ_i ∈ [0, π/2].
pub fn k_max_from_sines(sin0: f64, sin1: f64) -> Option<f64> {
    let cos = |s: f64| (1.0 - s * s).max(0.0).sqrt();
    k_max_from_parts(sin0, cos(sin0), sin1, cos(sin1))
}

// 1 − (|c0 c1| − |s0 s1|)² expanded with c² = 1 − s², which keeps the axes
// at exactly 1 and avoids cancellation near the origin.
fn k_max_from_parts(s0: f64, c0: f64, s1: f64, c1: f64) -> Option<f64> {
    let den = s0 * s0 + s1 * s1;
    if den == 0.0 {
        return None;
    }
    let ss = (s0 * s1).abs();
    Some(1.0 + 2.0 * ss * ((c0 * c1).abs() - ss) / den)
}

/// K with optimal unambiguous discrimination: 2(1 − |⟨φ_0|φ_1⟩|) / (|β_0|² + |β_1|²).
pub fn k_ratio_b92_povm(theta0: f64, theta1: f64, psi: f64) -> Result<f64> {
    let den = bloch_denominator(theta0, theta1)?;
    if !psi.is_finite() {
        return Err(QkdError::NonFinite {
            what: "psi",
            value: psi,
        });
    }
    Ok(2.0 * (1.0 - bloch_overlap(theta0, theta1, psi).norm()) / den)
}

/// [`k_ratio_b92_povm`] from amplitudes.
pub fn k_ratio_b92_povm_amplitudes(phi0: &FockQubit, phi1: &FockQubit) -> Result<f64> {
    let den = phi0.photon_probability() + phi1.photon_probability();
    if den <= 0.0 {
        return Err(QkdError::ZeroPhotonNumber);
    }
    Ok(2.0 * (1.0 - phi0.overlap(phi1).norm()) / den)
}

/// K of the four-state scheme: 4 / (2 Σ|β|²). Orthogonal classes force this to 1.
pub fn k_ratio_bb84(states: &[FockQubit; 4]) -> Result<f64> {
    crate::protocol::validate_quadruple(states)?;
    let total: f64 = states.iter().map(FockQubit::photon_probability).sum();
    Ok(4.0 / (2.0 * total))
}

/// K_max sampled on a uniform grid over (sin θ_0, sin θ_1) ∈ [0, 1]².
#[derive(Debug, Clone, PartialEq)]
pub struct GridData {
    pub resolution: usize,
    /// Row-major: row `i` has sin θ_0 = axis[i], column `j` has sin θ_1 = axis[j].
    pub values: Vec<Option<f64>>,
}

impl GridData {
    pub fn axis(&self, i: usize) -> f64 {
        grid_axis(i, self.resolution)
    }

    pub fn value(&self, row: usize, col: usize) -> Option<f64> {
        self.values[row * self.resolution + col]
    }

    /// Largest defined value; ties go to the lowest row-major index.
    pub fn argmax(&self) -> Option<(usize, usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (idx, v) in self.values.iter().enumerate() {
            if let Some(v) = *v {
                if best.is_none_or(|(_, b)| v > b) {
                    best = Some((idx, v));
                }
            }
        }
        best.map(|(idx, v)| (idx / self.resolution, idx % self.resolution, v))
    }

    /// CSV with header `sin_theta0,sin_theta1,k_max`; the undefined origin is `nan`.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 48);
        out.push_str("sin_theta0,sin_theta1,k_max\n");
        for (idx, v) in self.values.iter().enumerate() {
            let (i, j) = (idx / self.resolution, idx % self.resolution);
            let _ = write!(out, "{},{},", self.axis(i), self.axis(j));
            match v {
                Some(v) => {
                    let _ = writeln!(out, "{v}");
                }
                None => out.push_str("nan\n"),
            }
        }
        out
    }

    pub fn write_csv<W: io::Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(self.to_csv().as_bytes())
    }
}

fn grid_axis(i: usize, resolution: usize) -> f64 {
    if i + 1 == resolution {
        1.0
    } else {
        i as f64 / (resolution - 1) as f64
    }
}

/// Evaluates K_max on a `resolution × resolution` grid.
pub fn kmax_grid(resolution: usize) -> Result<GridData> {
    if resolution < 2 {
        return Err(QkdError::Config(format!(
            "grid resolution must be at least 2, got {resolution}"
        )));
    }
    let values = (0..resolution * resolution)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / resolution, idx % resolution);
            k_max_from_sines(grid_axis(i, resolution), grid_axis(j, resolution))
        })
        .collect();
    Ok(GridData { resolution, values })
}

/// Either protocol's configuration, for reporting.
#[derive(Debug, Clone, Copy)]
pub enum SessionConfig<'a> {
    B92(&'a B92Config),
    Bb84(&'a Bb84Config),
}

impl SessionConfig<'_> {
    /// Closed-form K for an ideal channel with this configuration's receiver.
    pub fn analytic_k(&self) -> Result<f64> {
        match self {
            SessionConfig::B92(cfg) => {
                let k = k_ratio_b92(cfg.theta0, cfg.theta1, cfg.psi)?;
                Ok(match cfg.backend {
                    Backend::IdealProjective => k,
                    Backend::LinearOptics => k * LINEAR_OPTICS_HERALD_FACTOR,
                })
            }
            SessionConfig::Bb84(cfg) => k_ratio_bb84(&cfg.states),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KeyRateReport {
    pub n_b: u64,
    pub n_p: f64,
    /// `None` when no key rounds were run (n_p = 0).
    pub k_empirical: Option<f64>,
    pub k_analytic: f64,
    pub positive_rate: f64,
    /// `None` when the check is indeterminate.
    pub null_pair_click_rate: Option<f64>,
    pub rounds: u64,
    pub seed: u64,
    pub null_pair_trials: u64,
    pub null_pair_clicks: u64,
    pub null_pair_interval: Option<(f64, f64)>,
    pub detection: Detection,
}

impl KeyRateReport {
    /// Pretty JSON; numbers use the shortest form that parses back exactly.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "nan".to_owned(), |v| v.to_string());
        let (lo, hi) = self
            .null_pair_interval
            .map_or((None, None), |(a, b)| (Some(a), Some(b)));
        let detection = match self.detection {
            Detection::Indeterminate => "indeterminate",
            Detection::Clear => "clear",
            Detection::Alarm => "alarm",
        };
        format!(
            "n_b,n_p,k_empirical,k_analytic,positive_rate,null_pair_click_rate,rounds,seed,\
             null_pair_trials,null_pair_clicks,null_pair_ci_low,null_pair_ci_high,detection\n\
             {},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            self.n_b,
            self.n_p,
            opt(self.k_empirical),
            self.k_analytic,
            self.positive_rate,
            opt(self.null_pair_click_rate),
            self.rounds,
            self.seed,
            self.null_pair_trials,
            self.null_pair_clicks,
            opt(lo),
            opt(hi),
            detection,
        )
    }
}

/// Builds the key-rate report of a finished session. `n_p` and `n_b` are both
/// taken over the rounds that were not revealed for checking.
pub fn empirical_report(t: &Transcript, cfg: SessionConfig<'_>, alarm_threshold: f64) -> Result<KeyRateReport> {
    let checks: CheckReport = run_checks(t, alarm_threshold);
    let n_b = t.alice_key.len() as u64;
    let n_p: f64 = t
        .records
        .iter()
        .filter(|r| !r.check_round)
        .map(|r| r.photons)
        .sum();
    let positives = t.records.iter().filter(|r| r.positive).count();
    let rounds = t.rounds();
    Ok(KeyRateReport {
        n_b,
        n_p,
        k_empirical: (n_p > 0.0).then(|| n_b as f64 / n_p),
        k_analytic: cfg.analytic_k()?,
        positive_rate: if rounds == 0 { 0.0 } else { positives as f64 / rounds as f64 },
        null_pair_click_rate: checks.rate,
        rounds,
        seed: t.seed,
        null_pair_trials: checks.null_pair_trials,
        null_pair_clicks: checks.null_pair_clicks,
        null_pair_interval: checks.interval,
        detection: checks.detection,
    })
}

/// Convenience: canonical FockQubit for a Bloch angle pair.
pub fn bloch_state(theta: f64, psi: f64) -> Result<FockQubit> {
    FockQubit::from_bloch(BlochAngles::new(theta, psi))
}
