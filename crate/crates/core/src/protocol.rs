//! B92-type and BB84-type sessions over vacuum/single-photon superpositions.
//!
//! Each round draws its randomness from independent substreams keyed by
//! `(seed, round, party)`, so a transcript depends only on the configuration
//! and the seed, never on how rounds are scheduled across workers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{transmit, ChannelModel};
use crate::error::{QkdError, Result};
use crate::fockqubit::{BlochAngles, FockQubit, IDENTITY_TOL, NORM_TOL};
use crate::measurement::optics::{linear_optics_project, probe_for};
use crate::measurement::{click_probability, projective_measure, Projector};

pub const DEFAULT_CHECK_FRACTION: f64 = 0.1;

/// Two-sided normal quantile for the 99% confidence intervals on check rates.
pub const Z_99: f64 = 2.575_829_303_548_901;

/// Parties owning a random substream within a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Party {
    Alice = 0,
    Channel = 1,
    Bob = 2,
    Check = 3,
    Source = 4,
}

const PARTY_SLOTS: u64 = 8;

/// Random stream for `party` in round `round` of the session seeded by `seed`.
pub fn round_rng(seed: u64, round: u64, party: Party) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(round.wrapping_mul(PARTY_SLOTS) + party as u64);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    #[default]
    IdealProjective,
    LinearOptics,
}

/// How `n_p` is accumulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PhotonCount {
    /// Add the exact expectation |β|² of each state sent.
    #[default]
    Expected,
    /// Add a sampled photon presence (0 or 1) for each state sent.
    Sampled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct B92Config {
    pub theta0: f64,
    pub theta1: f64,
    /// Relative phase ψ = ψ_1 − ψ_0; φ_0 carries ψ_0 = 0.
    pub psi: f64,
    pub rounds: u64,
    pub channel: ChannelModel,
    pub backend: Backend,
    pub check_fraction: f64,
    pub photon_count: PhotonCount,
}

impl B92Config {
    pub fn new(theta0: f64, theta1: f64, psi: f64, rounds: u64) -> Self {
        Self {
            theta0,
            theta1,
            psi,
            rounds,
            channel: ChannelModel::Ideal,
            backend: Backend::IdealProjective,
            check_fraction: DEFAULT_CHECK_FRACTION,
            photon_count: PhotonCount::Expected,
        }
    }

    /// The signal states `(φ_0, φ_1)`.
    pub fn states(&self) -> Result<(FockQubit, FockQubit)> {
        Ok((
            FockQubit::from_bloch(BlochAngles::new(self.theta0, 0.0))?,
            FockQubit::from_bloch(BlochAngles::new(self.theta1, self.psi))?,
        ))
    }

    pub fn validate(&self) -> Result<()> {
        let (phi0, phi1) = self.states()?;
        for (name, theta) in [("theta0", self.theta0), ("theta1", self.theta1)] {
            if theta.sin().abs() <= IDENTITY_TOL {
                return Err(QkdError::Config(format!(
                    "{name} = {theta} makes a pure-vacuum signal state, which is not allowed"
                )));
            }
        }
        if phi0.same_ray(&phi1) {
            return Err(QkdError::Config(
                "phi0 and phi1 are the same state up to phase".into(),
            ));
        }
        validate_common(self.rounds, self.check_fraction, &self.channel)
    }

    /// Bob's projectors `(P_0, P_1)`: `P_0` never clicks on φ_1 and `P_1` never on φ_0.
    pub fn projectors(&self) -> Result<(Projector, Projector)> {
        let (phi0, phi1) = self.states()?;
        Ok((Projector::annihilating(&phi1), Projector::annihilating(&phi0)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bb84Config {
    /// `[φ_0, φ_1, φ'_0, φ'_1]`: class 0 is `(φ_0, φ_1)`, class 1 is `(φ'_0, φ'_1)`.
    pub states: [FockQubit; 4],
    pub rounds: u64,
    pub channel: ChannelModel,
    pub check_fraction: f64,
    pub photon_count: PhotonCount,
}

impl Bb84Config {
    pub fn new(states: [FockQubit; 4], rounds: u64) -> Self {
        Self {
            states,
            rounds,
            channel: ChannelModel::Ideal,
            check_fraction: DEFAULT_CHECK_FRACTION,
            photon_count: PhotonCount::Expected,
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_quadruple(&self.states)?;
        validate_common(self.rounds, self.check_fraction, &self.channel)
    }

    pub fn state(&self, class: u8, bit: u8) -> &FockQubit {
        &self.states[2 * class as usize + bit as usize]
    }
}

/// In-class states must be orthogonal; states of different classes with the
/// same bit must not be.
pub fn validate_quadruple(states: &[FockQubit; 4]) -> Result<()> {
    for (class, pair) in states.chunks(2).enumerate() {
        let ov = pair[0].overlap(&pair[1]).norm();
        if ov > NORM_TOL {
            return Err(QkdError::Config(format!(
                "class {class} states are not orthogonal: |overlap| = {ov:e} exceeds {NORM_TOL:e}"
            )));
        }
    }
    for bit in 0..2 {
        let ov = states[bit].overlap(&states[2 + bit]).norm();
        if ov <= NORM_TOL {
            return Err(QkdError::Config(format!(
                "states for bit {bit} in the two classes are orthogonal; the classes coincide"
            )));
        }
    }
    Ok(())
}

fn validate_common(rounds: u64, check_fraction: f64, channel: &ChannelModel) -> Result<()> {
    if rounds == 0 {
        return Err(QkdError::Config("rounds must be positive".into()));
    }
    if !(0.0..1.0).contains(&check_fraction) {
        return Err(QkdError::Probability {
            what: "check_fraction",
            range: "[0, 1)",
            value: check_fraction,
        });
    }
    channel.validate()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    B92,
    Bb84,
}

/// Events of one round.
///
/// For B92, `alice_state_label` is the bit and `bob_choice_label` the index of
/// the projector measured. For BB84, `alice_state_label = 2·class + bit` and
/// `bob_choice_label` is the class Bob measured.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundRecord {
    pub index: u64,
    pub alice_bit: u8,
    pub alice_state_label: u8,
    pub bob_choice_label: u8,
    /// Bob's decoded bit, present whenever he has an outcome to decode.
    pub bob_bit: Option<u8>,
    pub positive: bool,
    pub sifted: bool,
    pub check_round: bool,
    pub publicly_revealed: bool,
    /// Photon number credited to this round (expectation or sample).
    pub photons: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transcript {
    pub protocol: Protocol,
    pub config_summary: String,
    pub seed: u64,
    pub records: Vec<RoundRecord>,
    pub alice_key: Vec<u8>,
    pub bob_key: Vec<u8>,
}

impl Transcript {
    fn assemble(protocol: Protocol, config_summary: String, seed: u64, records: Vec<RoundRecord>) -> Self {
        let (alice_key, bob_key) = records
            .iter()
            .filter(|r| r.sifted && !r.check_round)
            .map(|r| (r.alice_bit, r.bob_bit.expect("sifted rounds carry Bob's bit")))
            .unzip();
        Self {
            protocol,
            config_summary,
            seed,
            records,
            alice_key,
            bob_key,
        }
    }

    pub fn rounds(&self) -> u64 {
        self.records.len() as u64
    }

    pub fn key_errors(&self) -> usize {
        self.alice_key
            .iter()
            .zip(&self.bob_key)
            .filter(|(a, b)| a != b)
            .count()
    }
}

/// Executes rounds `0..rounds` on `workers` threads (1 = sequential) and
/// returns them in round order.
fn run_rounds<F>(rounds: u64, workers: usize, round: F) -> Result<Vec<RoundRecord>>
where
    F: Fn(u64) -> RoundRecord + Sync + Send,
{
    if workers <= 1 {
        return Ok((0..rounds).map(round).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| QkdError::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| (0..rounds).into_par_iter().map(round).collect()))
}

fn is_check_round(seed: u64, round: u64, check_fraction: f64) -> bool {
    check_fraction > 0.0 && round_rng(seed, round, Party::Check).random_bool(check_fraction)
}

fn photons_sent(state: &FockQubit, mode: PhotonCount, seed: u64, round: u64) -> f64 {
    let p = state.photon_probability();
    match mode {
        PhotonCount::Expected => p,
        PhotonCount::Sampled => {
            let hit = round_rng(seed, round, Party::Source).random::<f64>() < p;
            f64::from(u8::from(hit))
        }
    }
}

pub fn run_b92(cfg: &B92Config, seed: u64) -> Result<Transcript> {
    run_b92_with_workers(cfg, seed, 1)
}

pub fn run_b92_with_workers(cfg: &B92Config, seed: u64, workers: usize) -> Result<Transcript> {
    cfg.validate()?;
    let (phi0, phi1) = cfg.states()?;
    let (p0, p1) = cfg.projectors()?;
    let signals = [phi0, phi1];
    let projectors = [p0, p1];
    let probes = [probe_for(p0.direction()), probe_for(p1.direction())];

    let round = |index: u64| {
        let alice_bit = u8::from(round_rng(seed, index, Party::Alice).random_bool(0.5));
        let sent = signals[alice_bit as usize];
        let photons = photons_sent(&sent, cfg.photon_count, seed, index);

        let received = transmit(&sent, &cfg.channel, &mut round_rng(seed, index, Party::Channel));

        let mut bob = round_rng(seed, index, Party::Bob);
        let label = u8::from(bob.random_bool(0.5));
        let positive = match cfg.backend {
            Backend::IdealProjective => projective_measure(&received, &projectors[label as usize], &mut bob),
            Backend::LinearOptics => {
                linear_optics_project(&received, &probes[label as usize], &mut bob).success
            }
        };
        let check_round = is_check_round(seed, index, cfg.check_fraction);
        RoundRecord {
            index,
            alice_bit,
            alice_state_label: alice_bit,
            bob_choice_label: label,
            bob_bit: positive.then_some(label),
            positive,
            sifted: positive,
            check_round,
            publicly_revealed: check_round,
            photons,
        }
    };

    let records = run_rounds(cfg.rounds, workers, round)?;
    let summary = format!(
        "b92 theta0={} theta1={} psi={} rounds={} channel={} backend={:?} check_fraction={}",
        cfg.theta0,
        cfg.theta1,
        cfg.psi,
        cfg.rounds,
        cfg.channel.name(),
        cfg.backend,
        cfg.check_fraction
    );
    Ok(Transcript::assemble(Protocol::B92, summary, seed, records))
}

pub fn run_bb84(cfg: &Bb84Config, seed: u64) -> Result<Transcript> {
    run_bb84_with_workers(cfg, seed, 1)
}

pub fn run_bb84_with_workers(cfg: &Bb84Config, seed: u64, workers: usize) -> Result<Transcript> {
    cfg.validate()?;
    let round = |index: u64| {
        let mut alice = round_rng(seed, index, Party::Alice);
        let class = u8::from(alice.random_bool(0.5));
        let alice_bit = u8::from(alice.random_bool(0.5));
        let sent = *cfg.state(class, alice_bit);
        let photons = photons_sent(&sent, cfg.photon_count, seed, index);

        let received = transmit(&sent, &cfg.channel, &mut round_rng(seed, index, Party::Channel));

        // complete two-outcome measurement in the chosen class
        let mut bob = round_rng(seed, index, Party::Bob);
        let bob_class = u8::from(bob.random_bool(0.5));
        let zero = Projector::new(*cfg.state(bob_class, 0));
        let bob_bit = u8::from(bob.random::<f64>() >= click_probability(&received, &zero));

        let sifted = class == bob_class;
        let check_round = is_check_round(seed, index, cfg.check_fraction);
        RoundRecord {
            index,
            alice_bit,
            alice_state_label: 2 * class + alice_bit,
            bob_choice_label: bob_class,
            bob_bit: Some(bob_bit),
            positive: true,
            sifted,
            check_round,
            publicly_revealed: check_round,
            photons,
        }
    };
    let records = run_rounds(cfg.rounds, workers, round)?;
    let summary = format!(
        "bb84 rounds={} channel={} check_fraction={}",
        cfg.rounds,
        cfg.channel.name(),
        cfg.check_fraction
    );
    Ok(Transcript::assemble(Protocol::Bb84, summary, seed, records))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Detection {
    /// No revealed round could test for interference.
    Indeterminate,
    Clear,
    Alarm,
}

/// Outcome of the check-round comparison.
///
/// A null-pair trial is a revealed round in which Alice's state is the one
/// Bob's measurement outcome should never report: for B92 any round where
/// Alice's bit differs from Bob's projector label, for BB84 any class-matched
/// round. A null-pair click is a trial where Bob nevertheless reported it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckReport {
    pub check_rounds: u64,
    pub null_pair_trials: u64,
    pub null_pair_clicks: u64,
    /// `None` when there were no trials.
    pub rate: Option<f64>,
    /// 99% Wilson score interval on the rate.
    pub interval: Option<(f64, f64)>,
    pub detection: Detection,
}

impl CheckReport {
    pub fn lower_bound(&self) -> Option<f64> {
        self.interval.map(|(lo, _)| lo)
    }
}

/// Wilson score interval for `hits` out of `trials` at normal quantile `z`.
pub fn wilson_interval(hits: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(trials > 0 && hits <= trials);
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if hits == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if hits == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Evaluates the revealed rounds of `t`. An alarm is raised when the lower
/// confidence bound of the null-pair click rate exceeds `alarm_threshold`.
pub fn run_checks(t: &Transcript, alarm_threshold: f64) -> CheckReport {
    let revealed = t.records.iter().filter(|r| r.publicly_revealed);
    let mut check_rounds = 0u64;
    let mut trials = 0u64;
    let mut clicks = 0u64;
    for r in revealed {
        check_rounds += 1;
        let (is_trial, is_click) = match t.protocol {
            Protocol::B92 => {
                let trial = r.alice_bit != r.bob_choice_label;
                (trial, trial && r.positive)
            }
            Protocol::Bb84 => {
                let trial = r.alice_state_label / 2 == r.bob_choice_label;
                (trial, trial && r.bob_bit != Some(r.alice_bit))
            }
        };
        trials += u64::from(is_trial);
        clicks += u64::from(is_click);
    }
    if trials == 0 {
        return CheckReport {
            check_rounds,
            null_pair_trials: 0,
            null_pair_clicks: 0,
            rate: None,
            interval: None,
            detection: Detection::Indeterminate,
        };
    }
    let interval = wilson_interval(clicks, trials, Z_99);
    CheckReport {
        check_rounds,
        null_pair_trials: trials,
        null_pair_clicks: clicks,
        rate: Some(clicks as f64 / trials as f64),
        interval: Some(interval),
        detection: if interval.0 > alarm_threshold {
            Detection::Alarm
        } else {
            Detection::Clear
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

    fn within_4_sigma(hits: u64, n: u64, p: f64) -> bool {
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        (hits as f64 / n as f64 - p).abs() <= 4.0 * sigma
    }

    fn pi6_config(rounds: u64) -> B92Config {
        B92Config::new(PI / 6.0, -PI / 6.0, 0.0, rounds)
    }

    fn diagonal_bb84() -> Bb84Config {
        let h = FRAC_1_SQRT_2;
        Bb84Config::new(
            [
                FockQubit::vacuum(),
                FockQubit::photon(),
                FockQubit::from_real(h, h).unwrap(),
                FockQubit::from_real(h, -h).unwrap(),
            ],
            1000,
        )
    }

    #[test]
    fn substreams_are_independent_of_order() {
        let a: u64 = round_rng(42, 7, Party::Bob).random();
        let _ = round_rng(42, 6, Party::Bob).random::<u64>();
        let b: u64 = round_rng(42, 7, Party::Bob).random();
        assert_eq!(a, b);
        let c: u64 = round_rng(42, 7, Party::Alice).random();
        assert_ne!(a, c);
    }

    #[test]
    fn b92_rejects_bad_configs() {
        assert!(B92Config::new(0.0, 0.5, 0.0, 10).validate().is_err());
        assert!(B92Config::new(0.5, PI, 0.0, 10).validate().is_err());
        assert!(B92Config::new(0.5, 0.5, 0.0, 10).validate().is_err());
        assert!(B92Config::new(0.5, 0.6, 0.0, 0).validate().is_err());
        let mut cfg = pi6_config(10);
        cfg.check_fraction = 1.0;
        assert!(cfg.validate().is_err());
        cfg.check_fraction = 0.0;
        assert!(cfg.validate().is_ok());
        assert!(run_b92(&B92Config::new(0.4, 0.4, 0.0, 10), 1).is_err());
    }

    #[test]
    fn b92_orthogonal_pair() {
        // φ_0 = |1⟩-leaning and φ_1 its orthogonal partner: overlap 0
        let mut cfg = B92Config::new(FRAC_PI_2 / 2.0, -FRAC_PI_2 / 2.0, 0.0, 20_000);
        cfg.check_fraction = 0.0;
        let (a, b) = cfg.states().unwrap();
        assert!(a.overlap(&b).norm() < 1e-15);
        let t = run_b92(&cfg, 3).unwrap();
        let positives = t.records.iter().filter(|r| r.positive).count() as u64;
        assert!(within_4_sigma(positives, cfg.rounds, 0.5));
        assert!(t
            .records
            .iter()
            .filter(|r| r.positive)
            .all(|r| r.bob_bit == Some(r.alice_bit)));
    }

    #[test]
    fn b92_pi_over_six_positive_rate() {
        let t = run_b92(&pi6_config(100_000), 2024).unwrap();
        let positives = t.records.iter().filter(|r| r.positive).count() as u64;
        assert!(within_4_sigma(positives, 100_000, 0.375));
        assert_eq!(t.key_errors(), 0);
    }

    #[test]
    fn transcript_invariants() {
        let t = run_b92(&pi6_config(5_000), 8).unwrap();
        for r in &t.records {
            assert!(!r.sifted || r.positive);
            assert!(!r.check_round || r.publicly_revealed);
        }
        let expected = t.records.iter().filter(|r| r.sifted && !r.check_round).count();
        assert_eq!(t.alice_key.len(), expected);
        assert_eq!(t.bob_key.len(), expected);
    }

    #[test]
    fn worker_count_does_not_change_transcript() {
        let mut cfg = pi6_config(3_000);
        cfg.channel = ChannelModel::PhotonNumberAttack;
        let serial = run_b92_with_workers(&cfg, 99, 1).unwrap();
        let parallel = run_b92_with_workers(&cfg, 99, 4).unwrap();
        assert_eq!(serial, parallel);
        let bb = diagonal_bb84();
        assert_eq!(
            run_bb84_with_workers(&bb, 5, 1).unwrap(),
            run_bb84_with_workers(&bb, 5, 3).unwrap()
        );
    }

    #[test]
    fn linear_optics_halves_positive_rate() {
        let mut cfg = pi6_config(100_000);
        cfg.backend = Backend::LinearOptics;
        let t = run_b92(&cfg, 77).unwrap();
        let positives = t.records.iter().filter(|r| r.positive).count() as u64;
        assert!(within_4_sigma(positives, cfg.rounds, 0.375 / 2.0));
        assert_eq!(t.key_errors(), 0);
    }

    #[test]
    fn bb84_validation() {
        let mut cfg = diagonal_bb84();
        assert!(cfg.validate().is_ok());
        cfg.states[1] = FockQubit::from_real(1e-3, (1.0f64 - 1e-6).sqrt()).unwrap();
        let err = cfg.validate().unwrap_err().to_string();
        assert!(err.contains("1e-3"), "{err}");
        let mut cfg = diagonal_bb84();
        cfg.states[2] = FockQubit::photon();
        cfg.states[3] = FockQubit::vacuum();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn bb84_sift_rate_and_agreement() {
        let mut cfg = diagonal_bb84();
        cfg.rounds = 100_000;
        let t = run_bb84(&cfg, 1).unwrap();
        let sifted = t.records.iter().filter(|r| r.sifted).count() as u64;
        assert!(within_4_sigma(sifted, cfg.rounds, 0.5));
        assert_eq!(t.key_errors(), 0);
        for r in t.records.iter().filter(|r| r.sifted) {
            assert_eq!(r.bob_bit, Some(r.alice_bit));
        }
    }

    #[test]
    fn bb84_mismatched_class_is_uniform() {
        let mut cfg = diagonal_bb84();
        cfg.rounds = 100_000;
        let t = run_bb84(&cfg, 4).unwrap();
        let mismatched: Vec<_> = t.records.iter().filter(|r| !r.sifted).collect();
        let ones = mismatched.iter().filter(|r| r.bob_bit == Some(1)).count() as u64;
        assert!(within_4_sigma(ones, mismatched.len() as u64, 0.5));
    }

    #[test]
    fn checks_ideal_and_indeterminate() {
        let t = run_b92(&pi6_config(20_000), 6).unwrap();
        let report = run_checks(&t, 0.0);
        assert!(report.null_pair_trials > 0);
        assert_eq!(report.null_pair_clicks, 0);
        assert_eq!(report.rate, Some(0.0));
        assert_eq!(report.lower_bound(), Some(0.0));
        assert_eq!(report.detection, Detection::Clear);

        let mut cfg = pi6_config(1000);
        cfg.check_fraction = 0.0;
        let report = run_checks(&run_b92(&cfg, 6).unwrap(), 0.0);
        assert_eq!(report.detection, Detection::Indeterminate);
        assert_eq!(report.rate, None);
    }

    #[test]
    fn checks_detect_photon_number_attack() {
        let mut cfg = pi6_config(100_000);
        cfg.channel = ChannelModel::PhotonNumberAttack;
        let t = run_b92(&cfg, 13).unwrap();
        let report = run_checks(&t, 0.0);
        // 2 cos²θ sin²θ at θ = π/6
        assert!(within_4_sigma(report.null_pair_clicks, report.null_pair_trials, 0.375));
        assert_eq!(report.detection, Detection::Alarm);
    }

    #[test]
    fn wilson_bounds() {
        assert_eq!(wilson_interval(0, 10, Z_99).0, 0.0);
        assert_eq!(wilson_interval(10, 10, Z_99).1, 1.0);
        let (lo, hi) = wilson_interval(50, 100, Z_99);
        assert!(lo < 0.5 && hi > 0.5);
        assert!((0.5 - lo - (hi - 0.5)).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn ideal_channel_keys_agree(
            t0 in 0.05..1.5f64, t1 in -1.5..-0.05f64, psi in 0.0..std::f64::consts::TAU, seed in any::<u64>(),
        ) {
            let mut cfg = B92Config::new(t0, t1, psi, 500);
            prop_assume!(cfg.validate().is_ok());
            cfg.backend = if seed % 2 == 0 { Backend::IdealProjective } else { Backend::LinearOptics };
            let t = run_b92(&cfg, seed).unwrap();
            prop_assert_eq!(&t.alice_key, &t.bob_key);
            let null_clicks = t.records.iter()
                .filter(|r| r.positive && r.alice_bit != r.bob_choice_label)
                .count();
            prop_assert_eq!(null_clicks, 0);
        }
    }
}
