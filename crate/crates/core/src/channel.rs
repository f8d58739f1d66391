//! Quantum channels between Alice and Bob.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{QkdError, Result};
use crate::fockqubit::FockQubit;
use crate::measurement::{projective_measure, Projector};

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelModel {
    Ideal,
    /// Single-photon absorption with probability `eta`.
    Loss { eta: f64 },
    /// Eve measures one of her projectors, chosen uniformly, and resends.
    InterceptResend { projectors: Vec<Projector> },
    /// Eve measures the photon number and forwards the eigenstate.
    PhotonNumberAttack,
}

impl ChannelModel {
    pub fn loss(eta: f64) -> Result<Self> {
        let model = ChannelModel::Loss { eta };
        model.validate()?;
        Ok(model)
    }

    pub fn intercept_resend(projectors: Vec<Projector>) -> Result<Self> {
        let model = ChannelModel::InterceptResend { projectors };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ChannelModel::Loss { eta } if !(0.0..=1.0).contains(eta) => Err(QkdError::Probability {
                what: "eta",
                range: "[0, 1]",
                value: *eta,
            }),
            ChannelModel::InterceptResend { projectors } if projectors.is_empty() => Err(
                QkdError::Config("intercept-resend needs at least one projector".into()),
            ),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ChannelModel::Ideal => "ideal",
            ChannelModel::Loss { .. } => "loss",
            ChannelModel::InterceptResend { .. } => "intercept_resend",
            ChannelModel::PhotonNumberAttack => "photon_number_attack",
        }
    }
}

/// Sends `state` through `model`.
pub fn transmit<R: Rng + ?Sized>(state: &FockQubit, model: &ChannelModel, rng: &mut R) -> FockQubit {
    match model {
        ChannelModel::Ideal => *state,
        ChannelModel::Loss { eta } => amplitude_damping(state, *eta, rng),
        ChannelModel::InterceptResend { projectors } => attack_intercept_resend(state, projectors, rng),
        ChannelModel::PhotonNumberAttack => attack_photon_number(state, rng).1,
    }
}

/// Probability that the loss channel replaces `state` by the vacuum.
pub fn absorption_probability(state: &FockQubit, eta: f64) -> f64 {
    eta * state.photon_probability()
}

/// Pure-state trajectory of amplitude damping: the photon is absorbed with
/// probability `eta |β|²`, otherwise the state becomes `(α, √(1−eta) β)` renormalized.
fn amplitude_damping<R: Rng + ?Sized>(state: &FockQubit, eta: f64, rng: &mut R) -> FockQubit {
    if rng.random::<f64>() < absorption_probability(state, eta) {
        return FockQubit::vacuum();
    }
    let damped: Complex64 = state.beta() * (1.0 - eta).sqrt();
    FockQubit::normalized(state.alpha(), damped)
        .expect("no-absorption branch has nonzero norm whenever it is reachable")
}

/// Eve measures n̂ and forwards the eigenstate: returns `(n, forwarded)`.
pub fn attack_photon_number<R: Rng + ?Sized>(state: &FockQubit, rng: &mut R) -> (u8, FockQubit) {
    if rng.random::<f64>() < state.photon_probability() {
        (1, FockQubit::photon())
    } else {
        (0, FockQubit::vacuum())
    }
}

/// Eve picks one of `projectors` uniformly, measures, and forwards its
/// direction on a click or the orthogonal complement otherwise.
///
/// # Panics
/// If `projectors` is empty.
pub fn attack_intercept_resend<R: Rng + ?Sized>(
    state: &FockQubit,
    projectors: &[Projector],
    rng: &mut R,
) -> FockQubit {
    assert!(!projectors.is_empty(), "Eve needs at least one projector");
    let p = &projectors[rng.random_range(0..projectors.len())];
    if projective_measure(state, p, rng) {
        *p.direction()
    } else {
        p.direction().orthogonal_complement()
    }
}
