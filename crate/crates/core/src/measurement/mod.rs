//! Measurement back-ends for Bob's receiver.
//!
//! - [`projective_measure`]: ideal rank-1 projection |B⟩⟨B| with Born statistics.
//! - [`optics::linear_optics_project`]: heralded projection built from a
//!   balanced beam splitter and a known probe state.
//! - [`usd_discriminate`]: outcome statistics of optimal unambiguous
//!   discrimination between two non-orthogonal states.

pub mod optics;

use rand::Rng;

use crate::error::{QkdError, Result};
use crate::fockqubit::FockQubit;

pub use optics::{
    beamsplitter_transform, herald_success_probability, linear_optics_project,
    HeraldOutcome, TwoModeState,
};

/// Rank-1 projector |B⟩⟨B|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projector {
    direction: FockQubit,
}

impl Projector {
    pub fn new(direction: FockQubit) -> Self {
        Self { direction }
    }

    /// The projector that never clicks on `null_state`, i.e. 1 − |s⟩⟨s|
    /// restricted to the qubit space.
    pub fn annihilating(null_state: &FockQubit) -> Self {
        Self::new(null_state.orthogonal_complement())
    }

    pub fn direction(&self) -> &FockQubit {
        &self.direction
    }

    /// The complementary projector 1 − |B⟩⟨B|.
    pub fn complement(&self) -> Self {
        Self::new(self.direction.orthogonal_complement())
    }
}

/// Born probability |⟨B|state⟩|² that `p` clicks on `state`.
pub fn click_probability(state: &FockQubit, p: &Projector) -> f64 {
    p.direction.overlap(state).norm_sqr().min(1.0)
}

/// Samples a click of projector `p` on `state`.
pub fn projective_measure<R: Rng + ?Sized>(state: &FockQubit, p: &Projector, rng: &mut R) -> bool {
    rng.random::<f64>() < click_probability(state, p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UsdOutcome {
    Identified(u8),
    Inconclusive,
}

/// Probability that optimal unambiguous discrimination of `phi0` vs `phi1`
/// gives a conclusive answer: 1 − |⟨φ_0|φ_1⟩|.
pub fn usd_conclusive_probability(phi0: &FockQubit, phi1: &FockQubit) -> f64 {
    (1.0 - phi0.overlap(phi1).norm()).max(0.0)
}

/// Discriminates which of `phi0` / `phi1` was sent. Conclusive outcomes always
/// name the state actually sent; only the conclusive rate is modeled.
pub fn usd_discriminate<R: Rng + ?Sized>(
    which: u8,
    phi0: &FockQubit,
    phi1: &FockQubit,
    rng: &mut R,
) -> Result<UsdOutcome> {
    if which > 1 {
        return Err(QkdError::Config(format!("state label must be 0 or 1, got {which}")));
    }
    if phi0.same_ray(phi1) {
        return Err(QkdError::Indistinguishable);
    }
    if rng.random::<f64>() < usd_conclusive_probability(phi0, phi1) {
        Ok(UsdOutcome::Identified(which))
    } else {
        Ok(UsdOutcome::Inconclusive)
    }
}
