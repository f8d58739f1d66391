//! Simulation and analytics for key distribution with superpositions of the
//! vacuum and single-photon states.

pub mod error;
pub mod fockqubit;
pub mod measurement;

pub use error::{QkdError, Result};
pub use fockqubit::{BlochAngles, Ensemble, FockQubit};
pub mod channel;
pub mod metrics;
pub mod protocol;
pub mod cli;
