//! Two-mode linear optics with at most two photons in total.
//!
//! The heralded projector mixes a known probe state in mode `a` with the
//! unknown input in mode `b` on a balanced beam splitter. A single photon at
//! detector `D_a` with nothing at `D_b` heralds a projection of the input onto
//! `B = (δ*, γ*)`, where `(γ, δ)` are the probe amplitudes. The success
//! probability is `|⟨B|input⟩|² / 2`.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{QkdError, Result};
use crate::fockqubit::{FockQubit, NORM_TOL};

/// Basis kets `(n_a, n_b)` in lexicographic order; this order is also the
/// sampling order.
pub const KETS: [(u8, u8); 6] = [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (2, 0)];

const HERALD_KET: (u8, u8) = (1, 0);

fn ket_index(n_a: u8, n_b: u8) -> Option<usize> {
    KETS.iter().position(|&k| k == (n_a, n_b))
}

const FACTORIAL: [f64; 3] = [1.0, 1.0, 2.0];
const BINOMIAL: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [1.0, 2.0, 1.0]];

/// Normalized state over the six kets `|n_a, n_b⟩` with `n_a + n_b ≤ 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeState {
    amplitudes: [Complex64; 6],
}

impl TwoModeState {
    pub fn new(amplitudes: [Complex64; 6]) -> Result<Self> {
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(QkdError::NotNormalized { norm_sqr });
        }
        Ok(Self { amplitudes })
    }

    /// The Fock state |n_a, n_b⟩.
    pub fn basis(n_a: u8, n_b: u8) -> Result<Self> {
        let idx = ket_index(n_a, n_b)
            .ok_or_else(|| QkdError::Config(format!("ket |{n_a},{n_b}> outside n_a + n_b <= 2")))?;
        let mut amplitudes = [Complex64::new(0.0, 0.0); 6];
        amplitudes[idx] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    /// `(γ + δ a†)(α + β b†)|0⟩` for probe `(γ, δ)` in mode `a` and input
    /// `(α, β)` in mode `b`.
    pub fn product(mode_a: &FockQubit, mode_b: &FockQubit) -> Self {
        let (g, d) = (mode_a.alpha(), mode_a.beta());
        let (a, b) = (mode_b.alpha(), mode_b.beta());
        let zero = Complex64::new(0.0, 0.0);
        Self {
            amplitudes: [g * a, g * b, zero, d * a, d * b, zero],
        }
    }

    pub fn amplitude(&self, n_a: u8, n_b: u8) -> Complex64 {
        ket_index(n_a, n_b).map_or(Complex64::new(0.0, 0.0), |i| self.amplitudes[i])
    }

    pub fn amplitudes(&self) -> &[Complex64; 6] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Born-rule sample of an output ket by inverse CDF over [`KETS`].
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (u8, u8) {
        let u: f64 = rng.random();
        let mut cumulative = 0.0;
        let mut last_populated = 0;
        for (i, amp) in self.amplitudes.iter().enumerate() {
            let p = amp.norm_sqr();
            if p > 0.0 {
                last_populated = i;
            }
            cumulative += p;
            if u < cumulative {
                return KETS[i];
            }
        }
        // rounding left the total just below u
        KETS[last_populated]
    }
}

/// Applies the beam splitter `a' = √R a + √(1−R) b`, `b' = −√(1−R) a + √R b`.
///
/// Each input monomial `a†^n b†^m` is rewritten through the inverse relations
/// `a† = √R a'† − √(1−R) b'†`, `b† = √(1−R) a'† + √R b'†` and the coefficients
/// are collected over the output kets.
pub fn beamsplitter_transform(state: &TwoModeState, reflectivity: f64) -> Result<TwoModeState> {
    if !(0.0..=1.0).contains(&reflectivity) {
        return Err(QkdError::Reflectivity(reflectivity));
    }
    let t = reflectivity.sqrt();
    let r = (1.0 - reflectivity).sqrt();
    let mut out = [Complex64::new(0.0, 0.0); 6];

    for (&(n_a, n_b), &coeff) in KETS.iter().zip(state.amplitudes.iter()) {
        if coeff.norm_sqr() == 0.0 {
            continue;
        }
        let (n_a, n_b) = (n_a as usize, n_b as usize);
        let scale = coeff / (FACTORIAL[n_a] * FACTORIAL[n_b]).sqrt();
        // (t A − r B)^n_a: pick i factors of A
        for (i, &c_a) in BINOMIAL[n_a].iter().enumerate().take(n_a + 1) {
            let from_a = c_a * t.powi(i as i32) * (-r).powi((n_a - i) as i32);
            // (r A + t B)^n_b: pick j factors of A
            for (j, &c_b) in BINOMIAL[n_b].iter().enumerate().take(n_b + 1) {
                let from_b = c_b * r.powi(j as i32) * t.powi((n_b - j) as i32);
                let out_a = i + j;
                let out_b = n_a + n_b - out_a;
                let idx = ket_index(out_a as u8, out_b as u8).expect("photon number is conserved");
                out[idx] += scale * from_a * from_b * (FACTORIAL[out_a] * FACTORIAL[out_b]).sqrt();
            }
        }
    }
    Ok(TwoModeState { amplitudes: out })
}

/// Result of one heralded projection attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeraldOutcome {
    /// `D_a` saw exactly one photon and `D_b` none.
    pub success: bool,
    /// Output ket `(n_a, n_b)` that was sampled.
    pub detail: (u8, u8),
}

/// Output state of the balanced beam splitter fed with `probe` in mode `a`
/// and `input` in mode `b`.
pub fn herald_output(input: &FockQubit, probe: &FockQubit) -> TwoModeState {
    beamsplitter_transform(&TwoModeState::product(probe, input), 0.5)
        .expect("R = 1/2 is a valid reflectivity")
}

/// Probability that the heralding pattern `|1, 0⟩` occurs.
pub fn herald_success_probability(input: &FockQubit, probe: &FockQubit) -> f64 {
    herald_output(input, probe).amplitude(HERALD_KET.0, HERALD_KET.1).norm_sqr()
}

/// Direction `B = (δ*, γ*)` that a probe `(γ, δ)` projects onto.
pub fn effective_direction(probe: &FockQubit) -> FockQubit {
    FockQubit::new(probe.beta().conj(), probe.alpha().conj())
        .expect("conjugate swap preserves the norm")
}

/// Probe `(γ, δ) = (B_β*, B_α*)` that heralds a projection onto `direction`.
pub fn probe_for(direction: &FockQubit) -> FockQubit {
    FockQubit::new(direction.beta().conj(), direction.alpha().conj())
        .expect("conjugate swap preserves the norm")
}

/// One heralded projection of `input` using `probe`.
pub fn linear_optics_project<R: Rng + ?Sized>(
    input: &FockQubit,
    probe: &FockQubit,
    rng: &mut R,
) -> HeraldOutcome {
    let detail = herald_output(input, probe).sample(rng);
    HeraldOutcome {
        success: detail == HERALD_KET,
        detail,
    }
}
