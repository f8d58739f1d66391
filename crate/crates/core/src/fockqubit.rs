//! States of a single optical mode restricted to the vacuum |0⟩ and the
//! single-photon state |1⟩.
//!
//! A [`FockQubit`] is always normalized. Physical states are rays, so two
//! values that differ by a global phase describe the same state; use
//! [`FockQubit::same_ray`] for that comparison and [`FockQubit::approx_eq`]
//! when the amplitudes themselves must agree.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use num_complex::Complex64;

use crate::error::{QkdError, Result};

/// Tolerance on |α|² + |β|² − 1 accepted at construction.
pub const NORM_TOL: f64 = 1e-9;
/// Tolerance for exact algebraic identities (orthogonality, formula agreement).
pub const IDENTITY_TOL: f64 = 1e-12;

/// Normalized state α|0⟩ + β|1⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockQubit {
    alpha: Complex64,
    beta: Complex64,
}

impl FockQubit {
    /// Builds a state from its amplitudes, rejecting anything not normalized
    /// within [`NORM_TOL`].
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        for (what, v) in [
            ("alpha.re", alpha.re),
            ("alpha.im", alpha.im),
            ("beta.re", beta.re),
            ("beta.im", beta.im),
        ] {
            if !v.is_finite() {
                return Err(QkdError::NonFinite { what, value: v });
            }
        }
        let norm_sqr = alpha.norm_sqr() + beta.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(QkdError::NotNormalized { norm_sqr });
        }
        Ok(Self { alpha, beta })
    }

    /// Real-amplitude shorthand for [`FockQubit::new`].
    pub fn from_real(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(Complex64::new(alpha, 0.0), Complex64::new(beta, 0.0))
    }

    /// Rescales arbitrary nonzero amplitudes onto the unit sphere.
    pub fn normalized(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(QkdError::NotNormalized {
                norm_sqr: norm * norm,
            });
        }
        Self::new(alpha / norm, beta / norm)
    }

    pub const fn vacuum() -> Self {
        Self {
            alpha: Complex64::new(1.0, 0.0),
            beta: Complex64::new(0.0, 0.0),
        }
    }

    pub const fn photon() -> Self {
        Self {
            alpha: Complex64::new(0.0, 0.0),
            beta: Complex64::new(1.0, 0.0),
        }
    }

    /// `(cos θ, e^{iψ} sin θ)`, evaluated from the angles as given.
    pub fn from_bloch(angles: BlochAngles) -> Result<Self> {
        let BlochAngles { theta, psi } = angles;
        if !theta.is_finite() {
            return Err(QkdError::NonFinite {
                what: "theta",
                value: theta,
            });
        }
        if !psi.is_finite() {
            return Err(QkdError::NonFinite {
                what: "psi",
                value: psi,
            });
        }
        let (s, c) = theta.sin_cos();
        Ok(Self {
            alpha: Complex64::new(c, 0.0),
            beta: Complex64::from_polar(1.0, psi) * s,
        })
    }

    /// Angles in the canonical chart: θ = atan2(|β|, |α|), ψ = arg β − arg α.
    pub fn to_bloch(&self) -> BlochAngles {
        let theta = self.beta.norm().atan2(self.alpha.norm());
        let psi = if self.alpha.norm() == 0.0 || self.beta.norm() == 0.0 {
            0.0
        } else {
            self.beta.arg() - self.alpha.arg()
        };
        BlochAngles {
            theta,
            psi: wrap_phase(psi),
        }
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// Probability of finding one photon, |β|².
    pub fn photon_probability(&self) -> f64 {
        self.beta.norm_sqr()
    }

    /// ⟨self|other⟩ = α_self* α_other + β_self* β_other.
    pub fn overlap(&self, other: &FockQubit) -> Complex64 {
        self.alpha.conj() * other.alpha + self.beta.conj() * other.beta
    }

    /// The state β*|0⟩ − α*|1⟩, orthogonal to `self`.
    pub fn orthogonal_complement(&self) -> FockQubit {
        FockQubit {
            alpha: self.beta.conj(),
            beta: -self.alpha.conj(),
        }
    }

    /// Equality up to global phase: |⟨self|other⟩| = 1 within [`NORM_TOL`].
    pub fn same_ray(&self, other: &FockQubit) -> bool {
        (self.overlap(other).norm() - 1.0).abs() <= NORM_TOL
    }

    /// Amplitude-wise equality within `tol`.
    pub fn approx_eq(&self, other: &FockQubit, tol: f64) -> bool {
        (self.alpha - other.alpha).norm() <= tol && (self.beta - other.beta).norm() <= tol
    }
}

impl fmt::Display for FockQubit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})|0> + ({})|1>", self.alpha, self.beta)
    }
}

/// Bloch parametrization `(cos θ, e^{iψ} sin θ)` of a Fock qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochAngles {
    pub theta: f64,
    pub psi: f64,
}

impl BlochAngles {
    pub const fn new(theta: f64, psi: f64) -> Self {
        Self { theta, psi }
    }

    /// Maps the angles onto θ ∈ [0, π/2], ψ ∈ [0, 2π) describing the same ray.
    /// A negative sin θ is absorbed into the phase as ψ + π.
    pub fn canonical(&self) -> Self {
        // θ and θ + π differ only by a global sign.
        let mut theta = self.theta.rem_euclid(PI);
        let mut psi = self.psi;
        if theta > FRAC_PI_2 {
            // (cos θ, e^{iψ} sin θ) = −(cos(π − θ), e^{i(ψ+π)} sin(π − θ))
            theta = PI - theta;
            psi += PI;
        }
        Self {
            theta,
            psi: wrap_phase(psi),
        }
    }
}

fn wrap_phase(psi: f64) -> f64 {
    let w = psi.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Weighted mixture of pure states, Σ w_i |s_i⟩⟨s_i|.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    entries: Vec<(f64, FockQubit)>,
}

impl Ensemble {
    pub fn new(entries: Vec<(f64, FockQubit)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(QkdError::InvalidEnsemble("no entries".into()));
        }
        if let Some((w, _)) = entries.iter().find(|(w, _)| !w.is_finite() || *w < 0.0) {
            return Err(QkdError::InvalidEnsemble(format!(
                "weight {w} is negative or non-finite"
            )));
        }
        let total: f64 = entries.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(QkdError::InvalidEnsemble(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(Self { entries })
    }

    /// Uniform mixture of the given states.
    pub fn uniform(states: &[FockQubit]) -> Result<Self> {
        let w = 1.0 / states.len() as f64;
        Self::new(states.iter().map(|s| (w, *s)).collect())
    }

    pub fn entries(&self) -> &[(f64, FockQubit)] {
        &self.entries
    }

    /// Tr(ρ n̂) = Σ w_i |β_i|².
    pub fn mean_photon_number(&self) -> f64 {
        self.entries
            .iter()
            .map(|(w, s)| w * s.photon_probability())
            .sum::<f64>()
            .clamp(0.0, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const SQRT3_2: f64 = 0.866_025_403_784_438_6;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn bloch_poles_and_pi_over_six() {
        let vac = FockQubit::from_bloch(BlochAngles::new(0.0, 1.234)).unwrap();
        assert!(vac.approx_eq(&FockQubit::vacuum(), 0.0));

        let one = FockQubit::from_bloch(BlochAngles::new(FRAC_PI_2, 0.0)).unwrap();
        assert!(one.approx_eq(&FockQubit::photon(), 1e-16));

        // cos(π/6) = √3/2, sin(π/6) = 1/2
        let s = FockQubit::from_bloch(BlochAngles::new(PI / 6.0, 0.0)).unwrap();
        assert_abs_diff_eq!(s.alpha().re, SQRT3_2, epsilon = 1e-15);
        assert_abs_diff_eq!(s.beta().re, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn non_finite_angles_rejected() {
        assert!(matches!(
            FockQubit::from_bloch(BlochAngles::new(f64::NAN, 0.0)),
            Err(QkdError::NonFinite { what: "theta", .. })
        ));
        assert!(FockQubit::from_bloch(BlochAngles::new(0.1, f64::INFINITY)).is_err());
    }

    #[test]
    fn construction_enforces_normalization() {
        assert!(FockQubit::from_real(1.0, 1.0).is_err());
        assert!(FockQubit::from_real(0.6, 0.8).is_ok());
        assert!(FockQubit::from_real(1.0 + 1e-8, 0.0).is_err());
        let s = FockQubit::normalized(c(3.0), c(4.0)).unwrap();
        assert_abs_diff_eq!(s.alpha().re, 0.6, epsilon = 1e-15);
        assert!(FockQubit::normalized(c(0.0), c(0.0)).is_err());
    }

    #[test]
    fn overlap_examples() {
        let s = FockQubit::from_real(SQRT3_2, 0.5).unwrap();
        assert_abs_diff_eq!(s.overlap(&s).re, 1.0, epsilon = 1e-15);
        assert_eq!(
            FockQubit::vacuum().overlap(&FockQubit::photon()),
            Complex64::new(0.0, 0.0)
        );
        // θ = −π/6 canonicalizes to θ = π/6, ψ = π, i.e. (√3/2, −1/2)
        let neg = FockQubit::from_bloch(BlochAngles::new(-PI / 6.0, 0.0).canonical()).unwrap();
        assert_abs_diff_eq!(neg.beta().re, -0.5, epsilon = 1e-15);
        let ov = s.overlap(&neg);
        assert_abs_diff_eq!(ov.re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(ov.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn complement_examples() {
        let comp = FockQubit::vacuum().orthogonal_complement();
        assert!(comp.same_ray(&FockQubit::photon()));
        assert!(comp.approx_eq(&FockQubit::from_real(0.0, -1.0).unwrap(), 0.0));

        let s = FockQubit::from_real(SQRT3_2, 0.5).unwrap();
        let comp = s.orthogonal_complement();
        assert!(comp.approx_eq(&FockQubit::from_real(0.5, -SQRT3_2).unwrap(), 1e-15));
        assert!(s.overlap(&comp).norm() <= IDENTITY_TOL);

        let twice = comp.orthogonal_complement();
        assert!(twice.same_ray(&s));
    }

    #[test]
    fn canonical_chart() {
        let a = BlochAngles::new(-PI / 6.0, 0.0).canonical();
        assert_abs_diff_eq!(a.theta, PI / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a.psi, PI, epsilon = 1e-15);

        let b = BlochAngles::new(2.0 * PI / 3.0, 0.25).canonical();
        assert!((0.0..=FRAC_PI_2).contains(&b.theta));
        let raw = FockQubit::from_bloch(BlochAngles::new(2.0 * PI / 3.0, 0.25)).unwrap();
        let canon = FockQubit::from_bloch(b).unwrap();
        assert!(raw.same_ray(&canon));

        assert_eq!(BlochAngles::new(0.3, -1e-300).canonical().psi, 0.0);
    }

    #[test]
    fn mean_photon_number_examples() {
        let vac = Ensemble::uniform(&[FockQubit::vacuum()]).unwrap();
        assert_eq!(vac.mean_photon_number(), 0.0);
        let one = Ensemble::uniform(&[FockQubit::photon()]).unwrap();
        assert_eq!(one.mean_photon_number(), 1.0);
        let mix = Ensemble::uniform(&[
            FockQubit::from_real(SQRT3_2, 0.5).unwrap(),
            FockQubit::from_real(SQRT3_2, -0.5).unwrap(),
        ])
        .unwrap();
        assert_abs_diff_eq!(mix.mean_photon_number(), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn ensemble_validation() {
        let s = FockQubit::photon();
        assert!(Ensemble::new(vec![]).is_err());
        assert!(Ensemble::new(vec![(0.5, s)]).is_err());
        assert!(Ensemble::new(vec![(1.5, s), (-0.5, s)]).is_err());
        assert!(Ensemble::new(vec![(0.25, s), (0.75, FockQubit::vacuum())]).is_ok());
    }

    prop_compose! {
        fn any_state()(t in 0.0..PI, p in 0.0..TAU, g in 0.0..TAU) -> FockQubit {
            // random ray with a random global phase
            let phase = Complex64::from_polar(1.0, g);
            FockQubit::new(phase * t.cos(), phase * Complex64::from_polar(t.sin(), p)).unwrap()
        }
    }

    proptest! {
        #[test]
        fn operations_preserve_normalization(s in any_state()) {
            let comp = s.orthogonal_complement();
            let n = comp.alpha().norm_sqr() + comp.beta().norm_sqr();
            prop_assert!((n - 1.0).abs() <= NORM_TOL);
            let b = FockQubit::from_bloch(s.to_bloch()).unwrap();
            let n = b.alpha().norm_sqr() + b.beta().norm_sqr();
            prop_assert!((n - 1.0).abs() <= NORM_TOL);
        }

        #[test]
        fn cauchy_schwarz(a in any_state(), b in any_state()) {
            prop_assert!(a.overlap(&b).norm() <= 1.0 + IDENTITY_TOL);
        }

        #[test]
        fn complement_is_orthogonal(s in any_state()) {
            prop_assert!(s.orthogonal_complement().overlap(&s).norm() <= IDENTITY_TOL);
        }

        #[test]
        fn bloch_round_trip(theta in 1e-6..(FRAC_PI_2 - 1e-6), psi in 0.0..TAU) {
            let s = FockQubit::from_bloch(BlochAngles::new(theta, psi)).unwrap();
            let back = s.to_bloch();
            prop_assert!((back.theta - theta).abs() <= 1e-9);
            let dpsi = (back.psi - psi).rem_euclid(TAU);
            prop_assert!(dpsi.min(TAU - dpsi) <= 1e-9);
        }

        #[test]
        fn mixture_photon_number_matches_bloch_form(
            t0 in -PI..PI, t1 in -PI..PI, p0 in 0.0..TAU, p1 in 0.0..TAU,
        ) {
            let s0 = FockQubit::from_bloch(BlochAngles::new(t0, p0)).unwrap();
            let s1 = FockQubit::from_bloch(BlochAngles::new(t1, p1)).unwrap();
            let e = Ensemble::uniform(&[s0, s1]).unwrap();
            let bloch = (t0.sin().powi(2) + t1.sin().powi(2)) / 2.0;
            prop_assert!((e.mean_photon_number() - bloch).abs() <= IDENTITY_TOL);
        }
    }
}
