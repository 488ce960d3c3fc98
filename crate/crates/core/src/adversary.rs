//! Eavesdropper attack models and the analytic attack functionals.
//!
//! The attack functionals W_eve and W̃_eve evaluate the security parameters
//! against a separable preparation described by a distribution over angle
//! pairs (Φ_A, Φ_B). Both are affine in the distribution, so the integrand
//! values at point masses already bound every mixture. The integrands here
//! transcribe the closed forms directly; the `metrics` module reaches the
//! same numbers through the joint-probability dispatch, and the two paths
//! cross-check each other in the test suite.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_6};

use crate::model::{Angle, AttackDistribution};
use crate::numeric::KahanSum;

fn cos2(x: f64) -> f64 {
    let c = x.cos();
    c * c
}

fn sin2(x: f64) -> f64 {
    let s = x.sin();
    s * s
}

pub(crate) fn w_eve_at(phi_a: f64, phi_b: f64) -> f64 {
    let shifted_a = cos2(phi_a + FRAC_PI_6);
    let shifted_b = cos2(phi_b - FRAC_PI_6);
    shifted_a * cos2(phi_b) + cos2(phi_a) * shifted_b - shifted_a * shifted_b
}

pub(crate) fn wtilde_eve_at(phi_a: f64, phi_b: f64) -> f64 {
    w_eve_at(phi_a, phi_b) + sin2(phi_a) * sin2(phi_b)
}

pub(crate) fn intercept_resend_at(phi_a: f64) -> f64 {
    w_eve_at(phi_a, phi_a - FRAC_PI_2)
}

/// Wigner-parameter integrand at a single preparation (Φ_A, Φ_B):
/// cos²(Φ_A+π/6)cos²Φ_B + cos²Φ_A cos²(Φ_B−π/6) − cos²(Φ_A+π/6)cos²(Φ_B−π/6).
pub fn w_eve_integrand(phi_a: Angle, phi_b: Angle) -> f64 {
    w_eve_at(phi_a.radians(), phi_b.radians())
}

/// Modified-parameter integrand: the W integrand plus sin²Φ_A·sin²Φ_B.
pub fn wtilde_eve_integrand(phi_a: Angle, phi_b: Angle) -> f64 {
    wtilde_eve_at(phi_a.radians(), phi_b.radians())
}

/// Single-channel intercept-resend attack.
///
/// Eve measures Alice's photon in basis Φ_A and resends; anticorrelation
/// in her basis fixes the partner at Φ_B = Φ_A − π/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterceptResendAttack {
    phi_a: Angle,
}

impl InterceptResendAttack {
    pub fn new(phi_a: Angle) -> Self {
        InterceptResendAttack { phi_a }
    }

    pub fn phi_a(self) -> Angle {
        self.phi_a
    }

    /// The preparation pair this attack injects into the channel.
    pub fn induced_pair(self) -> (Angle, Angle) {
        // finite − π/2 stays finite
        let phi_b = Angle::new(self.phi_a.radians() - FRAC_PI_2).expect("finite angle");
        (self.phi_a, phi_b)
    }
}

/// Unrestricted product-state attack: Eve controls both channels and draws
/// preparations from an arbitrary distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralAttack {
    distribution: AttackDistribution,
}

impl GeneralAttack {
    pub fn new(distribution: AttackDistribution) -> Self {
        GeneralAttack { distribution }
    }

    pub fn distribution(&self) -> &AttackDistribution {
        &self.distribution
    }
}

impl From<AttackDistribution> for GeneralAttack {
    fn from(distribution: AttackDistribution) -> Self {
        GeneralAttack::new(distribution)
    }
}

fn integrate<F: Fn(f64, f64) -> f64>(attack: &GeneralAttack, integrand: F) -> f64 {
    // fixed atom order + compensated summation: reported values are
    // bit-reproducible for a given atom list
    let mut sum = KahanSum::default();
    for atom in attack.distribution().atoms() {
        sum.add(atom.weight * integrand(atom.phi_a.radians(), atom.phi_b.radians()));
    }
    sum.value()
}

/// W_eve: the Wigner parameter Alice and Bob will measure under `attack`.
pub fn w_eve(attack: &GeneralAttack) -> f64 {
    integrate(attack, w_eve_at)
}

/// W̃_eve: the modified parameter under `attack`; bounded below by ≈0.0443
/// over all product-state attacks.
pub fn wtilde_eve(attack: &GeneralAttack) -> f64 {
    integrate(attack, wtilde_eve_at)
}

/// W_eve for a single-channel intercept-resend attack; identically 1/16
/// regardless of Eve's basis.
pub fn intercept_resend_w_eve(attack: &InterceptResendAttack) -> f64 {
    intercept_resend_at(attack.phi_a.radians())
}
