//! Closed-form security functionals and verdicts.
//!
//! The Wigner parameter W combines three ++ coincidence probabilities at
//! the canonical settings; local-realistic sources give W ≥ 0 while the
//! singlet reaches −1/8. The modified parameter W̃ adds the matched-setting
//! −− probability, which restores the ≥ 0 bound for every separable source
//! without assuming perfect anticorrelation. W̃′ is the mirror image of W̃
//! over the reflected setting triple, and the QBER is the correlated-result
//! probability at the matched key settings.

use serde::Serialize;

use crate::model::{joint_prob, JointOutcome, SettingIndex, SourceModel};
use crate::protocol::ProtocolVariant;

fn p(source: &SourceModel, a: SettingIndex, b: SettingIndex, outcome: JointOutcome) -> f64 {
    joint_prob(source, a.angle(), b.angle(), outcome)
}

/// Wigner parameter W = p₁₂(++) + p₂₃(++) − p₁₃(++).
pub fn wigner_w(source: &SourceModel) -> f64 {
    use SettingIndex::{One, Three, Two};
    p(source, One, Two, JointOutcome::PP) + p(source, Two, Three, JointOutcome::PP)
        - p(source, One, Three, JointOutcome::PP)
}

/// Modified Wigner parameter W̃ = W + p₂₂(−−).
///
/// Non-negative for every separable source; still −1/8 for the singlet,
/// whose matched-setting −− probability vanishes.
pub fn modified_wigner(source: &SourceModel) -> f64 {
    use SettingIndex::Two;
    wigner_w(source) + p(source, Two, Two, JointOutcome::MM)
}

/// Mirrored modified parameter W̃′ = p₃₂(++) + p₂₁(++) + p₂₂(−−) − p₃₁(++).
///
/// The reflection α → −α of the setting triple behind W̃; together the two
/// consume all six off-diagonal cells of the nine-cell protocol.
pub fn mirrored_modified_wigner(source: &SourceModel) -> f64 {
    use SettingIndex::{One, Three, Two};
    p(source, Three, Two, JointOutcome::PP)
        + p(source, Two, One, JointOutcome::PP)
        + p(source, Two, Two, JointOutcome::MM)
        - p(source, Three, One, JointOutcome::PP)
}

/// Quantum bit error rate of the matched-setting key:
/// QBER = p₂₂(−−) + p₂₂(++).
pub fn qber(source: &SourceModel) -> f64 {
    use SettingIndex::Two;
    p(source, Two, Two, JointOutcome::MM) + p(source, Two, Two, JointOutcome::PP)
}

/// Key-acceptance test for the original four-setting protocol:
/// secure iff W < −QBER − margin.
///
/// The boundary W = −QBER resolves to insecure; `margin` widens the
/// rejection region to absorb estimator noise.
pub fn secure_original(w: f64, qber: f64, margin: f64) -> bool {
    w < -qber - margin
}

/// Closed-form security summary for one source.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecurityReport {
    pub w: f64,
    pub w_tilde: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_tilde_prime: Option<f64>,
    pub qber: f64,
    /// W < 0: the naive test reads "quantum", which an attack can fake.
    pub naive_wigner_violated: bool,
    /// W̃ < 0: unreachable by any separable source.
    pub modified_wigner_violated: bool,
    /// W < −QBER with zero margin.
    pub original_protocol_secure: bool,
}

/// Evaluate every functional and verdict for `source`.
///
/// `w_tilde_prime` is populated only for the nine-cell protocol, which is
/// the one that measures the mirrored triple.
pub fn security_report(source: &SourceModel, protocol: ProtocolVariant) -> SecurityReport {
    let w = wigner_w(source);
    let w_tilde = modified_wigner(source);
    let qber = self::qber(source);
    SecurityReport {
        w,
        w_tilde,
        w_tilde_prime: match protocol {
            ProtocolVariant::Original4 => None,
            ProtocolVariant::Extended9 => Some(mirrored_modified_wigner(source)),
        },
        qber,
        naive_wigner_violated: w < 0.0,
        modified_wigner_violated: w_tilde < 0.0,
        original_protocol_secure: secure_original(w, qber, 0.0),
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, PI};

    use approx::assert_abs_diff_eq;

    use super::*;
    use crate::model::{Angle, AttackDistribution};

    fn delta(phi_a: f64, phi_b: f64) -> SourceModel {
        SourceModel::ProductAttack(AttackDistribution::point(
            Angle::new(phi_a).unwrap(),
            Angle::new(phi_b).unwrap(),
        ))
    }

    #[test]
    fn singlet_reaches_minus_one_eighth() {
        let s = SourceModel::Singlet;
        assert_abs_diff_eq!(wigner_w(&s), -0.125, epsilon = 1e-15);
        assert_abs_diff_eq!(modified_wigner(&s), -0.125, epsilon = 1e-15);
        assert_abs_diff_eq!(mirrored_modified_wigner(&s), -0.125, epsilon = 1e-15);
        assert_eq!(qber(&s), 0.0);
    }

    #[test]
    fn counterexample_attack_beats_the_quantum_value() {
        let s = delta(0.6 * PI, 0.4 * PI);
        assert_abs_diff_eq!(wigner_w(&s), -0.19952269868546246, epsilon = 1e-13);
        assert_abs_diff_eq!(modified_wigner(&s), 0.6186129227988797, epsilon = 1e-13);
        assert_abs_diff_eq!(qber(&s), 0.8272542485937369, epsilon = 1e-13);
    }

    #[test]
    fn intercept_resend_point_values() {
        let s = delta(0.0, FRAC_PI_2);
        assert_abs_diff_eq!(wigner_w(&s), 0.0625, epsilon = 1e-15);
        // sin²(0)·sin²(π/2) adds nothing
        assert_abs_diff_eq!(modified_wigner(&s), 0.0625, epsilon = 1e-15);
    }

    #[test]
    fn aligned_product_state_values() {
        let s = delta(0.0, 0.0);
        assert_abs_diff_eq!(qber(&s), 1.0, epsilon = 1e-15);
        // 0.75·1 + 1·0.75 + 0 − 0.75·0.75
        assert_abs_diff_eq!(mirrored_modified_wigner(&s), 0.9375, epsilon = 1e-14);
    }

    #[test]
    fn security_boundary_is_strict() {
        assert!(secure_original(-0.125, 0.0, 0.0));
        assert!(!secure_original(-0.1995, 0.8273, 0.0));
        // boundary resolves insecure
        assert!(!secure_original(-0.0625, 0.0625, 0.0));
        // margin widens the rejection region
        assert!(!secure_original(-0.07, 0.0625, 0.01));
    }

    #[test]
    fn report_for_the_singlet_is_secure_everywhere() {
        let report = security_report(&SourceModel::Singlet, ProtocolVariant::Original4);
        assert_abs_diff_eq!(report.w, -0.125, epsilon = 1e-15);
        assert_abs_diff_eq!(report.w_tilde, -0.125, epsilon = 1e-15);
        assert_eq!(report.w_tilde_prime, None);
        assert_eq!(report.qber, 0.0);
        assert!(report.naive_wigner_violated);
        assert!(report.modified_wigner_violated);
        assert!(report.original_protocol_secure);

        let extended = security_report(&SourceModel::Singlet, ProtocolVariant::Extended9);
        let prime = extended.w_tilde_prime.unwrap();
        assert_abs_diff_eq!(prime, -0.125, epsilon = 1e-15);
    }

    #[test]
    fn report_flags_the_counterexample_as_insecure() {
        let report = security_report(&delta(0.6 * PI, 0.4 * PI), ProtocolVariant::Original4);
        assert!(report.naive_wigner_violated);
        assert!(!report.modified_wigner_violated);
        assert!(!report.original_protocol_secure);
    }

    #[test]
    fn report_for_the_intercept_resend_point() {
        let report = security_report(&delta(0.0, FRAC_PI_2), ProtocolVariant::Original4);
        assert_abs_diff_eq!(report.w, 0.0625, epsilon = 1e-15);
        assert!(!report.modified_wigner_violated);
    }
}
