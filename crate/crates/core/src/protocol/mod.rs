//! Seeded Monte Carlo sessions of the entanglement QKD protocol.
//!
//! A session draws per-round analyzer settings and joint outcomes from the
//! closed-form source distribution, then sifts: matched-setting rounds
//! become key bits except for a seeded, deterministic subset of the
//! central (2,2) rounds that is disclosed for estimation; every
//! off-diagonal round feeds the empirical security parameters. All
//! randomness is counter-based on (seed, round), so identical
//! configurations reproduce identical sessions regardless of how the work
//! is partitioned across workers.

mod rng;

pub use rng::{RoundRng, Stream};

use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::metrics::secure_original;
use crate::model::{
    joint_prob, Detector, JointOutcome, Party, SettingId, SettingIndex, SourceModel,
};
use crate::numeric::KahanSum;

/// Which analyzer menus the parties draw from.
///
/// `Original4` is the four-cell protocol: Alice chooses among slots {1, 2},
/// Bob among {2, 3}, and (2,2) is the only key cell. `Extended9` gives both
/// parties all three slots; the three diagonal cells produce key bits and
/// the six off-diagonal cells feed the two test parameters, so no round is
/// ever discarded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolVariant {
    Original4,
    Extended9,
}

impl ProtocolVariant {
    pub fn alice_settings(self) -> &'static [SettingIndex] {
        match self {
            ProtocolVariant::Original4 => &[SettingIndex::One, SettingIndex::Two],
            ProtocolVariant::Extended9 => &SettingIndex::ALL,
        }
    }

    pub fn bob_settings(self) -> &'static [SettingIndex] {
        match self {
            ProtocolVariant::Original4 => &[SettingIndex::Two, SettingIndex::Three],
            ProtocolVariant::Extended9 => &SettingIndex::ALL,
        }
    }
}

/// Per-party sampling weights over the variant's setting menu, in menu
/// order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingProbabilities {
    alice: Vec<f64>,
    bob: Vec<f64>,
}

impl SettingProbabilities {
    pub fn uniform(variant: ProtocolVariant) -> Self {
        let even = |n: usize| vec![1.0 / n as f64; n];
        SettingProbabilities {
            alice: even(variant.alice_settings().len()),
            bob: even(variant.bob_settings().len()),
        }
    }

    pub fn new(variant: ProtocolVariant, alice: Vec<f64>, bob: Vec<f64>) -> Result<Self> {
        let probabilities = SettingProbabilities { alice, bob };
        probabilities.validate(variant)?;
        Ok(probabilities)
    }

    pub fn alice(&self) -> &[f64] {
        &self.alice
    }

    pub fn bob(&self) -> &[f64] {
        &self.bob
    }

    fn validate(&self, variant: ProtocolVariant) -> Result<()> {
        validate_party_probabilities(Party::Alice, &self.alice, variant.alice_settings().len())?;
        validate_party_probabilities(Party::Bob, &self.bob, variant.bob_settings().len())
    }
}

fn validate_party_probabilities(party: Party, probs: &[f64], expected: usize) -> Result<()> {
    if probs.len() != expected {
        return Err(Error::SettingProbabilities {
            party,
            reason: format!("expected {expected} entries, got {}", probs.len()),
        });
    }
    let mut total = KahanSum::default();
    for &p in probs {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::SettingProbabilities {
                party,
                reason: format!("probability {p} is not in [0, 1]"),
            });
        }
        total.add(p);
    }
    let sum = total.value();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::SettingProbabilities {
            party,
            reason: format!("probabilities sum to {sum}, expected 1"),
        });
    }
    Ok(())
}

/// Full description of one session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub variant: ProtocolVariant,
    pub n_pairs: u64,
    pub seed: u64,
    /// Fraction of matched (2,2) rounds disclosed for the QBER and the
    /// matched −− probability behind W̃ and W̃′. Selection is a seeded
    /// per-round marking, so disclosed rounds are unpredictable within the
    /// model and the rate holds in expectation.
    pub sacrifice_fraction: f64,
    pub setting_probabilities: SettingProbabilities,
}

impl ProtocolConfig {
    /// Uniform setting choices, nothing sacrificed.
    pub fn new(variant: ProtocolVariant, n_pairs: u64, seed: u64) -> Self {
        ProtocolConfig {
            variant,
            n_pairs,
            seed,
            sacrifice_fraction: 0.0,
            setting_probabilities: SettingProbabilities::uniform(variant),
        }
    }

    pub fn with_sacrifice_fraction(mut self, fraction: f64) -> Self {
        self.sacrifice_fraction = fraction;
        self
    }

    pub fn with_setting_probabilities(mut self, probabilities: SettingProbabilities) -> Self {
        self.setting_probabilities = probabilities;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_pairs == 0 {
            return Err(Error::EmptySession);
        }
        if !self.sacrifice_fraction.is_finite() || !(0.0..=1.0).contains(&self.sacrifice_fraction) {
            return Err(Error::SacrificeFraction(self.sacrifice_fraction));
        }
        self.setting_probabilities.validate(self.variant)
    }
}

/// One simulated photon pair: both analyzer choices and the joint outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundRecord {
    pub round: u64,
    pub a_setting: SettingId,
    pub b_setting: SettingId,
    pub outcome: JointOutcome,
}

/// Draw one joint outcome from the source's closed-form distribution.
///
/// Consumes only the `Outcome` stream of `rng`; identical (seed, round)
/// pairs yield identical outcomes.
pub fn sample_round(
    source: &SourceModel,
    a_setting: SettingId,
    b_setting: SettingId,
    rng: RoundRng,
) -> JointOutcome {
    let u = rng.uniform(Stream::Outcome);
    let mut cumulative = 0.0;
    for outcome in JointOutcome::ALL {
        cumulative += joint_prob(source, a_setting.angle(), b_setting.angle(), outcome);
        if u < cumulative {
            return outcome;
        }
    }
    // the cumulative sum can fall a few ulp short of 1
    JointOutcome::MM
}

fn pick_setting(party: Party, menu: &[SettingIndex], probabilities: &[f64], u: f64) -> SettingId {
    let mut cumulative = 0.0;
    for (&index, &p) in menu.iter().zip(probabilities) {
        cumulative += p;
        if u < cumulative {
            return SettingId::new(party, index);
        }
    }
    SettingId::new(party, *menu.last().expect("menus are non-empty"))
}

/// Simulate a full session: per-round independent setting choices for both
/// parties, then the joint outcome.
///
/// Rounds are generated in parallel partitions; every draw is counter-based
/// on (seed, round), so the record list is identical for any worker count.
pub fn run_session(config: &ProtocolConfig, source: &SourceModel) -> Result<Vec<RoundRecord>> {
    config.validate()?;
    let variant = config.variant;
    let probabilities = &config.setting_probabilities;
    let records = (0..config.n_pairs)
        .into_par_iter()
        .map(|round| {
            let rng = RoundRng::new(config.seed, round);
            let a_setting = pick_setting(
                Party::Alice,
                variant.alice_settings(),
                probabilities.alice(),
                rng.uniform(Stream::AliceSetting),
            );
            let b_setting = pick_setting(
                Party::Bob,
                variant.bob_settings(),
                probabilities.bob(),
                rng.uniform(Stream::BobSetting),
            );
            let outcome = sample_round(source, a_setting, b_setting, rng);
            RoundRecord {
                round,
                a_setting,
                b_setting,
                outcome,
            }
        })
        .collect();
    Ok(records)
}

/// Empirical cell-conditional probability with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    /// Rounds that fed this estimate.
    pub count: u64,
}

impl Estimate {
    fn from_counts(hits: u64, total: u64) -> Option<Self> {
        if total == 0 {
            return None;
        }
        let p = hits as f64 / total as f64;
        Some(Estimate {
            value: p,
            std_error: (p * (1.0 - p) / total as f64).sqrt(),
            count: total,
        })
    }
}

/// Frequency of `outcome` among the records measured at the given setting
/// pair; `None` when that cell is empty.
pub fn estimate_probability(
    records: &[RoundRecord],
    a_setting: SettingId,
    b_setting: SettingId,
    outcome: JointOutcome,
) -> Option<Estimate> {
    let mut hits = 0u64;
    let mut total = 0u64;
    for record in records {
        if record.a_setting == a_setting && record.b_setting == b_setting {
            total += 1;
            if record.outcome == outcome {
                hits += 1;
            }
        }
    }
    Estimate::from_counts(hits, total)
}

/// Classical-channel message emitted during sifting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SiftMessageKind {
    SettingAnnounce,
    DisclosureRequest,
    Disclosure,
}

/// One transcript line. `payload` carries a setting label ("A2") for
/// announcements, a party-tagged outcome ("B-") for disclosures, and stays
/// empty for disclosure requests.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SiftMessage {
    pub kind: SiftMessageKind,
    pub round: u64,
    pub payload: String,
}

fn serialize_bits<S: Serializer>(
    bits: &[bool],
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    let text: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
    serializer.serialize_str(&text)
}

/// Everything the sifting phase produces: the two keys, the empirical
/// security parameters with standard errors, verdicts from the point
/// estimates, and the round accounting.
///
/// Estimators whose cells received no rounds are `None` and the verdicts
/// that depend on them are withheld.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SiftingResult {
    pub n_pairs: u64,
    pub key_rounds: u64,
    pub disclosed_rounds: u64,
    pub test_rounds: u64,
    /// Key bits per exchanged pair.
    pub key_fraction: f64,
    /// Fraction of rounds contributing to the key or to at least one
    /// available estimator.
    pub utilization: f64,
    #[serde(serialize_with = "serialize_bits")]
    pub alice_key: Vec<bool>,
    #[serde(serialize_with = "serialize_bits")]
    pub bob_key: Vec<bool>,
    pub est_w: Option<Estimate>,
    pub est_w_tilde: Option<Estimate>,
    pub est_w_tilde_prime: Option<Estimate>,
    pub est_qber: Option<Estimate>,
    pub naive_wigner_violated: Option<bool>,
    pub modified_wigner_violated: Option<bool>,
    pub original_protocol_secure: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RoundClass {
    Key,
    Disclosed,
    Test,
}

fn classify(config: &ProtocolConfig, record: &RoundRecord) -> RoundClass {
    let (a, b) = (record.a_setting.index(), record.b_setting.index());
    if a != b {
        return RoundClass::Test;
    }
    if a == SettingIndex::Two {
        let u = RoundRng::new(config.seed, record.round).uniform(Stream::Sacrifice);
        if u < config.sacrifice_fraction {
            return RoundClass::Disclosed;
        }
    }
    RoundClass::Key
}

#[derive(Debug, Clone, Copy, Default)]
struct CellCounts {
    outcomes: [u64; 4],
    total: u64,
}

impl CellCounts {
    fn add(&mut self, outcome: JointOutcome) {
        self.outcomes[outcome_slot(outcome)] += 1;
        self.total += 1;
    }

    fn estimate(&self, outcome: JointOutcome) -> Option<Estimate> {
        Estimate::from_counts(self.outcomes[outcome_slot(outcome)], self.total)
    }
}

fn outcome_slot(outcome: JointOutcome) -> usize {
    match (outcome.a, outcome.b) {
        (Detector::Plus, Detector::Plus) => 0,
        (Detector::Plus, Detector::Minus) => 1,
        (Detector::Minus, Detector::Plus) => 2,
        (Detector::Minus, Detector::Minus) => 3,
    }
}

fn slot(index: SettingIndex) -> usize {
    index.as_u8() as usize - 1
}

/// Signed combination of independent estimates: the value adds with signs,
/// the standard errors add in quadrature, the counts add.
fn combine(parts: &[(f64, &Estimate)]) -> Estimate {
    let mut value = 0.0;
    let mut variance = 0.0;
    let mut count = 0;
    for (sign, part) in parts {
        value += sign * part.value;
        variance += part.std_error * part.std_error;
        count += part.count;
    }
    Estimate {
        value,
        std_error: variance.sqrt(),
        count,
    }
}

/// Sift a session: extract the keys, estimate the security parameters, and
/// account for every round.
pub fn sift(records: &[RoundRecord], config: &ProtocolConfig) -> Result<SiftingResult> {
    Ok(sift_impl(records, config, false)?.0)
}

/// Like [`sift`], additionally producing the classical-channel transcript:
/// two setting announcements per round, then a disclosure request and both
/// parties' outcome disclosures for every non-key round. Key rounds never
/// disclose outcomes.
pub fn sift_with_transcript(
    records: &[RoundRecord],
    config: &ProtocolConfig,
) -> Result<(SiftingResult, Vec<SiftMessage>)> {
    let (result, transcript) = sift_impl(records, config, true)?;
    Ok((result, transcript.expect("transcript was requested")))
}

fn sift_impl(
    records: &[RoundRecord],
    config: &ProtocolConfig,
    want_transcript: bool,
) -> Result<(SiftingResult, Option<Vec<SiftMessage>>)> {
    config.validate()?;
    if records.len() as u64 != config.n_pairs {
        return Err(Error::SessionMismatch {
            expected: config.n_pairs,
            got: records.len() as u64,
        });
    }

    let mut cells = [[CellCounts::default(); 3]; 3];
    let mut disclosed = CellCounts::default();
    let mut alice_key = Vec::new();
    let mut bob_key = Vec::new();
    let mut key_rounds = 0u64;
    let mut disclosed_rounds = 0u64;
    let mut test_rounds = 0u64;

    for record in records {
        cells[slot(record.a_setting.index())][slot(record.b_setting.index())].add(record.outcome);
        match classify(config, record) {
            RoundClass::Key => {
                alice_key.push(record.outcome.a == Detector::Plus);
                bob_key.push(record.outcome.b == Detector::Minus);
                key_rounds += 1;
            }
            RoundClass::Disclosed => {
                disclosed.add(record.outcome);
                disclosed_rounds += 1;
            }
            RoundClass::Test => test_rounds += 1,
        }
    }

    use SettingIndex::{One, Three, Two};
    let cell = |a: SettingIndex, b: SettingIndex| &cells[slot(a)][slot(b)];

    let p12 = cell(One, Two).estimate(JointOutcome::PP);
    let p23 = cell(Two, Three).estimate(JointOutcome::PP);
    let p13 = cell(One, Three).estimate(JointOutcome::PP);
    let est_w = match (&p12, &p23, &p13) {
        (Some(p12), Some(p23), Some(p13)) => Some(combine(&[(1.0, p12), (1.0, p23), (-1.0, p13)])),
        _ => None,
    };

    let mm22 = disclosed.estimate(JointOutcome::MM);
    let est_qber = Estimate::from_counts(
        disclosed.outcomes[outcome_slot(JointOutcome::PP)]
            + disclosed.outcomes[outcome_slot(JointOutcome::MM)],
        disclosed.total,
    );

    let est_w_tilde = match (&est_w, &mm22) {
        (Some(w), Some(mm)) => Some(combine(&[(1.0, w), (1.0, mm)])),
        _ => None,
    };

    let p32 = cell(Three, Two).estimate(JointOutcome::PP);
    let p21 = cell(Two, One).estimate(JointOutcome::PP);
    let p31 = cell(Three, One).estimate(JointOutcome::PP);
    let est_w_tilde_prime = match (&p32, &p21, &p31, &mm22) {
        (Some(p32), Some(p21), Some(p31), Some(mm)) => {
            Some(combine(&[(1.0, p32), (1.0, p21), (1.0, mm), (-1.0, p31)]))
        }
        _ => None,
    };

    // A round contributes when it yields a key bit or feeds an estimator
    // that could actually be formed.
    let w_cell_rounds = cell(One, Two).total + cell(Two, Three).total + cell(One, Three).total;
    let prime_cell_rounds = cell(Three, Two).total + cell(Two, One).total + cell(Three, One).total;
    let mut contributing = key_rounds + disclosed_rounds;
    if est_w.is_some() {
        contributing += w_cell_rounds;
    }
    if est_w_tilde_prime.is_some() {
        contributing += prime_cell_rounds;
    }

    let n_pairs = config.n_pairs;
    let result = SiftingResult {
        n_pairs,
        key_rounds,
        disclosed_rounds,
        test_rounds,
        key_fraction: key_rounds as f64 / n_pairs as f64,
        utilization: contributing as f64 / n_pairs as f64,
        alice_key,
        bob_key,
        naive_wigner_violated: est_w.as_ref().map(|w| w.value < 0.0),
        modified_wigner_violated: est_w_tilde.as_ref().map(|w| w.value < 0.0),
        original_protocol_secure: match (&est_w, &est_qber) {
            (Some(w), Some(q)) => Some(secure_original(w.value, q.value, 0.0)),
            _ => None,
        },
        est_w,
        est_w_tilde,
        est_w_tilde_prime,
        est_qber,
    };

    let transcript = want_transcript.then(|| build_transcript(records, config));
    Ok((result, transcript))
}

fn build_transcript(records: &[RoundRecord], config: &ProtocolConfig) -> Vec<SiftMessage> {
    let mut messages = Vec::with_capacity(records.len() * 2);
    for record in records {
        messages.push(SiftMessage {
            kind: SiftMessageKind::SettingAnnounce,
            round: record.round,
            payload: record.a_setting.to_string(),
        });
        messages.push(SiftMessage {
            kind: SiftMessageKind::SettingAnnounce,
            round: record.round,
            payload: record.b_setting.to_string(),
        });
    }
    for record in records {
        if classify(config, record) == RoundClass::Key {
            continue;
        }
        messages.push(SiftMessage {
            kind: SiftMessageKind::DisclosureRequest,
            round: record.round,
            payload: String::new(),
        });
        let sign = |d: Detector| if d == Detector::Plus { '+' } else { '-' };
        messages.push(SiftMessage {
            kind: SiftMessageKind::Disclosure,
            round: record.round,
            payload: format!("A{}", sign(record.outcome.a)),
        });
        messages.push(SiftMessage {
            kind: SiftMessageKind::Disclosure,
            round: record.round,
            payload: format!("B{}", sign(record.outcome.b)),
        });
    }
    messages
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;
    use std::f64::consts::PI;

    use approx::assert_abs_diff_eq;

    use super::*;
    use crate::model::{Angle, AttackDistribution};

    fn singlet_config(variant: ProtocolVariant, n: u64) -> ProtocolConfig {
        ProtocolConfig::new(variant, n, 42)
    }

    fn delta_source(phi_a: f64, phi_b: f64) -> SourceModel {
        SourceModel::ProductAttack(AttackDistribution::point(
            Angle::new(phi_a).unwrap(),
            Angle::new(phi_b).unwrap(),
        ))
    }

    #[test]
    fn config_validation_rejects_bad_inputs() {
        let config = singlet_config(ProtocolVariant::Original4, 0);
        assert_eq!(config.validate().unwrap_err(), Error::EmptySession);

        let config = singlet_config(ProtocolVariant::Original4, 10).with_sacrifice_fraction(1.5);
        assert!(matches!(
            config.validate().unwrap_err(),
            Error::SacrificeFraction(_)
        ));

        assert!(SettingProbabilities::new(
            ProtocolVariant::Extended9,
            vec![0.5, 0.5],
            vec![0.4, 0.3, 0.3]
        )
        .is_err());
        assert!(SettingProbabilities::new(
            ProtocolVariant::Extended9,
            vec![0.2, 0.3, 0.5],
            vec![0.4, 0.3, 0.3]
        )
        .is_ok());
    }

    #[test]
    fn degenerate_source_always_fires_plus_plus() {
        let source = delta_source(0.0, 0.0);
        let a = SettingId::new(Party::Alice, SettingIndex::Two);
        let b = SettingId::new(Party::Bob, SettingIndex::Two);
        for round in 0..200 {
            let outcome = sample_round(&source, a, b, RoundRng::new(9, round));
            assert_eq!(outcome, JointOutcome::PP);
        }
    }

    #[test]
    fn singlet_matched_outcomes_follow_the_closed_form() {
        let source = SourceModel::Singlet;
        let a = SettingId::new(Party::Alice, SettingIndex::Two);
        let b = SettingId::new(Party::Bob, SettingIndex::Two);
        let n = 100_000u64;
        let hits = (0..n)
            .filter(|&round| {
                sample_round(&source, a, b, RoundRng::new(7, round)) == JointOutcome::PM
            })
            .count();
        let p_hat = hits as f64 / n as f64;
        // binomial 5σ band around 1/2
        assert!((p_hat - 0.5).abs() < 5.0 * (0.25f64 / n as f64).sqrt());
    }

    #[test]
    fn sessions_are_deterministic() {
        let config = singlet_config(ProtocolVariant::Extended9, 5_000).with_sacrifice_fraction(0.3);
        let first = run_session(&config, &SourceModel::Singlet).unwrap();
        let second = run_session(&config, &SourceModel::Singlet).unwrap();
        assert_eq!(first, second);

        let sift_a = sift(&first, &config).unwrap();
        let sift_b = sift(&second, &config).unwrap();
        assert_eq!(sift_a, sift_b);
    }

    #[test]
    fn setting_cells_fill_like_a_multinomial() {
        let n = 90_000u64;
        let config = singlet_config(ProtocolVariant::Extended9, n);
        let records = run_session(&config, &SourceModel::Singlet).unwrap();
        let mut counts = [[0u64; 3]; 3];
        for record in &records {
            counts[slot(record.a_setting.index())][slot(record.b_setting.index())] += 1;
        }
        // 5σ multinomial band around n/9
        let sigma = (n as f64 * (1.0 / 9.0) * (8.0 / 9.0)).sqrt();
        for row in counts {
            for cell in row {
                assert!(
                    (cell as f64 - 10_000.0).abs() < 5.0 * sigma,
                    "cell count {cell}"
                );
            }
        }

        let config4 = singlet_config(ProtocolVariant::Original4, 40_000);
        let records4 = run_session(&config4, &SourceModel::Singlet).unwrap();
        let mut cells4 = 0;
        let mut seen = [[0u64; 3]; 3];
        for record in &records4 {
            let (a, b) = (
                slot(record.a_setting.index()),
                slot(record.b_setting.index()),
            );
            if seen[a][b] == 0 {
                cells4 += 1;
            }
            seen[a][b] += 1;
        }
        assert_eq!(cells4, 4);
        let sigma4 = (40_000.0f64 * 0.25 * 0.75).sqrt();
        for (a, b) in [(0, 1), (1, 1), (0, 2), (1, 2)] {
            assert!((seen[a][b] as f64 - 10_000.0).abs() < 5.0 * sigma4);
        }
    }

    #[test]
    fn singlet_keys_match_exactly() {
        let config =
            singlet_config(ProtocolVariant::Extended9, 20_000).with_sacrifice_fraction(0.5);
        let records = run_session(&config, &SourceModel::Singlet).unwrap();
        let result = sift(&records, &config).unwrap();
        assert_eq!(result.alice_key, result.bob_key);
        assert!(result.key_rounds > 0);
        assert_eq!(result.est_qber.unwrap().value, 0.0);
    }

    #[test]
    fn accounting_identity_holds() {
        for variant in [ProtocolVariant::Original4, ProtocolVariant::Extended9] {
            for sacrifice in [0.0, 0.25, 1.0] {
                let config =
                    ProtocolConfig::new(variant, 30_000, 11).with_sacrifice_fraction(sacrifice);
                let records = run_session(&config, &SourceModel::Singlet).unwrap();
                let result = sift(&records, &config).unwrap();
                assert_eq!(
                    result.key_rounds + result.disclosed_rounds + result.test_rounds,
                    result.n_pairs
                );
                assert_eq!(result.alice_key.len() as u64, result.key_rounds);
                assert_eq!(result.bob_key.len() as u64, result.key_rounds);
                assert!(result.utilization <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn sacrifice_extremes_hit_the_documented_key_fractions() {
        let n = 90_000u64;
        let all = singlet_config(ProtocolVariant::Extended9, n).with_sacrifice_fraction(1.0);
        let records = run_session(&all, &SourceModel::Singlet).unwrap();
        let result = sift(&records, &all).unwrap();
        assert_abs_diff_eq!(result.key_fraction, 2.0 / 9.0, epsilon = 0.01);
        assert_eq!(result.utilization, 1.0);

        let none = singlet_config(ProtocolVariant::Extended9, n);
        let records = run_session(&none, &SourceModel::Singlet).unwrap();
        let result = sift(&records, &none).unwrap();
        assert_abs_diff_eq!(result.key_fraction, 1.0 / 3.0, epsilon = 0.01);
        // the three cells feeding only the mirrored parameter cannot be
        // used without the undisclosed matched −− term
        assert!(result.utilization < 1.0);
        assert_abs_diff_eq!(result.utilization, 2.0 / 3.0, epsilon = 0.01);
        assert!(result.est_w.is_some());
        assert_eq!(result.est_w_tilde, None);
        assert_eq!(result.est_w_tilde_prime, None);
        assert_eq!(result.est_qber, None);
        assert_eq!(result.modified_wigner_violated, None);
        assert_eq!(result.original_protocol_secure, None);
    }

    #[test]
    fn estimates_track_the_closed_form() {
        let config =
            singlet_config(ProtocolVariant::Extended9, 90_000).with_sacrifice_fraction(1.0);
        let records = run_session(&config, &SourceModel::Singlet).unwrap();
        let result = sift(&records, &config).unwrap();
        let w_tilde = result.est_w_tilde.unwrap();
        assert!((w_tilde.value + 0.125).abs() < 5.0 * w_tilde.std_error);
        let prime = result.est_w_tilde_prime.unwrap();
        assert!((prime.value + 0.125).abs() < 5.0 * prime.std_error);
    }

    #[test]
    fn estimate_probability_handles_cells_directly() {
        let config = singlet_config(ProtocolVariant::Extended9, 50_000);
        let records = run_session(&config, &SourceModel::Singlet).unwrap();
        let a1 = SettingId::new(Party::Alice, SettingIndex::One);
        let b3 = SettingId::new(Party::Bob, SettingIndex::Three);
        let est = estimate_probability(&records, a1, b3, JointOutcome::PP).unwrap();
        // ½sin²(π/3) = 0.375
        assert!((est.value - 0.375).abs() < 3.0 * est.std_error + 1e-9);

        // empty cell: Bob never uses Alice's party
        let bogus = SettingId::new(Party::Alice, SettingIndex::One);
        assert!(estimate_probability(&records, a1, bogus, JointOutcome::PP).is_none());

        let all_pp: Vec<RoundRecord> = (0..100)
            .map(|round| RoundRecord {
                round,
                a_setting: a1,
                b_setting: b3,
                outcome: JointOutcome::PP,
            })
            .collect();
        let est = estimate_probability(&all_pp, a1, b3, JointOutcome::PP).unwrap();
        assert_eq!((est.value, est.std_error, est.count), (1.0, 0.0, 100));
    }

    #[test]
    fn transcript_discloses_only_non_key_rounds() {
        let config = singlet_config(ProtocolVariant::Extended9, 2_000).with_sacrifice_fraction(0.5);
        let records = run_session(&config, &SourceModel::Singlet).unwrap();
        let (result, transcript) = sift_with_transcript(&records, &config).unwrap();

        let announces = transcript
            .iter()
            .filter(|m| m.kind == SiftMessageKind::SettingAnnounce)
            .count();
        assert_eq!(announces as u64, 2 * result.n_pairs);

        let requested: HashSet<u64> = transcript
            .iter()
            .filter(|m| m.kind == SiftMessageKind::DisclosureRequest)
            .map(|m| m.round)
            .collect();
        let disclosed: HashSet<u64> = transcript
            .iter()
            .filter(|m| m.kind == SiftMessageKind::Disclosure)
            .map(|m| m.round)
            .collect();
        assert_eq!(requested, disclosed);
        assert_eq!(
            requested.len() as u64,
            result.disclosed_rounds + result.test_rounds
        );

        let key_rounds: HashSet<u64> = records
            .iter()
            .filter(|r| classify(&config, r) == RoundClass::Key)
            .map(|r| r.round)
            .collect();
        assert!(key_rounds.is_disjoint(&disclosed));
    }

    #[test]
    fn sift_rejects_mismatched_sessions() {
        let config = singlet_config(ProtocolVariant::Original4, 100);
        let records = run_session(&config, &SourceModel::Singlet).unwrap();
        let wrong = singlet_config(ProtocolVariant::Original4, 99);
        assert!(matches!(
            sift(&records, &wrong).unwrap_err(),
            Error::SessionMismatch { .. }
        ));
    }

    #[test]
    fn attack_session_fools_the_naive_test_only() {
        let config = ProtocolConfig::new(ProtocolVariant::Original4, 200_000, 5)
            .with_sacrifice_fraction(0.5);
        let source = delta_source(0.6 * PI, 0.4 * PI);
        let records = run_session(&config, &source).unwrap();
        let result = sift(&records, &config).unwrap();
        assert_eq!(result.naive_wigner_violated, Some(true));
        assert_eq!(result.modified_wigner_violated, Some(false));
        assert_eq!(result.original_protocol_secure, Some(false));
        let w = result.est_w.unwrap();
        assert!((w.value - (-0.19952269868546246)).abs() < 5.0 * w.std_error);
    }
}
