//! Joint detection probabilities for polarization-entangled photon pairs.
//!
//! Two source families are modeled. The ideal singlet state produces
//! coincidences that depend only on the analyzer angle difference:
//! equal outcomes with probability ½sin²(α_A−α_B), opposite outcomes with
//! ½cos²(α_A−α_B). A separable (eavesdropper-prepared) pair polarized at
//! (Φ_A, Φ_B) factorizes into per-party Malus terms cos²(Φ−α) / sin²(Φ−α).
//! Everything here is a pure function of its arguments.

use std::f64::consts::FRAC_PI_6;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::KahanSum;

/// Plane polarization angle in radians.
///
/// Construction rejects non-finite values. Angles are stored
/// un-normalized: all probability formulas are π-periodic, so no
/// canonical range is enforced.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);

    pub fn new(radians: f64) -> Result<Self> {
        if radians.is_finite() {
            Ok(Angle(radians))
        } else {
            Err(Error::NonFiniteAngle(radians))
        }
    }

    pub fn radians(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Angle {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Angle::new(value)
    }
}

impl From<Angle> for f64 {
    fn from(angle: Angle) -> f64 {
        angle.0
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} rad", self.0)
    }
}

/// Protocol participant owning one analyzer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    fn letter(self) -> char {
        match self {
            Party::Alice => 'A',
            Party::Bob => 'B',
        }
    }
}

/// Analyzer slot with the protocol's canonical angles.
///
/// Both parties use −π/6, 0, π/6 for slots 1, 2, 3. The original
/// four-setting protocol restricts Alice to {1, 2} and Bob to {2, 3};
/// the nine-cell protocol uses all three per party.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SettingIndex {
    One = 1,
    Two = 2,
    Three = 3,
}

impl SettingIndex {
    pub const ALL: [SettingIndex; 3] = [SettingIndex::One, SettingIndex::Two, SettingIndex::Three];

    pub fn angle(self) -> Angle {
        match self {
            SettingIndex::One => Angle(-FRAC_PI_6),
            SettingIndex::Two => Angle(0.0),
            SettingIndex::Three => Angle(FRAC_PI_6),
        }
    }

    pub fn as_u8(self) -> u8 {
        self as u8
    }
}

/// One party's analyzer choice for a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SettingId {
    party: Party,
    index: SettingIndex,
}

impl SettingId {
    pub fn new(party: Party, index: SettingIndex) -> Self {
        SettingId { party, index }
    }

    pub fn party(self) -> Party {
        self.party
    }

    pub fn index(self) -> SettingIndex {
        self.index
    }

    pub fn angle(self) -> Angle {
        self.index.angle()
    }
}

impl fmt::Display for SettingId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.party.letter(), self.index.as_u8())
    }
}

/// Which detector fired behind a party's polarizing beam splitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Detector {
    Plus,
    Minus,
}

impl Detector {
    fn sign(self) -> char {
        match self {
            Detector::Plus => '+',
            Detector::Minus => '-',
        }
    }
}

/// Pair of detector outcomes for one photon pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct JointOutcome {
    pub a: Detector,
    pub b: Detector,
}

impl JointOutcome {
    pub const PP: JointOutcome = JointOutcome {
        a: Detector::Plus,
        b: Detector::Plus,
    };
    pub const PM: JointOutcome = JointOutcome {
        a: Detector::Plus,
        b: Detector::Minus,
    };
    pub const MP: JointOutcome = JointOutcome {
        a: Detector::Minus,
        b: Detector::Plus,
    };
    pub const MM: JointOutcome = JointOutcome {
        a: Detector::Minus,
        b: Detector::Minus,
    };

    /// The four outcomes in the fixed order PP, PM, MP, MM.
    /// Outcome sampling walks this order cumulatively; do not reorder.
    pub const ALL: [JointOutcome; 4] = [
        JointOutcome::PP,
        JointOutcome::PM,
        JointOutcome::MP,
        JointOutcome::MM,
    ];

    pub fn label(self) -> &'static str {
        match (self.a, self.b) {
            (Detector::Plus, Detector::Plus) => "PP",
            (Detector::Plus, Detector::Minus) => "PM",
            (Detector::Minus, Detector::Plus) => "MP",
            (Detector::Minus, Detector::Minus) => "MM",
        }
    }
}

impl fmt::Display for JointOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.a.sign(), self.b.sign())
    }
}

/// One point mass of Eve's preparation distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackAtom {
    pub phi_a: Angle,
    pub phi_b: Angle,
    pub weight: f64,
}

/// Finite mixture of separable preparations (Φ_A, Φ_B, weight).
///
/// Weights must be non-negative and sum to 1 within
/// [`AttackDistribution::WEIGHT_SUM_TOLERANCE`]. Continuous preparation
/// densities are represented by quadrature, one atom per node; the
/// security functionals are affine in the weights, so point masses lose
/// no generality.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackDistribution {
    atoms: Vec<AttackAtom>,
}

impl AttackDistribution {
    pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

    pub fn new(atoms: Vec<AttackAtom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        let mut total = KahanSum::default();
        for atom in &atoms {
            if !atom.weight.is_finite() || atom.weight < 0.0 {
                return Err(Error::InvalidWeight(atom.weight));
            }
            total.add(atom.weight);
        }
        let sum = total.value();
        if (sum - 1.0).abs() > Self::WEIGHT_SUM_TOLERANCE {
            return Err(Error::UnnormalizedWeights(sum));
        }
        Ok(AttackDistribution { atoms })
    }

    /// Point mass δ(Φ_A, Φ_B).
    pub fn point(phi_a: Angle, phi_b: Angle) -> Self {
        AttackDistribution {
            atoms: vec![AttackAtom {
                phi_a,
                phi_b,
                weight: 1.0,
            }],
        }
    }

    pub fn atoms(&self) -> &[AttackAtom] {
        &self.atoms
    }
}

/// Photon-pair source under test: the ideal singlet or Eve's
/// product-state mixture.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceModel {
    Singlet,
    ProductAttack(AttackDistribution),
}

impl From<AttackDistribution> for SourceModel {
    fn from(distribution: AttackDistribution) -> Self {
        SourceModel::ProductAttack(distribution)
    }
}

/// Malus rule: detection probability for a pure polarization state at
/// `phi` measured by an analyzer at `alpha`.
fn detection_prob(phi: f64, alpha: f64, detector: Detector) -> f64 {
    let delta = phi - alpha;
    match detector {
        Detector::Plus => {
            let c = delta.cos();
            c * c
        }
        Detector::Minus => {
            let s = delta.sin();
            s * s
        }
    }
}

/// Coincidence probability for the singlet state at analyzer angles
/// (α_A, α_B): ½sin²(α_A−α_B) for equal outcomes, ½cos²(α_A−α_B) for
/// opposite ones.
pub fn singlet_joint_prob(alpha_a: Angle, alpha_b: Angle, outcome: JointOutcome) -> f64 {
    let delta = alpha_a.radians() - alpha_b.radians();
    if outcome.a == outcome.b {
        let s = delta.sin();
        0.5 * s * s
    } else {
        let c = delta.cos();
        0.5 * c * c
    }
}

/// Coincidence probability for a separable pair prepared at (Φ_A, Φ_B):
/// the product of the two per-party Malus terms.
pub fn product_joint_prob(
    phi_a: Angle,
    phi_b: Angle,
    alpha_a: Angle,
    alpha_b: Angle,
    outcome: JointOutcome,
) -> f64 {
    detection_prob(phi_a.radians(), alpha_a.radians(), outcome.a)
        * detection_prob(phi_b.radians(), alpha_b.radians(), outcome.b)
}

/// Coincidence probability for any source model.
///
/// Product-attack mixtures are weight-weighted sums over atoms, evaluated
/// in atom order with compensated summation so results are reproducible
/// bit-for-bit for a given atom list.
pub fn joint_prob(
    source: &SourceModel,
    alpha_a: Angle,
    alpha_b: Angle,
    outcome: JointOutcome,
) -> f64 {
    match source {
        SourceModel::Singlet => singlet_joint_prob(alpha_a, alpha_b, outcome),
        SourceModel::ProductAttack(distribution) => {
            let mut sum = KahanSum::default();
            for atom in distribution.atoms() {
                sum.add(
                    atom.weight
                        * product_joint_prob(atom.phi_a, atom.phi_b, alpha_a, alpha_b, outcome),
                );
            }
            sum.value()
        }
    }
}
