//! Input file formats: attack files and simulation configs.
//!
//! Attack files are JSON arrays of `{phi_a, phi_b, weight}` objects.
//! Angles are plain radians or π expressions in string form: `"0.6pi"`,
//! `"pi"`, `"-pi/6"`, `"2pi/3"`.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use wigner_qkd::{
    Angle, AttackAtom, AttackDistribution, ProtocolConfig, ProtocolVariant, SettingProbabilities,
    SourceModel,
};

use crate::CliError;

/// Angle given either as radians or as a π expression string.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum AngleSpec {
    Radians(f64),
    Expression(String),
}

impl AngleSpec {
    pub fn to_angle(&self) -> Result<Angle, CliError> {
        let radians = match self {
            AngleSpec::Radians(value) => *value,
            AngleSpec::Expression(text) => parse_angle_expression(text)?,
        };
        Angle::new(radians).map_err(CliError::from)
    }
}

/// Parse `"0.6pi"`, `"pi"`, `"-pi/6"`, `"2pi/3"`, or a bare number.
pub fn parse_angle_expression(text: &str) -> Result<f64, CliError> {
    let normalized = text.trim().to_ascii_lowercase();
    let bad = || CliError::Input(format!("cannot parse angle expression {text:?}"));

    let Some(position) = normalized.find("pi") else {
        return normalized.parse::<f64>().map_err(|_| bad());
    };
    let coefficient = match normalized[..position].trim() {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse::<f64>().map_err(|_| bad())?,
    };
    let divisor = match normalized[position + 2..].trim() {
        "" => 1.0,
        slash if slash.starts_with('/') => slash[1..].trim().parse::<f64>().map_err(|_| bad())?,
        _ => return Err(bad()),
    };
    Ok(coefficient * PI / divisor)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub phi_a: AngleSpec,
    pub phi_b: AngleSpec,
    pub weight: f64,
}

impl AtomSpec {
    fn to_atom(&self) -> Result<AttackAtom, CliError> {
        Ok(AttackAtom {
            phi_a: self.phi_a.to_angle()?,
            phi_b: self.phi_b.to_angle()?,
            weight: self.weight,
        })
    }
}

fn atoms_to_distribution(atoms: &[AtomSpec]) -> Result<AttackDistribution, CliError> {
    let atoms = atoms
        .iter()
        .map(AtomSpec::to_atom)
        .collect::<Result<Vec<_>, _>>()?;
    AttackDistribution::new(atoms).map_err(CliError::from)
}

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|error| CliError::Input(format!("cannot read {}: {error}", path.display())))
}

/// Load a JSON attack file into a validated distribution.
pub fn load_attack_file(path: &Path) -> Result<AttackDistribution, CliError> {
    let text = read_input(path)?;
    let atoms: Vec<AtomSpec> = serde_json::from_str(&text)
        .map_err(|error| CliError::Input(format!("{}: {error}", path.display())))?;
    atoms_to_distribution(&atoms)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum SourceSpec {
    /// The string `"singlet"`.
    Named(String),
    /// Inline attack atoms.
    Atoms(Vec<AtomSpec>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbabilitiesSpec {
    pub alice: Vec<f64>,
    pub bob: Vec<f64>,
}

/// Simulation config file: protocol parameters plus the source under test.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSpec {
    pub variant: ProtocolVariant,
    pub n_pairs: u64,
    pub seed: u64,
    #[serde(default)]
    pub sacrifice_fraction: f64,
    #[serde(default)]
    pub setting_probabilities: Option<ProbabilitiesSpec>,
    pub source: SourceSpec,
}

pub fn load_simulate_spec(path: &Path) -> Result<SimulateSpec, CliError> {
    let text = read_input(path)?;
    serde_json::from_str(&text)
        .map_err(|error| CliError::Input(format!("{}: {error}", path.display())))
}

/// Resolve a parsed spec into a validated protocol config and source.
pub fn build_simulation(spec: &SimulateSpec) -> Result<(ProtocolConfig, SourceModel), CliError> {
    let variant = spec.variant;
    let mut config = ProtocolConfig::new(variant, spec.n_pairs, spec.seed)
        .with_sacrifice_fraction(spec.sacrifice_fraction);
    if let Some(probabilities) = &spec.setting_probabilities {
        config = config.with_setting_probabilities(SettingProbabilities::new(
            variant,
            probabilities.alice.clone(),
            probabilities.bob.clone(),
        )?);
    }
    config.validate()?;

    let source = match &spec.source {
        SourceSpec::Named(name) if name == "singlet" => SourceModel::Singlet,
        SourceSpec::Named(name) => {
            return Err(CliError::Input(format!(
                "unknown source {name:?}; expected \"singlet\" or an atom array"
            )))
        }
        SourceSpec::Atoms(atoms) => SourceModel::ProductAttack(atoms_to_distribution(atoms)?),
    };
    Ok((config, source))
}
