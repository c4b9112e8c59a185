//! JSON form of a measure model (`masses.json`).

use antiassoc::measure::{Base, MassPoint, MeasureModel};
use antiassoc::{ExtensionParams, Real};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseFile {
    /// `chebyshev_u` or `grosjean1`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionFile {
    /// Exact values as `"p/q"`, otherwise decimals.
    pub b: Vec<String>,
    pub a2: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MassFile {
    pub x: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub base: BaseFile,
    pub extension: ExtensionFile,
    pub provenance: String,
    pub masses: Vec<MassFile>,
    pub continuous_mass: f64,
    pub total_mass: f64,
}

fn texts(values: &[Real]) -> Vec<String> {
    values.iter().map(Real::to_text).collect()
}

fn parse_all(values: &[String]) -> Result<Vec<Real>, CliError> {
    values
        .iter()
        .map(|s| Real::parse(s).map_err(CliError::config))
        .collect()
}

impl ModelFile {
    pub fn from_model(model: &MeasureModel, continuous_mass: f64) -> Self {
        let base = match model.base() {
            Base::ChebyshevU => BaseFile {
                kind: "chebyshev_u".into(),
                alpha: None,
            },
            Base::Grosjean1(a) => BaseFile {
                kind: "grosjean1".into(),
                alpha: Some(a.to_text()),
            },
        };
        ModelFile {
            base,
            extension: ExtensionFile {
                b: texts(model.params().b()),
                a2: texts(model.params().a2()),
            },
            provenance: model.provenance().tag().into(),
            masses: model
                .masses()
                .iter()
                .map(|m| MassFile {
                    x: m.x,
                    mass: m.mass,
                })
                .collect(),
            continuous_mass,
            total_mass: continuous_mass + model.discrete_mass(),
        }
    }

    /// Rebuilds the model without recomputing the mass points.
    pub fn to_model(&self) -> Result<MeasureModel, CliError> {
        let base = match (self.base.kind.as_str(), &self.base.alpha) {
            ("chebyshev_u", None) => Base::ChebyshevU,
            ("grosjean1", Some(a)) => Base::Grosjean1(Real::parse(a).map_err(CliError::config)?),
            (kind, _) => {
                return Err(CliError::Config(format!(
                    "unsupported base {kind:?} in model file"
                )))
            }
        };
        base.validate()?;
        let params = ExtensionParams::new(
            parse_all(&self.extension.b)?,
            parse_all(&self.extension.a2)?,
        )?;
        let masses = self
            .masses
            .iter()
            .map(|m| MassPoint {
                x: m.x,
                mass: m.mass,
            })
            .collect();
        let model = MeasureModel::from_parts(base, params, masses);
        if model.provenance().tag() != self.provenance {
            return Err(CliError::Config(format!(
                "provenance {:?} does not match the base (expected {:?})",
                self.provenance,
                model.provenance().tag()
            )));
        }
        Ok(model)
    }

    pub fn read(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(CliError::config)
    }
}
