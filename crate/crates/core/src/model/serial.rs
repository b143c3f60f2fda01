//! JSON model documents.
//!
//! ```json
//! { "format_version": 1, "kind": "gamma-mixture",
//!   "gammas": [1.0, 2.2], "maps": [{"a": [[...]], "b": [...]}, ...],
//!   "weights": [0.7, 0.3] }
//! ```
//!
//! Floats are written in shortest round-trip form, so a read after a write
//! reproduces every parameter bit for bit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AffineMap, ReverseModel};
use crate::error::{Error, Result};
use crate::isp::ColorTransform;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelFile {
    GammaMixture {
        format_version: u32,
        gammas: Vec<f64>,
        maps: Vec<AffineMap>,
        weights: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        objective: Option<f64>,
    },
    GlobalMatrix {
        format_version: u32,
        m: [[f64; 3]; 3],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        objective: Option<f64>,
    },
}

impl ModelFile {
    pub fn gamma_mixture(model: &ReverseModel, objective: Option<f64>) -> Self {
        ModelFile::GammaMixture {
            format_version: MODEL_FORMAT_VERSION,
            gammas: model.gammas().to_vec(),
            maps: model.maps().to_vec(),
            weights: model.weights().to_vec(),
            objective,
        }
    }

    pub fn global_matrix(m: &ColorTransform, objective: Option<f64>) -> Self {
        ModelFile::GlobalMatrix {
            format_version: MODEL_FORMAT_VERSION,
            m: m.m,
            objective,
        }
    }

    pub fn method_name(&self) -> &'static str {
        match self {
            ModelFile::GammaMixture { .. } => "gamma-mixture",
            ModelFile::GlobalMatrix { .. } => "global-matrix",
        }
    }

    fn version(&self) -> u32 {
        match self {
            ModelFile::GammaMixture { format_version, .. }
            | ModelFile::GlobalMatrix { format_version, .. } => *format_version,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        if file.version() != MODEL_FORMAT_VERSION {
            return Err(Error::InvalidArgument(format!(
                "unsupported model format version {}",
                file.version()
            )));
        }
        // Validate the payload.
        file.predictor()?;
        Ok(file)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn predictor(&self) -> Result<Box<dyn super::Predictor + Send + Sync>> {
        Ok(match self {
            ModelFile::GammaMixture {
                gammas,
                maps,
                weights,
                ..
            } => Box::new(ReverseModel::new(gammas.clone(), maps.clone(), weights.clone())?),
            ModelFile::GlobalMatrix { m, .. } => Box::new(ColorTransform::new(*m)?),
        })
    }
}
