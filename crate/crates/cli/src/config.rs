//! Optional TOML defaults.
//!
//! ```toml
//! seed = 7
//! threads = 2
//! manifest = "data/manifest.json"   # relative to this file
//!
//! [fit]
//! method = "gamma-mixture"
//! gammas = [1.0, 2.2, 2.4]
//! loss = "l1"
//! crop = 32
//! patches = 64
//! bins = 4
//!
//! [predict]
//! tta = "dihedral8"
//! ```

use std::path::{Path, PathBuf};

use revisp::losses::PointLoss;
use revisp::tta::TtaMode;
use serde::Deserialize;

use crate::args::Method;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub manifest: Option<PathBuf>,
    #[serde(default)]
    pub fit: FitConfigFile,
    #[serde(default)]
    pub predict: PredictConfigFile,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfigFile {
    pub method: Option<Method>,
    pub gammas: Option<Vec<f64>>,
    pub loss: Option<PointLoss>,
    pub crop: Option<usize>,
    pub stride: Option<usize>,
    pub patches: Option<usize>,
    pub bins: Option<usize>,
    pub max_iters: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictConfigFile {
    pub tta: Option<TtaMode>,
}

impl Config {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        let mut cfg: Config =
            toml::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        if let Some(m) = cfg.manifest.as_mut() {
            if m.is_relative() {
                *m = path.parent().unwrap_or(Path::new("")).join(&*m);
            }
        }
        Ok(cfg)
    }
}
