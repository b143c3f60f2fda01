mod eval;
mod fit;
mod predict;
mod report;
mod synth;

use std::path::{Path, PathBuf};

use revisp::io::Manifest;

use crate::args::Command;
use crate::config::Config;
use crate::error::{CliError, CliResult};

pub use eval::cmd_eval;
pub use fit::{cmd_fit, DEFAULT_GAMMAS};
pub use predict::{cmd_predict, PredictionInfo, PREDICTION_INFO_FILE};
pub use report::cmd_report;
pub use synth::cmd_synth;

/// Settings shared by every subcommand after merging flags and config.
#[derive(Debug, Clone, Default)]
pub struct Context {
    pub seed: u64,
    pub manifest: Option<PathBuf>,
    pub config: Config,
}

impl Context {
    pub fn load_manifest(&self) -> CliResult<Manifest> {
        let path = self
            .manifest
            .as_deref()
            .ok_or_else(|| CliError::Usage("--manifest is required for this command".into()))?;
        Ok(Manifest::load(path)?)
    }
}

pub fn dispatch(ctx: &Context, command: &Command) -> CliResult<String> {
    match command {
        Command::Synth(a) => cmd_synth(ctx, a),
        Command::Fit(a) => cmd_fit(ctx, a),
        Command::Predict(a) => cmd_predict(ctx, a),
        Command::Eval(a) => cmd_eval(ctx, a),
        Command::Report(a) => cmd_report(a),
    }
}

pub(crate) fn create_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))
}

pub(crate) fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// File name only, so echoed paths do not depend on where a run happened.
pub(crate) fn basename(path: &Path) -> String {
    path.file_name()
        .map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}
