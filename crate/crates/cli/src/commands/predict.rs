use std::path::Path;

use rayon::prelude::*;
use revisp::io::{load_metadata, write_raw16, DevicePair, Manifest};
use revisp::model::ModelFile;
use revisp::tta::predict_tta;
use revisp::Predictor;
use serde::{Deserialize, Serialize};

use super::{basename, create_dir, write_file, Context};
use crate::args::PredictArgs;
use crate::error::{CliError, CliResult};

pub const PREDICTION_INFO_FILE: &str = "prediction.json";

/// Written next to the predictions so `eval` can echo how they were made.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionInfo {
    pub method: String,
    pub tta: String,
    pub model: String,
    pub ids: Vec<String>,
}

impl PredictionInfo {
    pub fn read(dir: &Path) -> CliResult<Option<Self>> {
        let path = dir.join(PREDICTION_INFO_FILE);
        if !path.exists() {
            return Ok(None);
        }
        let text =
            std::fs::read_to_string(&path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map(Some)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
    }
}

type BoxedPredictor = Box<dyn Predictor + Send + Sync>;

enum Source {
    Shared(BoxedPredictor),
    PerEntry,
}

fn entry_predictor(manifest: &Manifest, e: &DevicePair) -> CliResult<BoxedPredictor> {
    match manifest.load_meta(e)? {
        Some(meta) => Ok(Box::new(meta)),
        None => Err(CliError::Data(format!("entry `{}` has no metadata file", e.id))),
    }
}

pub fn cmd_predict(ctx: &Context, args: &PredictArgs) -> CliResult<String> {
    let tta = args.tta.or(ctx.config.predict.tta).unwrap_or_default();
    let (source, method, model_name) = match (&args.model, &args.metadata, args.manifest_metadata) {
        (Some(path), None, false) => {
            let file = ModelFile::read(path)?;
            let name = file.method_name().to_string();
            (Source::Shared(file.predictor()?), name, basename(path))
        }
        (None, Some(path), false) => (
            Source::Shared(Box::new(load_metadata(path)?)),
            "metadata-inverse".to_string(),
            basename(path),
        ),
        (None, None, true) => (Source::PerEntry, "metadata-inverse".to_string(), "manifest-metadata".to_string()),
        _ => {
            return Err(CliError::Usage(
                "give exactly one of --model, --metadata or --manifest-metadata".into(),
            ))
        }
    };
    let manifest = ctx.load_manifest()?;
    create_dir(&args.out)?;
    let mut entries: Vec<&DevicePair> = manifest.entries.iter().collect();
    entries.sort_by(|a, b| a.id.cmp(&b.id));

    entries.par_iter().try_for_each(|e| -> CliResult<()> {
        let rgb = manifest.load_rgb(e)?;
        let raw = match &source {
            Source::Shared(p) => predict_tta(p.as_ref(), &rgb, tta)?,
            Source::PerEntry => predict_tta(entry_predictor(&manifest, e)?.as_ref(), &rgb, tta)?,
        };
        write_raw16(&args.out.join(format!("{}.raw16", e.id)), &raw)?;
        Ok(())
    })?;

    let info = PredictionInfo {
        method,
        tta: tta.to_string(),
        model: model_name,
        ids: entries.iter().map(|e| e.id.clone()).collect(),
    };
    let mut json = serde_json::to_string_pretty(&info).map_err(|e| CliError::Data(e.to_string()))?;
    json.push('\n');
    write_file(&args.out.join(PREDICTION_INFO_FILE), &json)?;
    Ok(format!(
        "predicted {} images with {} (tta {tta}) into {}\n",
        entries.len(),
        info.method,
        args.out.display()
    ))
}
