use rayon::prelude::*;
use revisp::io::crop_aligned;
use revisp::losses::{l1, PointLoss};
use revisp::model::{fit_global_matrix, fit_with_history, stratified_sample, FitConfig, ModelFile, PatchPair};
use revisp::Predictor;

use super::{basename, write_file, Context};
use crate::args::{FitArgs, Method};
use crate::error::{CliError, CliResult};

pub const DEFAULT_GAMMAS: [f64; 3] = [1.0, 2.2, 2.4];

fn fit_error(e: revisp::Error) -> CliError {
    match e {
        revisp::Error::EmptyDataset => CliError::Data("empty dataset".into()),
        other => CliError::Fit(other.to_string()),
    }
}

pub fn cmd_fit(ctx: &Context, args: &FitArgs) -> CliResult<String> {
    let file = &ctx.config.fit;
    let method = args.method.or(file.method).unwrap_or_default();
    let crop = args.crop.or(file.crop);
    let stride = args.stride.or(file.stride).or(crop);
    let patches = args.patches.or(file.patches);
    let bins = args.bins.or(file.bins).unwrap_or(4);
    let loss = args.loss.or(file.loss).unwrap_or_default();

    let manifest = ctx.load_manifest()?;
    if manifest.is_empty() {
        return Err(CliError::Data(format!(
            "empty dataset: {} has no entries",
            ctx.manifest.as_deref().map(basename).unwrap_or_default()
        )));
    }
    let mut entries: Vec<_> = manifest.entries.iter().collect();
    entries.sort_by(|a, b| a.id.cmp(&b.id));
    let per_entry: Vec<Vec<PatchPair>> = entries
        .par_iter()
        .map(|e| {
            let (rgb, raw) = (manifest.load_rgb(e)?, manifest.load_raw(e)?);
            match (crop, stride) {
                (Some(c), Some(s)) => crop_aligned(&rgb, &raw, c, s),
                _ => Ok(vec![PatchPair::new(rgb, raw)?]),
            }
        })
        .collect::<revisp::Result<_>>()?;
    let mut pairs: Vec<PatchPair> = per_entry.into_iter().flatten().collect();
    if let Some(n) = patches {
        pairs = stratified_sample(&pairs, n, bins, ctx.seed).map_err(|e| CliError::Usage(e.to_string()))?;
    }

    let (model, objective, loss_name) = match method {
        Method::GammaMixture => {
            let gammas = args.gammas.clone().or_else(|| file.gammas.clone()).unwrap_or(DEFAULT_GAMMAS.to_vec());
            let mut cfg = FitConfig {
                seed: ctx.seed,
                loss,
                ..Default::default()
            };
            if let Some(iters) = args.max_iters.or(file.max_iters) {
                cfg.max_outer_iters = iters;
            }
            let (model, history) = fit_with_history(&pairs, gammas.len(), &gammas, &cfg).map_err(fit_error)?;
            let obj = history.final_objective();
            (ModelFile::gamma_mixture(&model, Some(obj)), obj, loss)
        }
        Method::GlobalMatrix => {
            let m = fit_global_matrix(&pairs).map_err(fit_error)?;
            let (mut pred, mut target) = (Vec::new(), Vec::new());
            for p in &pairs {
                pred.extend(m.predict_linear(&p.rgb)?);
                target.extend_from_slice(p.raw.as_slice());
            }
            let obj = l1(&pred, &target)?;
            (ModelFile::global_matrix(&m, Some(obj)), obj, PointLoss::L1)
        }
    };
    write_file(&args.out, &model.to_json()?)?;
    Ok(format!(
        "method: {}\npairs: {}\nobjective ({loss_name}): {objective:.6e}\nmodel: {}\n",
        model.method_name(),
        pairs.len(),
        args.out.display()
    ))
}
