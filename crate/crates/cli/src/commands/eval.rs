use rayon::prelude::*;
use revisp::io::{read_raw16, DevicePair};
use revisp::metrics::{psnr, ssim};

use super::{write_file, Context, PredictionInfo};
use crate::args::EvalArgs;
use crate::error::{CliError, CliResult};
use crate::report::{EvalReport, ImageScore};

pub fn cmd_eval(ctx: &Context, args: &EvalArgs) -> CliResult<String> {
    let manifest = ctx.load_manifest()?;
    let mut entries: Vec<&DevicePair> = manifest.entries.iter().collect();
    entries.sort_by(|a, b| a.id.cmp(&b.id));
    let pred_path = |e: &DevicePair| args.pred.join(format!("{}.raw16", e.id));
    let missing: Vec<&str> = entries
        .iter()
        .filter(|e| !pred_path(e).is_file())
        .map(|e| e.id.as_str())
        .collect();
    if !missing.is_empty() {
        return Err(CliError::Data(format!("missing predictions for: {}", missing.join(", "))));
    }

    let scores: Vec<ImageScore> = entries
        .par_iter()
        .map(|e| -> CliResult<ImageScore> {
            let truth = manifest.load_raw(e)?;
            let pred = read_raw16(&pred_path(e))?;
            let p = psnr(&pred, &truth).map_err(|err| CliError::Data(format!("{}: {err}", e.id)))?;
            Ok(ImageScore {
                id: e.id.clone(),
                device: e.device.to_string(),
                group: e.group,
                psnr: p.is_finite().then_some(p),
                ssim: ssim(&pred, &truth).map_err(|err| CliError::Data(format!("{}: {err}", e.id)))?,
            })
        })
        .collect::<CliResult<_>>()?;

    let info = PredictionInfo::read(&args.pred)?;
    let method = args
        .method
        .clone()
        .or_else(|| info.as_ref().map(|i| i.method.clone()))
        .unwrap_or_else(|| "unknown".into());
    let (tta, model) = info.map_or_else(|| ("unknown".into(), "-".into()), |i| (i.tta, i.model));
    let report = EvalReport::new(method, tta, model, scores);
    write_file(&args.out, &report.to_json()?)?;

    let mut out = String::new();
    for (name, agg) in [("overall", report.overall), ("target", report.target), ("oof", report.oof)] {
        let psnr = agg.psnr.map_or("-".into(), |v| format!("{v:.2}"));
        let ssim = agg.ssim.map_or("-".into(), |v| format!("{v:.4}"));
        out.push_str(&format!("{name}: {} images, PSNR {psnr} dB, SSIM {ssim}", agg.images));
        if agg.psnr_excluded > 0 {
            out.push_str(&format!(" ({} infinite PSNR excluded)", agg.psnr_excluded));
        }
        out.push('\n');
    }
    out.push_str(&format!("report: {}\n", args.out.display()));
    Ok(out)
}
