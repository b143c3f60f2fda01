//! Evaluation reports and their table rendering.

use std::path::Path;

use revisp::io::Group;
use serde::{Deserialize, Serialize};

use crate::args::TableFormat;
use crate::error::{CliError, CliResult};

pub const REPORT_FORMAT_VERSION: u32 = 1;

pub const AGGREGATION_RULE: &str = "unweighted mean of per-image PSNR/SSIM; overall over all images, \
target/oof over their group only; infinite PSNR values are excluded from PSNR means and counted";

/// One scored image. `psnr` is `None` when the prediction is exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageScore {
    pub id: String,
    pub device: String,
    pub group: Group,
    pub psnr: Option<f64>,
    pub ssim: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GroupAggregate {
    pub images: usize,
    /// Mean over finite values; `None` when there are none.
    pub psnr: Option<f64>,
    pub ssim: Option<f64>,
    pub psnr_excluded: usize,
}

impl GroupAggregate {
    pub fn from_scores<'a>(scores: impl IntoIterator<Item = &'a ImageScore>) -> Self {
        let (mut n, mut excluded, mut finite) = (0, 0, 0);
        let (mut psnr_sum, mut ssim_sum) = (0.0, 0.0);
        for s in scores {
            n += 1;
            ssim_sum += s.ssim;
            match s.psnr {
                Some(p) => {
                    psnr_sum += p;
                    finite += 1;
                }
                None => excluded += 1,
            }
        }
        GroupAggregate {
            images: n,
            psnr: (finite > 0).then(|| psnr_sum / finite as f64),
            ssim: (n > 0).then(|| ssim_sum / n as f64),
            psnr_excluded: excluded,
        }
    }

    /// Aggregate given directly as (PSNR, SSIM) means.
    pub fn from_means(psnr: f64, ssim: f64) -> Self {
        GroupAggregate {
            images: 0,
            psnr: Some(psnr),
            ssim: Some(ssim),
            psnr_excluded: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub format_version: u32,
    pub method: String,
    pub tta: String,
    pub model: String,
    pub aggregation: String,
    pub overall: GroupAggregate,
    pub target: GroupAggregate,
    pub oof: GroupAggregate,
    /// Sorted by id.
    pub per_image: Vec<ImageScore>,
}

impl EvalReport {
    pub fn new(method: String, tta: String, model: String, mut per_image: Vec<ImageScore>) -> Self {
        per_image.sort_by(|a, b| a.id.cmp(&b.id));
        let in_group = |g: Group| GroupAggregate::from_scores(per_image.iter().filter(|s| s.group == g));
        EvalReport {
            format_version: REPORT_FORMAT_VERSION,
            method,
            tta,
            model,
            aggregation: AGGREGATION_RULE.to_string(),
            overall: GroupAggregate::from_scores(&per_image),
            target: in_group(Group::Target),
            oof: in_group(Group::Oof),
            per_image,
        }
    }

    pub fn to_json(&self) -> CliResult<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| CliError::Data(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let r: EvalReport = serde_json::from_str(&text)
            .map_err(|e| CliError::Data(format!("{}: malformed report: {e}", path.display())))?;
        if r.format_version != REPORT_FORMAT_VERSION {
            return Err(CliError::Data(format!(
                "{}: unsupported report version {}",
                path.display(),
                r.format_version
            )));
        }
        Ok(r)
    }

    pub fn table_row(&self) -> TableRow {
        TableRow {
            method: self.method.clone(),
            overall: self.overall,
            target: self.target,
            oof: self.oof,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub method: String,
    pub overall: GroupAggregate,
    pub target: GroupAggregate,
    pub oof: GroupAggregate,
}

pub const TABLE_HEADER: [&str; 7] = [
    "Method",
    "Overall PSNR",
    "Overall SSIM",
    "Target PSNR",
    "Target SSIM",
    "OOF PSNR",
    "OOF SSIM",
];

fn cell(v: Option<f64>, decimals: usize) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.decimals$}"))
}

impl TableRow {
    /// PSNR to two decimals, SSIM to four, `-` for an empty group.
    pub fn cells(&self) -> [String; 7] {
        [
            self.method.clone(),
            cell(self.overall.psnr, 2),
            cell(self.overall.ssim, 4),
            cell(self.target.psnr, 2),
            cell(self.target.ssim, 4),
            cell(self.oof.psnr, 2),
            cell(self.oof.ssim, 4),
        ]
    }
}

pub fn render_table(rows: &[TableRow], format: TableFormat) -> CliResult<String> {
    match format {
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| CliError::Data(e.to_string());
            w.write_record(TABLE_HEADER).map_err(io)?;
            for r in rows {
                w.write_record(r.cells()).map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Data(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
        }
        TableFormat::Markdown => {
            let mut s = format!("| {} |\n", TABLE_HEADER.join(" | "));
            s.push_str("|---|---:|---:|---:|---:|---:|---:|\n");
            for r in rows {
                s.push_str(&format!("| {} |\n", r.cells().join(" | ")));
            }
            Ok(s)
        }
    }
}
