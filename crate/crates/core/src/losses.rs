//! Training losses of several reverse-ISP networks, plus pointwise fitting losses.
//!
//! Pixel losses take flat sample slices (any layout, identical lengths) and
//! do not require predictions to be inside `[0, 1]`. Reductions are exactly
//! rounded sums, so a loss does not depend on the order of its samples.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::isp::ColorTransform;
use crate::metrics::{ssim_view, ImageView};
use xsum::{Xsum, XsumAuto};

/// Every published weighting constant, plus the stabilizers this crate adds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossWeights {
    /// ULite: L1, colour and matrix terms.
    pub lambda_l1: f64,
    pub lambda_color: f64,
    pub lambda_m: f64,
    /// UNAFNet: MSE, (1 − SSIM) and hard-log terms.
    pub w_mse: f64,
    pub w_ssim: f64,
    pub w_hardlog: f64,
    /// GAR2Net: L1 and L2 terms.
    pub lambda1: f64,
    pub lambda2: f64,
    /// DualRAW: mask and LPIPS weights. Both terms need components that are
    /// not implemented here, so these are carried but never multiply anything.
    pub tau1: f64,
    pub tau2: f64,
    /// TDMFNet perceptual weight; unused for the same reason.
    pub lambda_p: f64,
    pub eps_hardlog: f64,
    pub eps_color: f64,
    pub eps_log: f64,
}

impl LossWeights {
    pub const PUBLISHED: LossWeights = LossWeights {
        lambda_l1: 1.0,
        lambda_color: 0.001,
        lambda_m: 0.1,
        w_mse: 1.0,
        w_ssim: 0.05,
        w_hardlog: 0.1,
        lambda1: 1.0,
        lambda2: 1.0,
        tau1: 0.2,
        tau2: 0.5,
        lambda_p: 0.01,
        eps_hardlog: 1e-6,
        eps_color: 1e-4,
        eps_log: 1e-3,
    };
}

impl Default for LossWeights {
    fn default() -> Self {
        Self::PUBLISHED
    }
}

fn same_len(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!(
            "loss inputs differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::Dimension("loss over empty input".into()));
    }
    Ok(())
}

fn mean_of(a: &[f64], b: &[f64], f: impl Fn(f64, f64) -> f64) -> Result<f64> {
    same_len(a, b)?;
    let mut sum = XsumAuto::new();
    for (&x, &y) in a.iter().zip(b) {
        sum.add(f(x, y));
    }
    Ok(sum.sum() / a.len() as f64)
}

pub fn l1(pred: &[f64], target: &[f64]) -> Result<f64> {
    mean_of(pred, target, |x, y| (x - y).abs())
}

pub fn mse(pred: &[f64], target: &[f64]) -> Result<f64> {
    mean_of(pred, target, |x, y| (x - y) * (x - y))
}

/// Mean `|pred / (target + eps) − 1|`.
pub fn color_loss(pred: &[f64], target: &[f64]) -> Result<f64> {
    color_loss_eps(pred, target, LossWeights::PUBLISHED.eps_color)
}

pub fn color_loss_eps(pred: &[f64], target: &[f64], eps: f64) -> Result<f64> {
    mean_of(pred, target, |x, y| {
        let r = x / (y + eps);
        // 0 / eps is the all-black case; treat as a perfect ratio.
        if x == 0.0 && y == 0.0 {
            0.0
        } else {
            (r - 1.0).abs()
        }
    })
}

/// Mean absolute difference over the nine matrix entries.
pub fn matrix_loss(m_pred: &ColorTransform, m_true: &ColorTransform) -> f64 {
    matrix_terms(m_pred, m_true, f64::abs)
}

/// Squared-error variant of [`matrix_loss`].
pub fn matrix_loss_mse(m_pred: &ColorTransform, m_true: &ColorTransform) -> f64 {
    matrix_terms(m_pred, m_true, |d| d * d)
}

fn matrix_terms(a: &ColorTransform, b: &ColorTransform, f: impl Fn(f64) -> f64) -> f64 {
    let mut sum = 0.0;
    for r in 0..3 {
        for c in 0..3 {
            sum += f(a.m[r][c] - b.m[r][c]);
        }
    }
    sum / 9.0
}

/// Mean of `−ln(1 − min(|x − y|, 1) + ε)`.
///
/// At a perfect match this is `−ln(1 + ε)`, slightly below zero.
pub fn hard_log_loss(pred: &[f64], target: &[f64]) -> Result<f64> {
    hard_log_loss_eps(pred, target, LossWeights::PUBLISHED.eps_hardlog)
}

pub fn hard_log_loss_eps(pred: &[f64], target: &[f64], eps: f64) -> Result<f64> {
    mean_of(pred, target, |x, y| hard_log_term(x - y, eps))
}

#[inline]
fn hard_log_term(d: f64, eps: f64) -> f64 {
    -(1.0 - d.abs().min(1.0) + eps).ln()
}

/// Mean squared difference in `ln(x + eps)` space.
pub fn log_l2_loss(pred: &[f64], target: &[f64]) -> Result<f64> {
    let eps = LossWeights::PUBLISHED.eps_log;
    if let Some(v) = pred.iter().chain(target).find(|v| !(**v >= 0.0)) {
        return Err(Error::Domain(format!("log-L2 needs non-negative input, got {v}")));
    }
    mean_of(pred, target, |x, y| {
        let d = (x + eps).ln() - (y + eps).ln();
        d * d
    })
}

/// L1 after clamping the prediction into `[0, 1]`.
pub fn clipped_l1_loss(pred: &[f64], target: &[f64]) -> Result<f64> {
    mean_of(pred, target, |x, y| (x.clamp(0.0, 1.0) - y).abs())
}

/// Loss recipes of the individual teams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Team {
    /// `λ_L1·L1 + λ_color·L_color + λ_M·L_M`
    ULite,
    /// `L_MSE + 0.05·(1 − SSIM) + 0.1·L_hardlog`
    Unafnet,
    /// `λ1·L1 + λ2·MSE`
    Gar2net,
    /// `L_logL2 + L_clippedL1`; the τ-weighted mask and LPIPS terms are omitted.
    DualRaw,
    /// Three path losses plus the fusion loss, `l = L1`.
    Tdmf,
}

impl Team {
    pub const ALL: [Team; 5] = [
        Team::ULite,
        Team::Unafnet,
        Team::Gar2net,
        Team::DualRaw,
        Team::Tdmf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Team::ULite => "ulite",
            Team::Unafnet => "unafnet",
            Team::Gar2net => "gar2net",
            Team::DualRaw => "dualraw",
            Team::Tdmf => "tdmf",
        }
    }
}

impl fmt::Display for Team {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Team {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Team::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown loss selector `{s}`")))
    }
}

/// Per-path predictions of the three-path model.
#[derive(Debug, Clone, Copy)]
pub struct TdmfPaths<'a> {
    /// sRGB → RAW.
    pub direct: &'a [f64],
    /// G(sRGB) → RAW.
    pub gamma_input: &'a [f64],
    /// sRGB → G⁻¹(RAW); supervised with `target^(1/γ)`.
    pub inverse_gamma: &'a [f64],
    pub gamma: f64,
}

/// Everything a combined loss may need. `pred` is the final (fused) output.
#[derive(Debug, Clone, Copy)]
pub struct LossInputs<'a> {
    pub pred: ImageView<'a>,
    pub target: ImageView<'a>,
    /// `(predicted M', ground-truth M)`; the matrix term is skipped without it.
    pub matrices: Option<(&'a ColorTransform, &'a ColorTransform)>,
    pub paths: Option<TdmfPaths<'a>>,
}

impl<'a> LossInputs<'a> {
    pub fn pixels(pred: ImageView<'a>, target: ImageView<'a>) -> Self {
        LossInputs {
            pred,
            target,
            matrices: None,
            paths: None,
        }
    }
}

pub fn combined_loss(team: Team, inputs: &LossInputs<'_>, w: &LossWeights) -> Result<f64> {
    inputs.pred.same_shape(&inputs.target)?;
    let (p, t) = (inputs.pred.data, inputs.target.data);
    match team {
        Team::ULite => {
            let mut total = w.lambda_l1 * l1(p, t)? + w.lambda_color * color_loss_eps(p, t, w.eps_color)?;
            if let Some((m_pred, m_true)) = inputs.matrices {
                total += w.lambda_m * matrix_loss(m_pred, m_true);
            }
            Ok(total)
        }
        Team::Unafnet => {
            let ssim = ssim_view(inputs.pred, inputs.target)?;
            Ok(w.w_mse * mse(p, t)?
                + w.w_ssim * (1.0 - ssim)
                + w.w_hardlog * hard_log_loss_eps(p, t, w.eps_hardlog)?)
        }
        Team::Gar2net => Ok(w.lambda1 * l1(p, t)? + w.lambda2 * mse(p, t)?),
        Team::DualRaw => Ok(log_l2_loss(p, t)? + clipped_l1_loss(p, t)?),
        Team::Tdmf => {
            let paths = inputs.paths.ok_or_else(|| {
                Error::InvalidArgument("tdmf loss needs the three path predictions".into())
            })?;
            if !(paths.gamma > 0.0) {
                return Err(Error::Domain(format!("gamma must be positive, got {}", paths.gamma)));
            }
            let inv_target: Vec<f64> = t
                .iter()
                .map(|&y| y.max(0.0).powf(1.0 / paths.gamma))
                .collect();
            let path_loss =
                l1(paths.direct, t)? + l1(paths.gamma_input, t)? + l1(paths.inverse_gamma, &inv_target)?;
            Ok(path_loss + l1(p, t)?)
        }
    }
}

/// Pointwise losses with analytic derivatives, usable as fitting objectives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointLoss {
    #[default]
    L1,
    Mse,
    /// GAR2Net's L1 + MSE.
    Gar2net,
    HardLog,
}

impl PointLoss {
    pub fn name(self) -> &'static str {
        match self {
            PointLoss::L1 => "l1",
            PointLoss::Mse => "mse",
            PointLoss::Gar2net => "gar2net",
            PointLoss::HardLog => "hardlog",
        }
    }

    #[inline]
    pub fn value(self, pred: f64, target: f64) -> f64 {
        let d = pred - target;
        match self {
            PointLoss::L1 => d.abs(),
            PointLoss::Mse => d * d,
            PointLoss::Gar2net => d.abs() + d * d,
            PointLoss::HardLog => hard_log_term(d, LossWeights::PUBLISHED.eps_hardlog),
        }
    }

    /// d value / d pred; zero at the non-differentiable points.
    #[inline]
    pub fn derivative(self, pred: f64, target: f64) -> f64 {
        let d = pred - target;
        let sign = if d > 0.0 {
            1.0
        } else if d < 0.0 {
            -1.0
        } else {
            0.0
        };
        match self {
            PointLoss::L1 => sign,
            PointLoss::Mse => 2.0 * d,
            PointLoss::Gar2net => sign + 2.0 * d,
            PointLoss::HardLog => {
                if d.abs() >= 1.0 {
                    0.0
                } else {
                    sign / (1.0 - d.abs() + LossWeights::PUBLISHED.eps_hardlog)
                }
            }
        }
    }
}

impl fmt::Display for PointLoss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PointLoss {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(PointLoss::L1),
            "mse" | "l2" => Ok(PointLoss::Mse),
            "gar2net" => Ok(PointLoss::Gar2net),
            "hardlog" => Ok(PointLoss::HardLog),
            other => Err(Error::InvalidArgument(format!("unknown fit loss `{other}`"))),
        }
    }
}
