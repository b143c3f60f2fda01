use nalgebra::{Matrix4, SymmetricEigen, Vector4};
use serde::{Deserialize, Serialize};

use super::sampling::{PatchPair, SampleSet};
use super::simplex::project_simplex;
use super::{AffineMap, ReverseModel};
use crate::error::{Error, Result};
use crate::isp::gamma_pow;
use crate::losses::PointLoss;

/// Smallest accepted eigenvalue ratio of the scaled normal matrix.
pub(crate) const MIN_CONDITION_RATIO: f64 = 1e-12;

/// Backtracking halvings tried before a weight step is declared stalled.
const MAX_BACKTRACK: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    pub max_outer_iters: usize,
    /// Initial projected-gradient step on the weights.
    pub weight_step: f64,
    /// Stop once an accepted iteration improves the objective by less.
    pub tol: f64,
    pub seed: u64,
    pub loss: PointLoss,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            max_outer_iters: 200,
            weight_step: 1.0,
            tol: 1e-12,
            seed: 0,
            loss: PointLoss::L1,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_outer_iters < 1 {
            return Err(Error::InvalidArgument("max_outer_iters must be >= 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument("tol must be > 0".into()));
        }
        if !(self.weight_step > 0.0) {
            return Err(Error::InvalidArgument("weight_step must be > 0".into()));
        }
        Ok(())
    }
}

/// Objective after the initial map solve and after every accepted weight
/// update, in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitHistory {
    pub objectives: Vec<f64>,
    pub iterations: usize,
}

impl FitHistory {
    pub fn final_objective(&self) -> f64 {
        *self.objectives.last().expect("history holds the initial objective")
    }
}

/// Accumulated normal equations of one affine regression.
#[derive(Default)]
pub(crate) struct NormalEquations {
    gram: Matrix4<f64>,
    rhs: Vector4<f64>,
    count: usize,
}

impl NormalEquations {
    #[inline]
    pub(crate) fn add(&mut self, z: [f64; 3], target: f64) {
        let row = Vector4::new(z[0], z[1], z[2], 1.0);
        self.gram += row * row.transpose();
        self.rhs += row * target;
        self.count += 1;
    }

    /// Returns `[a0, a1, a2, b]`.
    pub(crate) fn solve(&self, what: impl FnOnce() -> String) -> Result<[f64; 4]> {
        let ill = || Error::IllConditioned { what: what() };
        if self.count < 4 {
            return Err(ill());
        }
        // Scale to unit diagonal so the check ignores feature magnitudes.
        let d = self.gram.diagonal();
        if d.iter().any(|v| !(*v > 0.0)) {
            return Err(ill());
        }
        let s = d.map(|v| 1.0 / v.sqrt());
        let scaled = Matrix4::from_fn(|r, c| self.gram[(r, c)] * s[r] * s[c]);
        let eig = SymmetricEigen::new(scaled).eigenvalues;
        let (lo, hi) = (eig.min(), eig.max());
        if !(lo > MIN_CONDITION_RATIO * hi) {
            return Err(ill());
        }
        let sol = scaled
            .cholesky()
            .map(|ch| ch.solve(&s.component_mul(&self.rhs)))
            .ok_or_else(ill)?
            .component_mul(&s);
        Ok([sol[0], sol[1], sol[2], sol[3]])
    }
}

/// Closed-form affine maps: for each candidate `k` and output colour `c`,
/// least squares of `y^(1/γ_k)` on `x^γ_k` with an intercept.
pub fn least_squares_maps(samples: &SampleSet, gammas: &[f64]) -> Result<Vec<AffineMap>> {
    gammas
        .iter()
        .enumerate()
        .map(|(k, &g)| {
            let mut eqs: [NormalEquations; 3] = Default::default();
            for s in samples.iter() {
                let z = s.x_lin.map(|v| gamma_pow(v, g));
                eqs[s.color as usize].add(z, gamma_pow(s.y.max(0.0), 1.0 / g));
            }
            let mut map = AffineMap::ZERO;
            for (c, e) in eqs.iter().enumerate() {
                let [a0, a1, a2, b] =
                    e.solve(|| format!("candidate {k} (gamma {g}), output colour {c}"))?;
                map.a[c] = [a0, a1, a2];
                map.b[c] = b;
            }
            Ok(map)
        })
        .collect()
}

/// Fits a gamma-mixture model to aligned patch pairs.
pub fn fit(pairs: &[PatchPair], k: usize, gammas: &[f64], cfg: &FitConfig) -> Result<ReverseModel> {
    fit_with_history(pairs, k, gammas, cfg).map(|(m, _)| m)
}

pub fn fit_with_history(
    pairs: &[PatchPair],
    k: usize,
    gammas: &[f64],
    cfg: &FitConfig,
) -> Result<(ReverseModel, FitHistory)> {
    if pairs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if gammas.len() != k {
        return Err(Error::InvalidArgument(format!(
            "K = {k} but {} gammas given",
            gammas.len()
        )));
    }
    let samples = SampleSet::from_pairs(pairs)?;
    fit_samples(&samples, gammas, cfg)
}

/// Alternates the closed-form map solve with projected-gradient steps on
/// the mixture weights, starting from uniform weights.
///
/// Every accepted step strictly lowers the objective, so the recorded
/// sequence is non-increasing and the returned model is the best seen.
pub fn fit_samples(samples: &SampleSet, gammas: &[f64], cfg: &FitConfig) -> Result<(ReverseModel, FitHistory)> {
    cfg.validate()?;
    if samples.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let k = gammas.len();
    let maps = least_squares_maps(samples, gammas)?;
    let mut model = ReverseModel::new(gammas.to_vec(), maps, vec![1.0 / k as f64; k])?;
    let mut best = model.objective(samples, cfg.loss)?;
    let mut history = FitHistory {
        objectives: vec![best],
        iterations: 0,
    };
    if k == 1 {
        return Ok((model, history));
    }
    let mut step = cfg.weight_step;
    for iter in 0..cfg.max_outer_iters {
        history.iterations = iter + 1;
        // The map solve regresses each candidate on the raw targets directly,
        // so it does not move while only the weights change.
        let (_, grad) = model.objective_and_gradient(samples, cfg.loss)?;
        let mut accepted = None;
        let mut trial_step = step;
        for _ in 0..MAX_BACKTRACK {
            let w: Vec<f64> = model
                .weights()
                .iter()
                .zip(&grad.weights)
                .map(|(w, g)| w - trial_step * g)
                .collect();
            let w = project_simplex(&w);
            let mut trial = model.clone();
            trial.set_weights(w);
            let obj = trial.objective(samples, cfg.loss)?;
            if obj < best {
                accepted = Some((trial, obj));
                break;
            }
            trial_step *= 0.5;
        }
        let Some((trial, obj)) = accepted else { break };
        let decrease = best - obj;
        model = trial;
        best = obj;
        history.objectives.push(obj);
        // Let the step grow back after successful iterations.
        step = (trial_step * 2.0).min(cfg.weight_step);
        if decrease < cfg.tol {
            break;
        }
    }
    Ok((model, history))
}
