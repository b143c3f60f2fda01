//! Metadata-free reverse ISP models.
//!
//! [`ReverseModel`] is a K-candidate gamma mixture. For an sRGB pixel `x`
//! (decoded to linear) candidate `k` predicts, for output colour `c`,
//!
//! ```text
//! r_k = clamp(A_k[c] · x^γ_k + b_k[c], 0, 1)      (gamma domain)
//! ŷ_k = r_k^γ_k                                  (relinearized)
//! ŷ   = Σ_k w_k ŷ_k,   w on the probability simplex
//! ```
//!
//! and every Bayer site reads the colour of its own channel.

mod fit;
mod global;
mod sampling;
mod serial;
mod simplex;

pub use fit::{fit, fit_samples, fit_with_history, least_squares_maps, FitConfig, FitHistory};
pub use global::fit_global_matrix;
pub use sampling::{stratified_indices, stratified_sample, PatchPair, Sample, SampleSet};
pub use serial::{ModelFile, MODEL_FORMAT_VERSION};
pub use simplex::project_simplex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::isp::{gamma_pow, inverse_isp_linear_cfa, srgb_decode, ColorTransform, IspMetadata};
use crate::losses::PointLoss;
use crate::raw::{quantize12_vec, PackedRaw, RgbImage, RGGB_COLOR, RGGB_SITES};

/// Anything that turns an sRGB image into packed RAW.
pub trait Predictor {
    /// Prediction before 12-bit quantization, as a row-major
    /// `(H/2) × (W/2) × 4` buffer, where packed channel `k` carries colour
    /// `cfa[k]` (0 = R, 1 = G, 2 = B) sampled at site `RGGB_SITES[k]`.
    fn predict_linear_cfa(&self, img: &RgbImage, cfa: [usize; 4]) -> Result<Vec<f64>>;

    fn predict_linear(&self, img: &RgbImage) -> Result<Vec<f64>> {
        self.predict_linear_cfa(img, RGGB_COLOR)
    }

    fn predict(&self, img: &RgbImage) -> Result<PackedRaw> {
        let lin = self.predict_linear(img)?;
        Ok(quantize12_vec(img.height() / 2, img.width() / 2, lin))
    }
}

impl Predictor for IspMetadata {
    fn predict_linear_cfa(&self, img: &RgbImage, cfa: [usize; 4]) -> Result<Vec<f64>> {
        inverse_isp_linear_cfa(img, self, cfa)
    }
}

impl Predictor for ColorTransform {
    fn predict_linear_cfa(&self, img: &RgbImage, cfa: [usize; 4]) -> Result<Vec<f64>> {
        inverse_isp_linear_cfa(img, &self.as_metadata(), cfa)
    }
}

/// Affine colour map `A z + b` of one gamma candidate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    /// Row-major.
    pub a: [[f64; 3]; 3],
    pub b: [f64; 3],
}

impl AffineMap {
    pub const IDENTITY: AffineMap = AffineMap {
        a: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        b: [0.0; 3],
    };

    pub const ZERO: AffineMap = AffineMap {
        a: [[0.0; 3]; 3],
        b: [0.0; 3],
    };

    /// Output row `c` before clamping.
    #[inline]
    pub fn row(&self, c: usize, z: [f64; 3]) -> f64 {
        let a = &self.a[c];
        a[0] * z[0] + a[1] * z[1] + a[2] * z[2] + self.b[c]
    }

    pub fn frobenius_distance(&self, other: &AffineMap) -> (f64, f64) {
        let mut da = 0.0;
        let mut db = 0.0;
        for r in 0..3 {
            for c in 0..3 {
                da += (self.a[r][c] - other.a[r][c]).powi(2);
            }
            db += (self.b[r] - other.b[r]).powi(2);
        }
        (da.sqrt(), db.sqrt())
    }
}

/// Gamma-mixture reverse model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReverseModel {
    gammas: Vec<f64>,
    maps: Vec<AffineMap>,
    weights: Vec<f64>,
}

/// Tolerance on `Σ w = 1`.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// Default candidate set: linear, TDMFNet's 2.2, and the sRGB-like 2.4.
pub const DEFAULT_GAMMAS: [f64; 3] = [1.0, 2.2, 2.4];

impl ReverseModel {
    pub fn new(gammas: Vec<f64>, maps: Vec<AffineMap>, weights: Vec<f64>) -> Result<Self> {
        let k = gammas.len();
        if k == 0 {
            return Err(Error::InvalidArgument("model needs at least one candidate".into()));
        }
        if maps.len() != k || weights.len() != k {
            return Err(Error::InvalidArgument(format!(
                "{k} gammas but {} maps and {} weights",
                maps.len(),
                weights.len()
            )));
        }
        if let Some(g) = gammas.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
            return Err(Error::InvalidArgument(format!("gamma {g} is not positive")));
        }
        check_simplex(&weights)?;
        let finite = maps
            .iter()
            .all(|m| m.a.iter().flatten().chain(&m.b).all(|v| v.is_finite()));
        if !finite {
            return Err(Error::InvalidArgument("non-finite map coefficient".into()));
        }
        Ok(ReverseModel {
            gammas,
            maps,
            weights,
        })
    }

    /// Single linear candidate with an identity map: the identity pipeline.
    pub fn identity() -> Self {
        ReverseModel {
            gammas: vec![1.0],
            maps: vec![AffineMap::IDENTITY],
            weights: vec![1.0],
        }
    }

    pub fn k(&self) -> usize {
        self.gammas.len()
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn maps(&self) -> &[AffineMap] {
        &self.maps
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub(crate) fn set_weights(&mut self, w: Vec<f64>) {
        debug_assert!(check_simplex(&w).is_ok());
        self.weights = w;
    }

    /// Gamma-domain input `x^γ_k` of candidate `k`.
    #[inline]
    fn candidate_input(&self, k: usize, x_lin: [f64; 3]) -> [f64; 3] {
        let g = self.gammas[k];
        x_lin.map(|v| gamma_pow(v, g))
    }

    /// Relinearized output `ŷ_k` of candidate `k` for colour `c`.
    #[inline]
    pub fn candidate_output(&self, k: usize, x_lin: [f64; 3], c: usize) -> f64 {
        let r = self.maps[k]
            .row(c, self.candidate_input(k, x_lin))
            .clamp(0.0, 1.0);
        gamma_pow(r, self.gammas[k])
    }

    /// Blended linear output for colour `c`.
    #[inline]
    pub fn blend(&self, x_lin: [f64; 3], c: usize) -> f64 {
        let mut y = 0.0;
        for k in 0..self.k() {
            y += self.weights[k] * self.candidate_output(k, x_lin, c);
        }
        y
    }

    /// Loss over a sample set and its gradient with respect to every
    /// parameter. Clamped candidates contribute a zero subgradient.
    pub fn objective_and_gradient(&self, samples: &SampleSet, loss: PointLoss) -> Result<(f64, Gradient)> {
        if samples.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let k = self.k();
        let mut grad = Gradient {
            weights: vec![0.0; k],
            maps: vec![AffineMap::ZERO; k],
        };
        let mut total = 0.0;
        let mut outputs = vec![0.0; k];
        let mut slopes = vec![0.0; k];
        let mut inputs = vec![[0.0; 3]; k];
        for s in samples.iter() {
            let c = s.color as usize;
            let mut y = 0.0;
            for j in 0..k {
                let z = self.candidate_input(j, s.x_lin);
                let pre = self.maps[j].row(c, z);
                let g = self.gammas[j];
                let (out, slope) = if pre <= 0.0 || pre >= 1.0 {
                    (gamma_pow(pre.clamp(0.0, 1.0), g), 0.0)
                } else {
                    (gamma_pow(pre, g), g * gamma_pow(pre, g - 1.0))
                };
                outputs[j] = out;
                slopes[j] = slope;
                inputs[j] = z;
                y += self.weights[j] * out;
            }
            total += loss.value(y, s.y);
            let dl = loss.derivative(y, s.y);
            if dl == 0.0 {
                continue;
            }
            for j in 0..k {
                grad.weights[j] += dl * outputs[j];
                let chain = dl * self.weights[j] * slopes[j];
                if chain != 0.0 {
                    let row = &mut grad.maps[j].a[c];
                    for (r, z) in row.iter_mut().zip(inputs[j]) {
                        *r += chain * z;
                    }
                    grad.maps[j].b[c] += chain;
                }
            }
        }
        let n = samples.len() as f64;
        grad.scale(1.0 / n);
        Ok((total / n, grad))
    }

    /// Loss only; same reduction order as [`Self::objective_and_gradient`].
    pub fn objective(&self, samples: &SampleSet, loss: PointLoss) -> Result<f64> {
        if samples.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut total = 0.0;
        for s in samples.iter() {
            total += loss.value(self.blend(s.x_lin, s.color as usize), s.y);
        }
        Ok(total / samples.len() as f64)
    }

    /// Flattened parameter vector: per candidate the nine `A` entries
    /// (row-major) then the three `b` entries, followed by the K weights.
    pub fn to_params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.k() * 13);
        for m in &self.maps {
            p.extend(m.a.iter().flatten());
            p.extend(m.b);
        }
        p.extend(&self.weights);
        p
    }

    /// Inverse of [`Self::to_params`]. Weights are taken as given, without
    /// projecting onto the simplex, so finite differences can probe any
    /// direction.
    pub fn with_params(&self, params: &[f64]) -> ReverseModel {
        let k = self.k();
        assert_eq!(params.len(), k * 13, "parameter vector length");
        let maps = (0..k)
            .map(|j| {
                let p = &params[j * 12..(j + 1) * 12];
                AffineMap {
                    a: [[p[0], p[1], p[2]], [p[3], p[4], p[5]], [p[6], p[7], p[8]]],
                    b: [p[9], p[10], p[11]],
                }
            })
            .collect();
        ReverseModel {
            gammas: self.gammas.clone(),
            maps,
            weights: params[k * 12..].to_vec(),
        }
    }
}

impl Predictor for ReverseModel {
    fn predict_linear_cfa(&self, img: &RgbImage, cfa: [usize; 4]) -> Result<Vec<f64>> {
        if cfa.iter().any(|&c| c > 2) {
            return Err(Error::InvalidArgument(format!("bad CFA colours {cfa:?}")));
        }
        let (ph, pw) = (img.height() / 2, img.width() / 2);
        let mut out = vec![0.0; ph * pw * 4];
        crate::isp::for_each_row(&mut out, pw * 4, |i, row| {
            for j in 0..pw {
                for (ch, (dy, dx)) in RGGB_SITES.into_iter().enumerate() {
                    let x_lin = img.pixel(2 * i + dy, 2 * j + dx).map(srgb_decode);
                    row[j * 4 + ch] = self.blend(x_lin, cfa[ch]);
                }
            }
        });
        Ok(out)
    }
}

fn check_simplex(w: &[f64]) -> Result<()> {
    let sum: f64 = w.iter().sum();
    if w.iter().any(|v| !(*v >= 0.0)) || (sum - 1.0).abs() > SIMPLEX_TOL {
        return Err(Error::InvalidArgument(format!(
            "weights {w:?} are not on the probability simplex"
        )));
    }
    Ok(())
}

/// Gradient of the objective, laid out like the model.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub weights: Vec<f64>,
    pub maps: Vec<AffineMap>,
}

impl Gradient {
    fn scale(&mut self, s: f64) {
        self.weights.iter_mut().for_each(|v| *v *= s);
        for m in &mut self.maps {
            m.a.iter_mut().flatten().for_each(|v| *v *= s);
            m.b.iter_mut().for_each(|v| *v *= s);
        }
    }

    /// Same layout as [`ReverseModel::to_params`].
    pub fn to_vec(&self) -> Vec<f64> {
        let mut p = Vec::new();
        for m in &self.maps {
            p.extend(m.a.iter().flatten());
            p.extend(m.b);
        }
        p.extend(&self.weights);
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isp::inverse_isp;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_rgb(rng: &mut ChaCha8Rng, h: usize, w: usize) -> RgbImage {
        RgbImage::new(h, w, (0..h * w * 3).map(|_| rng.random()).collect()).unwrap()
    }

    #[test]
    fn identity_model_matches_identity_inverse_isp_bitwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let img = random_rgb(&mut rng, 32, 24);
        let a = ReverseModel::identity().predict(&img).unwrap();
        let b = inverse_isp(&img, &IspMetadata::identity()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn simplex_vertex_selects_one_candidate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let img = random_rgb(&mut rng, 8, 8);
        let map2 = AffineMap {
            a: [[0.8, 0.1, 0.0], [0.0, 0.9, 0.1], [0.1, 0.0, 0.7]],
            b: [0.01, 0.0, 0.02],
        };
        let mixed = ReverseModel::new(vec![1.0, 2.2], vec![AffineMap::IDENTITY, map2], vec![1.0, 0.0]).unwrap();
        let alone = ReverseModel::new(vec![1.0], vec![AffineMap::IDENTITY], vec![1.0]).unwrap();
        assert_eq!(mixed.predict(&img).unwrap(), alone.predict(&img).unwrap());

        let mixed = ReverseModel::new(vec![1.0, 2.2], vec![AffineMap::IDENTITY, map2], vec![0.0, 1.0]).unwrap();
        let alone = ReverseModel::new(vec![2.2], vec![map2], vec![1.0]).unwrap();
        assert_eq!(mixed.predict(&img).unwrap(), alone.predict(&img).unwrap());
    }

    #[test]
    fn two_candidate_pixel_matches_scalar_oracle() {
        let m1 = AffineMap {
            a: [[0.9, 0.05, 0.0], [0.1, 0.8, 0.05], [0.0, 0.1, 0.85]],
            b: [0.01, 0.02, 0.0],
        };
        let m2 = AffineMap {
            a: [[0.7, 0.2, 0.05], [0.05, 0.9, 0.0], [0.1, 0.1, 0.6]],
            b: [0.0, 0.01, 0.03],
        };
        let model = ReverseModel::new(vec![1.0, 2.2], vec![m1, m2], vec![0.6, 0.4]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let img = random_rgb(&mut rng, 4, 6);
        let lin = model.predict_linear(&img).unwrap();
        // Hand-composed formula for the B site of packed pixel (1, 2).
        let px = img.pixel(3, 5);
        let dec = |v: f64| {
            if v <= 0.04045 {
                v / 12.92
            } else {
                ((v + 0.055) / 1.055).powf(2.4)
            }
        };
        let x = [dec(px[0]), dec(px[1]), dec(px[2])];
        let c1 = (0.0 * x[0] + 0.1 * x[1] + 0.85 * x[2] + 0.0).clamp(0.0, 1.0);
        let z = [x[0].powf(2.2), x[1].powf(2.2), x[2].powf(2.2)];
        let c2 = (0.1 * z[0] + 0.1 * z[1] + 0.6 * z[2] + 0.03).clamp(0.0, 1.0).powf(2.2);
        let oracle = 0.6 * c1 + 0.4 * c2;
        let got = lin[(1 * 3 + 2) * 4 + 3];
        assert!((got - oracle).abs() < 1e-14, "{got} vs {oracle}");
        let q = model.predict(&img).unwrap();
        assert!((q.get(1, 2, 3) - oracle).abs() <= 0.5 / 4095.0 + 1e-15);
    }

    #[test]
    fn invalid_models_rejected() {
        let m = AffineMap::IDENTITY;
        assert!(ReverseModel::new(vec![], vec![], vec![]).is_err());
        assert!(ReverseModel::new(vec![1.0], vec![m], vec![0.9]).is_err());
        assert!(ReverseModel::new(vec![1.0, 2.0], vec![m, m], vec![1.2, -0.2]).is_err());
        assert!(ReverseModel::new(vec![0.0], vec![m], vec![1.0]).is_err());
        assert!(ReverseModel::new(vec![1.0], vec![m, m], vec![1.0]).is_err());
    }

    #[test]
    fn params_round_trip() {
        let model = ReverseModel::new(
            vec![1.0, 2.2],
            vec![AffineMap::IDENTITY, AffineMap { a: [[0.5; 3]; 3], b: [0.1, 0.2, 0.3] }],
            vec![0.25, 0.75],
        )
        .unwrap();
        assert_eq!(model.with_params(&model.to_params()), model);
    }
}
