//! Browser bindings for the demo page in `www/`.
//!
//! Three interactive pieces: a synthetic scene rendered through the
//! simulated ISP and inverted again, the gamma-mixture transfer curves, and
//! the Bayer-aware dihedral transforms of a packed RAW image.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use revisp::io::{default_synth_metadata, synth_raw};
use revisp::isp::{forward_isp, inverse_isp, power_gamma, srgb_encode, GammaDirection, IspMetadata};
use revisp::metrics::{psnr, ssim};
use revisp::model::project_simplex;
use revisp::raw::{dihedral_mosaic, dihedral_packed, pack_rggb, unpack_rggb, Mosaic, RGGB_COLOR};
use revisp::{DihedralIndex, PackedRaw, RgbImage};
use wasm_bindgen::prelude::*;

const MAX_SIZE: u32 = 512;

fn js(e: revisp::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn to_byte(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

fn scene(seed: u32, size: u32) -> revisp::Result<PackedRaw> {
    if !(4..=MAX_SIZE).contains(&size) {
        return Err(revisp::Error::InvalidArgument(format!("size must be in 4..={MAX_SIZE}, got {size}")));
    }
    let s = size as usize;
    Ok(synth_raw(&mut ChaCha8Rng::seed_from_u64(seed.into()), s, s))
}

/// Mosaic shown in false colour: each site lit in its filter's colour,
/// sRGB-encoded for display.
pub fn mosaic_rgba(m: &Mosaic) -> Vec<u8> {
    let mut out = Vec::with_capacity(m.height() * m.width() * 4);
    for y in 0..m.height() {
        for x in 0..m.width() {
            let mut px = [0, 0, 0, 255];
            px[RGGB_COLOR[(y % 2) * 2 + x % 2]] = to_byte(srgb_encode(m.get(y, x)));
            out.extend(px);
        }
    }
    out
}

fn rgb_rgba(img: &RgbImage) -> Vec<u8> {
    img.as_slice()
        .chunks_exact(3)
        .flat_map(|p| [to_byte(p[0]), to_byte(p[1]), to_byte(p[2]), 255])
        .collect()
}

#[wasm_bindgen]
pub struct RoundTrip {
    raw: PackedRaw,
    rgb: RgbImage,
    recovered: PackedRaw,
}

impl RoundTrip {
    pub fn build(seed: u32, size: u32, wb_r: f64, wb_b: f64) -> revisp::Result<RoundTrip> {
        let raw = scene(seed, size)?;
        let base = default_synth_metadata();
        let meta = IspMetadata::new([wb_r, base.wb_gains[1], wb_b], base.ccm, base.black_level, base.white_level)?;
        let rgb = forward_isp(&raw, &meta)?;
        let recovered = inverse_isp(&rgb, &meta)?;
        Ok(RoundTrip { raw, rgb, recovered })
    }
}

#[wasm_bindgen]
impl RoundTrip {
    /// Packed size `size`×`size`; the sRGB rendering is twice that.
    #[wasm_bindgen(constructor)]
    pub fn new(seed: u32, size: u32, wb_r: f64, wb_b: f64) -> Result<RoundTrip, JsError> {
        Self::build(seed, size, wb_r, wb_b).map_err(js)
    }

    /// Full sensor resolution, the size of every image below.
    pub fn width(&self) -> u32 {
        self.rgb.width() as u32
    }

    pub fn height(&self) -> u32 {
        self.rgb.height() as u32
    }

    pub fn srgb_rgba(&self) -> Vec<u8> {
        rgb_rgba(&self.rgb)
    }

    pub fn raw_rgba(&self) -> Vec<u8> {
        mosaic_rgba(&unpack_rggb(&self.raw))
    }

    /// Absolute RAW error of the recovered image, scaled by `gain`.
    pub fn error_rgba(&self, gain: f64) -> Vec<u8> {
        let (truth, rec) = (unpack_rggb(&self.raw), unpack_rggb(&self.recovered));
        truth
            .as_slice()
            .iter()
            .zip(rec.as_slice())
            .flat_map(|(a, b)| {
                let v = to_byte((a - b).abs() * gain);
                [v, v, v, 255]
            })
            .collect()
    }

    pub fn psnr(&self) -> f64 {
        psnr(&self.recovered, &self.raw).unwrap_or(f64::NAN)
    }

    /// NaN for scenes smaller than the SSIM window.
    pub fn ssim(&self) -> f64 {
        ssim(&self.recovered, &self.raw).unwrap_or(f64::NAN)
    }
}

/// Sampled curves `x^γ` for every gamma followed by their weighted blend,
/// `samples` values each. Weights are first projected onto the simplex.
pub fn sample_gamma_curves(gammas: &[f64], weights: &[f64], samples: usize) -> revisp::Result<Vec<f64>> {
    if gammas.is_empty() || gammas.len() != weights.len() || samples < 2 {
        return Err(revisp::Error::InvalidArgument(
            "need matching non-empty gammas and weights and at least 2 samples".into(),
        ));
    }
    let w = project_simplex(weights);
    let xs: Vec<f64> = (0..samples).map(|i| i as f64 / (samples - 1) as f64).collect();
    let mut out = Vec::with_capacity((gammas.len() + 1) * samples);
    for &g in gammas {
        for &x in &xs {
            out.push(power_gamma(x, g, GammaDirection::Apply)?);
        }
    }
    for i in 0..samples {
        out.push((0..gammas.len()).map(|k| w[k] * out[k * samples + i]).sum());
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn gamma_curves(gammas: Vec<f64>, weights: Vec<f64>, samples: u32) -> Result<Vec<f64>, JsError> {
    sample_gamma_curves(&gammas, &weights, samples as usize).map_err(js)
}

#[wasm_bindgen]
pub fn simplex_weights(weights: Vec<f64>) -> Vec<f64> {
    if weights.is_empty() {
        return weights;
    }
    project_simplex(&weights)
}

pub fn dihedral_scene(seed: u32, size: u32, t: u8) -> revisp::Result<(PackedRaw, DihedralIndex)> {
    let t = DihedralIndex::new(t)?;
    Ok((dihedral_packed(&scene(seed, size)?, t), t))
}

/// False-colour mosaic of the scene after transform `t` (0..8: bit 0
/// horizontal flip, bit 1 vertical flip, bit 2 transpose).
#[wasm_bindgen]
pub fn dihedral_view(seed: u32, size: u32, t: u8) -> Result<Vec<u8>, JsError> {
    let (p, _) = dihedral_scene(seed, size, t).map_err(js)?;
    Ok(mosaic_rgba(&unpack_rggb(&p)))
}

/// Whether the packed transform equals transforming the full mosaic.
#[wasm_bindgen]
pub fn dihedral_matches_mosaic(seed: u32, size: u32, t: u8) -> Result<bool, JsError> {
    let (p, t) = dihedral_scene(seed, size, t).map_err(js)?;
    let src = scene(seed, size).map_err(js)?;
    Ok(p == pack_rggb(&dihedral_mosaic(&unpack_rggb(&src), t)))
}
