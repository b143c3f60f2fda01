//! Synthetic RAW/sRGB pairs rendered through the simulated ISP.

use std::f64::consts::TAU;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::manifest::{Device, DevicePair, Manifest, Split};
use super::meta::write_metadata;
use super::raw16::write_raw16;
use super::rgb::write_png;
use crate::error::{Error, Result};
use crate::isp::{forward_isp, IspMetadata};
use crate::raw::{quantize12, PackedRaw, RGGB_COLOR, RGGB_SITES};

pub const SYNTH_MIN: f64 = 0.02;
pub const SYNTH_MAX: f64 = 0.98;

/// A mild white balance and a diagonally dominant, row-stochastic CCM, so
/// every rendered value in `[0.02, 0.98]` stays unclipped.
pub fn default_synth_metadata() -> IspMetadata {
    IspMetadata::new(
        [0.9, 1.0, 0.8],
        [[0.85, 0.1, 0.05], [0.08, 0.84, 0.08], [0.04, 0.12, 0.84]],
        0,
        4095,
    )
    .expect("valid metadata")
}

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub count: usize,
    /// Packed-RAW size; the RGB rendering is twice as large.
    pub height: usize,
    pub width: usize,
    pub seed: u64,
    pub meta: IspMetadata,
    pub split: Split,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            count: 4,
            height: 64,
            width: 64,
            seed: 0,
            meta: default_synth_metadata(),
            split: Split::Test,
        }
    }
}

/// A normalized sum of low-frequency sinusoids around `center`.
struct Field {
    waves: Vec<([f64; 2], f64, f64)>,
    center: f64,
    amp: f64,
}

impl Field {
    fn random(rng: &mut ChaCha8Rng, extent: f64, center: f64, amp: f64) -> Self {
        let waves = (0..6)
            .map(|_| {
                let angle = rng.random_range(0.0..TAU);
                let cycles = rng.random_range(0.5..4.0);
                let k = TAU * cycles / extent;
                ([k * angle.cos(), k * angle.sin()], rng.random_range(0.0..TAU), rng.random_range(0.2..1.0))
            })
            .collect();
        Field { waves, center, amp }
    }

    fn eval(&self, y: f64, x: f64) -> f64 {
        let (mut s, mut norm) = (0.0, 0.0);
        for &([ky, kx], phase, a) in &self.waves {
            s += a * (ky * y + kx * x + phase).sin();
            norm += a;
        }
        (self.center + self.amp * s / norm).clamp(SYNTH_MIN, SYNTH_MAX)
    }
}

/// Smooth packed RAW with samples in `[0.02, 0.98]`, quantized to 12 bits.
/// Every site is sampled from its colour's field at full sensor resolution.
pub fn synth_raw(rng: &mut ChaCha8Rng, height: usize, width: usize) -> PackedRaw {
    let extent = (2 * height.max(width)) as f64;
    let base: f64 = rng.random_range(0.15..0.85);
    let fields: Vec<Field> = (0..3)
        .map(|_| {
            let center = (base + rng.random_range(-0.1..0.1)).clamp(0.1, 0.9);
            let room = (center - SYNTH_MIN).min(SYNTH_MAX - center);
            let amp = room * rng.random_range(0.4..1.0);
            Field::random(rng, extent, center, amp)
        })
        .collect();
    let mut data = Vec::with_capacity(height * width * 4);
    for i in 0..height {
        for j in 0..width {
            for (c, (dy, dx)) in RGGB_SITES.into_iter().enumerate() {
                data.push(fields[RGGB_COLOR[c]].eval((2 * i + dy) as f64, (2 * j + dx) as f64));
            }
        }
    }
    quantize12(&PackedRaw::new(height, width, data).expect("in-range samples"))
}

/// Devices cycle iPhoneX, SamsungS9, then alternately SamsungS21 / VivoX90,
/// so two thirds of the entries are target-device images.
pub fn synth_device(i: usize) -> Device {
    match i % 3 {
        0 => Device::IPhoneX,
        1 => Device::SamsungS9,
        _ if (i / 3) % 2 == 0 => Device::SamsungS21,
        _ => Device::VivoX90,
    }
}

/// Writes `<id>.png`, `<id>.raw16`, `<id>.meta.json` for each image and a
/// `manifest.json` into `dir`. Identical configs give identical bytes.
pub fn synth_dataset(dir: &Path, cfg: &SynthConfig) -> Result<Manifest> {
    if cfg.count == 0 {
        return Err(Error::InvalidArgument("synthetic dataset needs at least one image".into()));
    }
    if cfg.height < 2 || cfg.width < 2 {
        return Err(Error::InvalidArgument("synthetic images must be at least 2x2 packed".into()));
    }
    cfg.meta.validate()?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let seeds: Vec<u64> = (0..cfg.count).map(|_| rng.random()).collect();
    let mut entries = Vec::with_capacity(cfg.count);
    for (i, seed) in seeds.into_iter().enumerate() {
        let id = format!("img_{i:04}");
        let raw = synth_raw(&mut ChaCha8Rng::seed_from_u64(seed), cfg.height, cfg.width);
        let rgb = forward_isp(&raw, &cfg.meta)?;
        let mut e = DevicePair::new(
            id.clone(),
            synth_device(i),
            format!("{id}.png").into(),
            format!("{id}.raw16").into(),
        )?;
        e.meta_path = Some(format!("{id}.meta.json").into());
        write_png(&dir.join(&e.rgb_path), &rgb)?;
        write_raw16(&dir.join(&e.raw_path), &raw)?;
        write_metadata(&dir.join(e.meta_path.as_ref().unwrap()), &cfg.meta)?;
        entries.push(e);
    }
    let manifest = Manifest::new(cfg.split, entries, dir)?;
    manifest.write(&dir.join("manifest.json"))?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isp::inverse_isp;
    use crate::metrics::psnr;

    #[test]
    fn values_stay_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let p = synth_raw(&mut rng, 16, 24);
            assert!(p.as_slice().iter().all(|&v| (SYNTH_MIN - 1e-3..=SYNTH_MAX + 1e-3).contains(&v)));
        }
    }

    #[test]
    fn rendering_is_unclipped_and_invertible() {
        let meta = default_synth_metadata();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..3 {
            let raw = synth_raw(&mut rng, 64, 64);
            let rgb = forward_isp(&raw, &meta).unwrap();
            let back = inverse_isp(&rgb, &meta).unwrap();
            let p = psnr(&back, &raw).unwrap();
            assert!(p >= 45.0, "psnr {p}");
        }
    }

    #[test]
    fn device_cycle() {
        let names: Vec<String> = (0..6).map(|i| synth_device(i).to_string()).collect();
        assert_eq!(names, ["iPhoneX", "SamsungS9", "SamsungS21", "iPhoneX", "SamsungS9", "VivoX90"]);
    }

    #[test]
    fn same_seed_same_bytes() {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let cfg = SynthConfig {
            count: 2,
            height: 16,
            width: 16,
            seed: 42,
            ..Default::default()
        };
        synth_dataset(a.path(), &cfg).unwrap();
        let m = synth_dataset(b.path(), &cfg).unwrap();
        for name in ["manifest.json", "img_0000.png", "img_0001.raw16", "img_0001.meta.json"] {
            assert_eq!(
                std::fs::read(a.path().join(name)).unwrap(),
                std::fs::read(b.path().join(name)).unwrap(),
                "{name}"
            );
        }
        let loaded = Manifest::load(&b.path().join("manifest.json")).unwrap();
        assert_eq!(loaded.entries, m.entries);
        let e = &loaded.entries[1];
        assert_eq!(loaded.load_meta(e).unwrap(), Some(cfg.meta));
        assert_eq!(loaded.load_rgb(e).unwrap().height(), 32);
        assert!(synth_dataset(a.path(), &SynthConfig { count: 0, ..cfg }).is_err());
    }
}
