//! PSNR and SSIM in the normalized 12-bit packed-RAW domain (peak = 1).

use crate::error::{Error, Result};
use crate::raw::PackedRaw;

/// Borrowed row-major, channel-interleaved image buffer. Unlike the owned
/// image types it does not require samples to lie in `[0, 1]`.
#[derive(Debug, Clone, Copy)]
pub struct ImageView<'a> {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
    pub data: &'a [f64],
}

impl<'a> ImageView<'a> {
    pub fn new(height: usize, width: usize, channels: usize, data: &'a [f64]) -> Result<Self> {
        if height * width * channels != data.len() {
            return Err(Error::Dimension(format!(
                "{height}x{width}x{channels} view over {} samples",
                data.len()
            )));
        }
        Ok(ImageView {
            height,
            width,
            channels,
            data,
        })
    }

    pub(crate) fn same_shape(&self, other: &ImageView<'_>) -> Result<()> {
        if (self.height, self.width, self.channels) != (other.height, other.width, other.channels)
        {
            return Err(Error::Dimension(format!(
                "shape mismatch: {}x{}x{} vs {}x{}x{}",
                self.height, self.width, self.channels, other.height, other.width, other.channels
            )));
        }
        Ok(())
    }
}

impl<'a> From<&'a PackedRaw> for ImageView<'a> {
    fn from(p: &'a PackedRaw) -> Self {
        ImageView {
            height: p.height(),
            width: p.width(),
            channels: PackedRaw::CHANNELS,
            data: p.as_slice(),
        }
    }
}

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;

/// Peak signal-to-noise ratio with peak 1. Identical inputs give
/// `f64::INFINITY`.
pub fn psnr(a: &PackedRaw, b: &PackedRaw) -> Result<f64> {
    psnr_view(a.into(), b.into())
}

pub fn psnr_view(a: ImageView<'_>, b: ImageView<'_>) -> Result<f64> {
    a.same_shape(&b)?;
    let mse = crate::losses::mse(a.data, b.data)?;
    Ok(if mse == 0.0 {
        f64::INFINITY
    } else {
        -10.0 * mse.log10()
    })
}

/// Normalized 1-D Gaussian taps; the 2-D window is their outer product.
pub fn gaussian_taps(size: usize, sigma: f64) -> Vec<f64> {
    let center = (size as f64 - 1.0) / 2.0;
    let raw: Vec<f64> = (0..size)
        .map(|i| {
            let d = i as f64 - center;
            (-(d * d) / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / sum).collect()
}

/// Mean SSIM over the four packed channels.
pub fn ssim(a: &PackedRaw, b: &PackedRaw) -> Result<f64> {
    ssim_view(a.into(), b.into())
}

/// Per-channel SSIM over every fully contained window ("valid" placement),
/// averaged over windows and then over channels.
pub fn ssim_view(a: ImageView<'_>, b: ImageView<'_>) -> Result<f64> {
    a.same_shape(&b)?;
    if a.height < SSIM_WINDOW || a.width < SSIM_WINDOW {
        return Err(Error::Dimension(format!(
            "ssim needs at least {SSIM_WINDOW}x{SSIM_WINDOW}, got {}x{}",
            a.height, a.width
        )));
    }
    let taps = gaussian_taps(SSIM_WINDOW, SSIM_SIGMA);
    let c1 = (SSIM_K1 * 1.0).powi(2);
    let c2 = (SSIM_K2 * 1.0).powi(2);
    let (h, w, ch) = (a.height, a.width, a.channels);
    let (oh, ow) = (h - SSIM_WINDOW + 1, w - SSIM_WINDOW + 1);

    let mut total = 0.0;
    for c in 0..ch {
        let x: Vec<f64> = a.data.iter().skip(c).step_by(ch).copied().collect();
        let y: Vec<f64> = b.data.iter().skip(c).step_by(ch).copied().collect();
        let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
        let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
        let xy: Vec<f64> = x.iter().zip(&y).map(|(p, q)| p * q).collect();

        let mu_x = filter_valid(&x, h, w, &taps);
        let mu_y = filter_valid(&y, h, w, &taps);
        let e_xx = filter_valid(&xx, h, w, &taps);
        let e_yy = filter_valid(&yy, h, w, &taps);
        let e_xy = filter_valid(&xy, h, w, &taps);

        let mut sum = 0.0;
        for i in 0..oh * ow {
            let (mx, my) = (mu_x[i], mu_y[i]);
            let sxx = e_xx[i] - mx * mx;
            let syy = e_yy[i] - my * my;
            let sxy = e_xy[i] - mx * my;
            let num = (2.0 * mx * my + c1) * (2.0 * sxy + c2);
            let den = (mx * mx + my * my + c1) * (sxx + syy + c2);
            sum += num / den;
        }
        total += sum / (oh * ow) as f64;
    }
    Ok((total / ch as f64).clamp(-1.0, 1.0))
}

/// Separable correlation keeping only fully covered positions.
fn filter_valid(src: &[f64], h: usize, w: usize, taps: &[f64]) -> Vec<f64> {
    let k = taps.len();
    let ow = w - k + 1;
    let oh = h - k + 1;
    let mut rows = vec![0.0; h * ow];
    for y in 0..h {
        let line = &src[y * w..(y + 1) * w];
        for x in 0..ow {
            rows[y * ow + x] = taps.iter().zip(&line[x..x + k]).map(|(t, v)| t * v).sum();
        }
    }
    let mut out = vec![0.0; oh * ow];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = taps
                .iter()
                .enumerate()
                .map(|(i, t)| t * rows[(y + i) * ow + x])
                .sum();
        }
    }
    out
}
