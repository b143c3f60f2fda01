//! Mosaiced and packed RAW representations.
//!
//! A [`Mosaic`] is the full-resolution single-plane sensor image in RGGB
//! order. [`PackedRaw`] groups every 2×2 Bayer block into one pixel with
//! four channels ordered `[R, G1, G2, B]`, i.e. block raster order:
//!
//! ```text
//!   (2i, 2j)   -> R     (2i, 2j+1)   -> G1
//!   (2i+1, 2j) -> G2    (2i+1, 2j+1) -> B
//! ```
//!
//! All sample buffers are row-major and channel-interleaved. Samples are
//! normalized so that 1.0 is the 12-bit code 4095.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest 12-bit code.
pub const MAX_CODE: u16 = 4095;
const MAX_CODE_F: f64 = MAX_CODE as f64;

/// Channel index of each packed plane.
pub const CH_R: usize = 0;
pub const CH_G1: usize = 1;
pub const CH_G2: usize = 2;
pub const CH_B: usize = 3;

/// Offsets `(dy, dx)` of each packed channel inside its 2×2 block.
pub const RGGB_SITES: [(usize, usize); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];

/// RGB color index (0 = R, 1 = G, 2 = B) carried by each packed channel.
pub const RGGB_COLOR: [usize; 4] = [0, 1, 1, 2];

/// Bayer colour filter layout. Data is standardized to RGGB, so this is the
/// only accepted pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BayerPattern {
    #[default]
    Rggb,
}

impl FromStr for BayerPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "RGGB" => Ok(BayerPattern::Rggb),
            other => Err(Error::InvalidArgument(format!(
                "unsupported Bayer pattern {other}, only RGGB is accepted"
            ))),
        }
    }
}

fn check_samples(data: &[f64]) -> Result<()> {
    match data
        .iter()
        .position(|v| !v.is_finite() || *v < 0.0 || *v > 1.0)
    {
        Some(index) => Err(Error::Range {
            index,
            value: data[index],
        }),
        None => Ok(()),
    }
}

fn check_len(what: &str, h: usize, w: usize, c: usize, len: usize) -> Result<()> {
    if h == 0 || w == 0 {
        return Err(Error::Dimension(format!("{what} must be non-empty, got {h}x{w}")));
    }
    if h * w * c != len {
        return Err(Error::Dimension(format!(
            "{what} {h}x{w}x{c} needs {} samples, got {len}",
            h * w * c
        )));
    }
    Ok(())
}

fn check_even(what: &str, h: usize, w: usize) -> Result<()> {
    if h % 2 != 0 || w % 2 != 0 {
        return Err(Error::Dimension(format!(
            "{what} dimensions must be even, got {h}x{w}"
        )));
    }
    Ok(())
}

/// Full-resolution RGGB sensor image.
#[derive(Debug, Clone, PartialEq)]
pub struct Mosaic {
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl Mosaic {
    pub fn new(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        check_len("mosaic", height, width, 1, data.len())?;
        check_even("mosaic", height, width)?;
        check_samples(&data)?;
        Ok(Mosaic {
            height,
            width,
            data,
        })
    }

    /// Builds a mosaic declared with the given pattern name.
    pub fn with_pattern(height: usize, width: usize, data: Vec<f64>, pattern: &str) -> Result<Self> {
        let BayerPattern::Rggb = pattern.parse::<BayerPattern>()?;
        Self::new(height, width, data)
    }

    pub(crate) fn from_parts(height: usize, width: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(height * width, data.len());
        Mosaic {
            height,
            width,
            data,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn pattern(&self) -> BayerPattern {
        BayerPattern::Rggb
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize) -> f64 {
        self.data[y * self.width + x]
    }
}

/// Half-resolution four-channel RAW, channels `[R, G1, G2, B]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PackedRaw {
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl PackedRaw {
    pub const CHANNELS: usize = 4;

    pub fn new(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        check_len("packed raw", height, width, 4, data.len())?;
        check_samples(&data)?;
        Ok(PackedRaw {
            height,
            width,
            data,
        })
    }

    pub fn zeros(height: usize, width: usize) -> Self {
        PackedRaw {
            height,
            width,
            data: vec![0.0; height * width * 4],
        }
    }

    /// Builds from integer 12-bit codes, `c -> c / 4095`.
    pub fn from_codes(height: usize, width: usize, codes: &[u16]) -> Result<Self> {
        check_len("packed raw", height, width, 4, codes.len())?;
        if let Some(index) = codes.iter().position(|&c| c > MAX_CODE) {
            return Err(Error::Range {
                index,
                value: f64::from(codes[index]),
            });
        }
        Ok(PackedRaw {
            height,
            width,
            data: codes.iter().map(|&c| dequantize_code(c)).collect(),
        })
    }

    pub(crate) fn from_parts(height: usize, width: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(height * width * 4, data.len());
        PackedRaw {
            height,
            width,
            data,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize, c: usize) -> f64 {
        self.data[(y * self.width + x) * 4 + c]
    }

    /// 12-bit codes of every sample after quantization.
    pub fn to_codes(&self) -> Vec<u16> {
        self.data.iter().map(|&v| quantize_code(v)).collect()
    }

    /// Mean over all samples of all four channels.
    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// Copy of the `size_y × size_x` window starting at `(y, x)`.
    pub fn crop(&self, y: usize, x: usize, size_y: usize, size_x: usize) -> Result<Self> {
        if size_y == 0 || size_x == 0 || y + size_y > self.height || x + size_x > self.width {
            return Err(Error::Dimension(format!(
                "crop {size_y}x{size_x} at ({y},{x}) outside {}x{}",
                self.height, self.width
            )));
        }
        let mut data = Vec::with_capacity(size_y * size_x * 4);
        for row in y..y + size_y {
            let start = (row * self.width + x) * 4;
            data.extend_from_slice(&self.data[start..start + size_x * 4]);
        }
        Ok(PackedRaw::from_parts(size_y, size_x, data))
    }
}

/// Three-channel sRGB-encoded image with samples in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl RgbImage {
    pub fn new(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        check_len("rgb image", height, width, 3, data.len())?;
        check_even("rgb image", height, width)?;
        check_samples(&data)?;
        Ok(RgbImage {
            height,
            width,
            data,
        })
    }

    pub(crate) fn from_parts(height: usize, width: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(height * width * 3, data.len());
        RgbImage {
            height,
            width,
            data,
        }
    }

    /// Uniform image of one colour.
    pub fn filled(height: usize, width: usize, rgb: [f64; 3]) -> Result<Self> {
        let data = (0..height * width).flat_map(|_| rgb).collect();
        Self::new(height, width, data)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn pixel(&self, y: usize, x: usize) -> [f64; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn crop(&self, y: usize, x: usize, size_y: usize, size_x: usize) -> Result<Self> {
        if size_y == 0 || size_x == 0 || y + size_y > self.height || x + size_x > self.width {
            return Err(Error::Dimension(format!(
                "crop {size_y}x{size_x} at ({y},{x}) outside {}x{}",
                self.height, self.width
            )));
        }
        let mut data = Vec::with_capacity(size_y * size_x * 3);
        for row in y..y + size_y {
            let start = (row * self.width + x) * 3;
            data.extend_from_slice(&self.data[start..start + size_x * 3]);
        }
        Ok(RgbImage::from_parts(size_y, size_x, data))
    }

    /// Checks that this image is exactly twice the size of `raw`.
    pub fn check_paired(&self, raw: &PackedRaw) -> Result<()> {
        if self.height != 2 * raw.height || self.width != 2 * raw.width {
            return Err(Error::Alignment(format!(
                "rgb {}x{} is not twice raw {}x{}",
                self.height, self.width, raw.height, raw.width
            )));
        }
        Ok(())
    }
}

pub fn pack_rggb(m: &Mosaic) -> PackedRaw {
    let (ph, pw) = (m.height / 2, m.width / 2);
    let mut data = Vec::with_capacity(ph * pw * 4);
    for i in 0..ph {
        for j in 0..pw {
            for (dy, dx) in RGGB_SITES {
                data.push(m.get(2 * i + dy, 2 * j + dx));
            }
        }
    }
    PackedRaw::from_parts(ph, pw, data)
}

pub fn unpack_rggb(p: &PackedRaw) -> Mosaic {
    let (h, w) = (p.height * 2, p.width * 2);
    let mut data = vec![0.0; h * w];
    for i in 0..p.height {
        for j in 0..p.width {
            for (c, (dy, dx)) in RGGB_SITES.into_iter().enumerate() {
                data[(2 * i + dy) * w + 2 * j + dx] = p.get(i, j, c);
            }
        }
    }
    Mosaic::from_parts(h, w, data)
}

/// One of the eight symmetries of the square.
///
/// Bit 0 is a horizontal flip (columns reversed), bit 1 a vertical flip
/// (rows reversed), bit 2 a transpose. They are applied in that order, so
/// index 5 means "flip horizontally, then transpose".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct DihedralIndex(u8);

impl DihedralIndex {
    pub const IDENTITY: Self = DihedralIndex(0);
    pub const HFLIP: Self = DihedralIndex(1);
    pub const VFLIP: Self = DihedralIndex(2);
    pub const ROT180: Self = DihedralIndex(3);
    pub const TRANSPOSE: Self = DihedralIndex(4);

    pub fn new(index: u8) -> Result<Self> {
        if index < 8 {
            Ok(DihedralIndex(index))
        } else {
            Err(Error::InvalidArgument(format!(
                "dihedral index {index} outside 0..8"
            )))
        }
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = DihedralIndex> {
        (0..8).map(DihedralIndex)
    }

    pub fn hflip(self) -> bool {
        self.0 & 1 != 0
    }

    pub fn vflip(self) -> bool {
        self.0 & 2 != 0
    }

    pub fn transpose(self) -> bool {
        self.0 & 4 != 0
    }

    /// The transform undoing `self`.
    ///
    /// Flips commute with each other and are involutions; undoing
    /// `T∘V^v∘H^h` gives `H^h∘V^v∘T = T∘V^h∘H^v`, so only the transposing
    /// elements need their flip bits swapped.
    pub fn inverse(self) -> Self {
        if self.transpose() {
            let h = self.0 & 1;
            let v = (self.0 >> 1) & 1;
            DihedralIndex(4 | (h << 1) | v)
        } else {
            self
        }
    }

    /// The single transform equal to applying `self` and then `then`.
    pub fn then(self, then: DihedralIndex) -> DihedralIndex {
        // A 2×3 grid of distinct labels tells all eight transforms apart.
        let probe: Vec<u8> = (0..6).collect();
        let (h1, w1, a) = transform_grid(2, 3, 1, &probe, self);
        let composed = transform_grid(h1, w1, 1, &a, then);
        DihedralIndex::all()
            .find(|&t| transform_grid(2, 3, 1, &probe, t) == composed)
            .expect("dihedral group is closed")
    }
}

impl fmt::Display for DihedralIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d{}", self.0)
    }
}

/// Applies `t` to a row-major, channel-interleaved `h × w × channels` grid.
/// Returns the new height and width with the permuted buffer.
pub fn transform_grid<T: Copy>(
    h: usize,
    w: usize,
    channels: usize,
    data: &[T],
    t: DihedralIndex,
) -> (usize, usize, Vec<T>) {
    debug_assert_eq!(h * w * channels, data.len());
    let (oh, ow) = if t.transpose() { (w, h) } else { (h, w) };
    let mut out = Vec::with_capacity(data.len());
    // Walk the output in raster order and pull from the source.
    for oy in 0..oh {
        for ox in 0..ow {
            let (mut y, mut x) = (oy, ox);
            // Undo in reverse order of application: transpose, then flips.
            if t.transpose() {
                std::mem::swap(&mut y, &mut x);
            }
            if t.vflip() {
                y = h - 1 - y;
            }
            if t.hflip() {
                x = w - 1 - x;
            }
            let s = (y * w + x) * channels;
            out.extend_from_slice(&data[s..s + channels]);
        }
    }
    (oh, ow, out)
}

pub fn dihedral_mosaic(m: &Mosaic, t: DihedralIndex) -> Mosaic {
    let (h, w, data) = transform_grid(m.height, m.width, 1, &m.data, t);
    Mosaic::from_parts(h, w, data)
}

pub fn dihedral_rgb(img: &RgbImage, t: DihedralIndex) -> RgbImage {
    let (h, w, data) = transform_grid(img.height, img.width, 3, &img.data, t);
    RgbImage::from_parts(h, w, data)
}

/// For each output channel, the input channel it is read from after `t`.
///
/// A 2×2 Bayer block maps onto a 2×2 block, and the arrangement inside it
/// follows the same transform, so transforming the block of channel labels
/// yields the permutation.
pub fn bayer_channel_permutation(t: DihedralIndex) -> [usize; 4] {
    let (_, _, perm) = transform_grid(2, 2, 1, &[CH_R, CH_G1, CH_G2, CH_B], t);
    [perm[0], perm[1], perm[2], perm[3]]
}

/// Dihedral transform of packed RAW that agrees with transforming the
/// full-resolution mosaic and re-packing it.
pub fn dihedral_packed(p: &PackedRaw, t: DihedralIndex) -> PackedRaw {
    let (h, w, spatial) = transform_grid(p.height, p.width, 4, &p.data, t);
    let perm = bayer_channel_permutation(t);
    let mut data = Vec::with_capacity(spatial.len());
    for px in spatial.chunks_exact(4) {
        data.extend(perm.iter().map(|&c| px[c]));
    }
    PackedRaw::from_parts(h, w, data)
}

/// Nearest 12-bit code of a normalized sample. Out-of-range input is
/// clamped first; ties round away from zero.
#[inline]
pub fn quantize_code(x: f64) -> u16 {
    let x = if x.is_nan() { 0.0 } else { x.clamp(0.0, 1.0) };
    (x * MAX_CODE_F).round() as u16
}

#[inline]
pub fn dequantize_code(c: u16) -> f64 {
    f64::from(c) / MAX_CODE_F
}

#[inline]
pub fn quantize12_sample(x: f64) -> f64 {
    dequantize_code(quantize_code(x))
}

/// Snaps every sample to the 12-bit grid.
pub fn quantize12(p: &PackedRaw) -> PackedRaw {
    PackedRaw::from_parts(
        p.height,
        p.width,
        p.data.iter().map(|&v| quantize12_sample(v)).collect(),
    )
}

/// Quantizes unchecked linear samples (may lie outside `[0, 1]`).
pub(crate) fn quantize12_vec(height: usize, width: usize, data: Vec<f64>) -> PackedRaw {
    PackedRaw::from_parts(
        height,
        width,
        data.into_iter().map(quantize12_sample).collect(),
    )
}
